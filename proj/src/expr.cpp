#include "revorbit/expr.hpp"

#include "revorbit/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace revorbit::expr {

namespace {

Expr make(Op op, Expr lhs = nullptr, Expr rhs = nullptr) {
    return std::make_shared<const Node>(Node{op, 0.0, std::move(lhs), std::move(rhs)});
}

bool is_value(const Expr& e, double v) {
    double c;
    return is_constant(e, &c) && c == v;
}

} // namespace

bool is_constant(const Expr& e, double* value) {
    if (e->op != Op::Const) return false;
    if (value) *value = e->value;
    return true;
}

Expr constant(double v) {
    return std::make_shared<const Node>(Node{Op::Const, v, nullptr, nullptr});
}

Expr variable() {
    static const Expr u = make(Op::Var);
    return u;
}

Expr operator+(const Expr& a, const Expr& b) {
    double x, y;
    if (is_constant(a, &x) && is_constant(b, &y)) return constant(x + y);
    if (is_value(a, 0.0)) return b;
    if (is_value(b, 0.0)) return a;
    if (b->op == Op::Neg) return a - b->lhs;
    return make(Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
    double x, y;
    if (is_constant(a, &x) && is_constant(b, &y)) return constant(x - y);
    if (is_value(b, 0.0)) return a;
    if (is_value(a, 0.0)) return -b;
    if (b->op == Op::Neg) return a + b->lhs;
    return make(Op::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
    double x, y;
    if (is_constant(a, &x) && is_constant(b, &y)) return constant(x * y);
    if (is_value(a, 0.0) || is_value(b, 0.0)) return constant(0.0);
    if (is_value(a, 1.0)) return b;
    if (is_value(b, 1.0)) return a;
    if (is_value(a, -1.0)) return -b;
    if (is_value(b, -1.0)) return -a;
    if (a->op == Op::Neg) return -(a->lhs * b);
    if (b->op == Op::Neg) return -(a * b->lhs);
    return make(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
    double x, y;
    if (is_constant(a, &x) && is_constant(b, &y) && y != 0.0) return constant(x / y);
    if (is_value(a, 0.0)) return constant(0.0);
    if (is_value(b, 1.0)) return a;
    if (a->op == Op::Neg) return -(a->lhs / b);
    return make(Op::Div, a, b);
}

Expr operator-(const Expr& a) {
    double x;
    if (is_constant(a, &x)) return constant(-x);
    if (a->op == Op::Neg) return a->lhs;
    return make(Op::Neg, a);
}

Expr pow(const Expr& a, const Expr& b) {
    double x, y;
    if (is_constant(b, &y)) {
        if (y == 0.0) return constant(1.0);
        if (y == 1.0) return a;
        if (is_constant(a, &x) && (x > 0.0 || y == std::floor(y))) return constant(std::pow(x, y));
    }
    return make(Op::Pow, a, b);
}

Expr apply(Op fn, const Expr& a) {
    return make(fn, a);
}

// ---------------------------------------------------------------------------
// Evaluation

double eval(const Expr& e, double u) {
    switch (e->op) {
    case Op::Const: return e->value;
    case Op::Var: return u;
    case Op::Add: return eval(e->lhs, u) + eval(e->rhs, u);
    case Op::Sub: return eval(e->lhs, u) - eval(e->rhs, u);
    case Op::Mul: return eval(e->lhs, u) * eval(e->rhs, u);
    case Op::Div: {
        const double den = eval(e->rhs, u);
        if (den == 0.0) throw EvalError("division by zero");
        return eval(e->lhs, u) / den;
    }
    case Op::Pow: {
        const double base = eval(e->lhs, u);
        const double ex = eval(e->rhs, u);
        if (base < 0.0 && ex != std::floor(ex)) throw EvalError("non-integer power of a negative number");
        if (base == 0.0 && ex < 0.0) throw EvalError("division by zero");
        return std::pow(base, ex);
    }
    case Op::Neg: return -eval(e->lhs, u);
    case Op::Sin: return std::sin(eval(e->lhs, u));
    case Op::Cos: return std::cos(eval(e->lhs, u));
    case Op::Exp: return std::exp(eval(e->lhs, u));
    case Op::Log: {
        const double x = eval(e->lhs, u);
        if (x <= 0.0) throw EvalError("log of a non-positive number");
        return std::log(x);
    }
    case Op::Sqrt: {
        const double x = eval(e->lhs, u);
        if (x < 0.0) throw EvalError("sqrt of a negative number");
        return std::sqrt(x);
    }
    case Op::Sinh: return std::sinh(eval(e->lhs, u));
    case Op::Cosh: return std::cosh(eval(e->lhs, u));
    }
    throw EvalError("unknown node");
}

// ---------------------------------------------------------------------------
// Differentiation

Expr derivative(const Expr& e) {
    const Expr& a = e->lhs;
    const Expr& b = e->rhs;
    switch (e->op) {
    case Op::Const: return constant(0.0);
    case Op::Var: return constant(1.0);
    case Op::Add: return derivative(a) + derivative(b);
    case Op::Sub: return derivative(a) - derivative(b);
    case Op::Mul: return derivative(a) * b + a * derivative(b);
    case Op::Div: {
        const Expr da = derivative(a);
        const Expr db = derivative(b);
        if (is_value(db, 0.0)) return da / b;
        return (da * b - a * db) / pow(b, constant(2.0));
    }
    case Op::Pow: {
        double c;
        if (is_constant(b, &c)) {
            return constant(c) * pow(a, constant(c - 1.0)) * derivative(a);
        }
        if (is_constant(a)) {
            return e * log(a) * derivative(b);
        }
        return e * (derivative(b) * log(a) + b * derivative(a) / a);
    }
    case Op::Neg: return -derivative(a);
    case Op::Sin: return cos(a) * derivative(a);
    case Op::Cos: return -(sin(a) * derivative(a));
    case Op::Exp: return e * derivative(a);
    case Op::Log: return derivative(a) / a;
    case Op::Sqrt: return derivative(a) / (constant(2.0) * e);
    case Op::Sinh: return cosh(a) * derivative(a);
    case Op::Cosh: return sinh(a) * derivative(a);
    }
    throw EvalError("unknown node");
}

// ---------------------------------------------------------------------------
// Printing

namespace {

const char* function_name(Op op) {
    switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Sinh: return "sinh";
    case Op::Cosh: return "cosh";
    default: return nullptr;
    }
}

void print(std::ostringstream& os, const Expr& e) {
    switch (e->op) {
    case Op::Const: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", e->value);
        if (e->value < 0) os << '(' << buf << ')';
        else os << buf;
        return;
    }
    case Op::Var: os << 'u'; return;
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Pow: {
        const char sym = e->op == Op::Add ? '+' : e->op == Op::Sub ? '-' : e->op == Op::Mul ? '*'
                       : e->op == Op::Div ? '/' : '^';
        os << '(';
        print(os, e->lhs);
        os << sym;
        print(os, e->rhs);
        os << ')';
        return;
    }
    case Op::Neg: os << "(-"; print(os, e->lhs); os << ')'; return;
    default:
        os << function_name(e->op) << '(';
        print(os, e->lhs);
        os << ')';
    }
}

} // namespace

std::string to_string(const Expr& e) {
    std::ostringstream os;
    print(os, e);
    return os.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr run() {
        Expr e = sum();
        skip_space();
        if (pos_ != text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    Expr sum() {
        Expr e = product();
        for (;;) {
            if (accept('+')) e = e + product();
            else if (accept('-')) e = e - product();
            else return e;
        }
    }

    Expr product() {
        Expr e = unary();
        for (;;) {
            if (accept('*')) e = e * unary();
            else if (accept('/')) e = e / unary();
            else return e;
        }
    }

    Expr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (accept('^')) return pow(base, unary());
        return base;
    }

    Expr primary() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            const std::string_view name = text_.substr(start, pos_ - start);
            if (name == "u") return variable();
            if (name == "pi") return constant(std::numbers::pi);
            Op fn;
            if (name == "sin") fn = Op::Sin;
            else if (name == "cos") fn = Op::Cos;
            else if (name == "exp") fn = Op::Exp;
            else if (name == "log") fn = Op::Log;
            else if (name == "sqrt") fn = Op::Sqrt;
            else if (name == "sinh") fn = Op::Sinh;
            else if (name == "cosh") fn = Op::Cosh;
            else throw ParseError("unknown identifier '" + std::string(name) + "'", start);
            expect('(');
            Expr arg = sum();
            expect(')');
            return expr::apply(fn, arg);
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    Expr number() {
        const std::size_t start = pos_;
        double v = 0.0;
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr == first) throw ParseError("malformed number", start);
        pos_ += static_cast<std::size_t>(ptr - first);
        return constant(v);
    }
};

} // namespace

Expr parse(std::string_view text) {
    return Parser(text).run();
}

} // namespace revorbit::expr
