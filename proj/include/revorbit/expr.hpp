#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace revorbit::expr {

enum class Op {
    Const, Var,
    Add, Sub, Mul, Div, Pow, Neg,
    Sin, Cos, Exp, Log, Sqrt, Sinh, Cosh,
};

struct Node;

/// Immutable expression tree over the single variable u.
using Expr = std::shared_ptr<const Node>;

struct Node {
    Op op;
    double value = 0.0; // Const only
    Expr lhs;           // unary operand or left operand
    Expr rhs;           // right operand of binary ops
};

Expr constant(double v);
Expr variable();

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& a, const Expr& b);
Expr apply(Op fn, const Expr& a);

inline Expr sin(const Expr& a) { return apply(Op::Sin, a); }
inline Expr cos(const Expr& a) { return apply(Op::Cos, a); }
inline Expr exp(const Expr& a) { return apply(Op::Exp, a); }
inline Expr log(const Expr& a) { return apply(Op::Log, a); }
inline Expr sqrt(const Expr& a) { return apply(Op::Sqrt, a); }
inline Expr sinh(const Expr& a) { return apply(Op::Sinh, a); }
inline Expr cosh(const Expr& a) { return apply(Op::Cosh, a); }

bool is_constant(const Expr& e, double* value = nullptr);

/// Parses reals, the variable `u`, `pi`, the operators + - * / ^ with the
/// usual precedence (^ binds tightest and is right-associative), parentheses
/// and the functions sin cos exp log sqrt sinh cosh. Throws ParseError.
Expr parse(std::string_view text);

/// Throws EvalError on division by zero, sqrt/log outside their domain and
/// non-integer powers of negative numbers.
double eval(const Expr& e, double u);

/// Symbolic derivative with respect to u, lightly simplified.
Expr derivative(const Expr& e);

std::string to_string(const Expr& e);

} // namespace revorbit::expr
