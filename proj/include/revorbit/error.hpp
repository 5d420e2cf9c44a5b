#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace revorbit {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error { using Error::Error; };
class SingularPoint : public Error { using Error::Error; };
class NonEmbeddable : public Error { using Error::Error; };
class InvalidSurface : public Error { using Error::Error; };
class EvalError : public Error { using Error::Error; };
class ThetaZero : public Error { using Error::Error; };
class RangeError : public Error { using Error::Error; };
class NonConstantH : public Error { using Error::Error; };
class StepTooLarge : public Error { using Error::Error; };
class Unbound : public Error { using Error::Error; };
class QuadratureFailure : public Error { using Error::Error; };
class DegenerateCircular : public Error { using Error::Error; };
class ComplexEta : public Error { using Error::Error; };
class NoCriticalPoint : public Error { using Error::Error; };
class InvalidArgument : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

} // namespace revorbit
