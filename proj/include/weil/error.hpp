#pragma once

/**
 * @file error.hpp
 * @brief Exception types raised by the library.
 *
 * Every failure derives from weil::Error so callers (the CLI in particular)
 * can separate library errors from programming errors.
 */

#include <cstddef>
#include <stdexcept>
#include <string>

namespace weil {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// algebra construction
class InvalidAlgebraSpec : public Error { using Error::Error; };
class InfiniteDimensional : public Error { using Error::Error; };
class AlgebraTooLarge : public Error { using Error::Error; };

// arithmetic
class AlgebraMismatch : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class NotInvertible : public Error { using Error::Error; };
class SingularAugmentation : public Error { using Error::Error; };
class IndexOutOfRange : public Error { using Error::Error; };

// expressions
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};
class SyntaxError : public ParseError { using ParseError::ParseError; };
class UnknownIdentifier : public ParseError { using ParseError::ParseError; };
class VariableOutOfRange : public ParseError { using ParseError::ParseError; };

class DomainError : public Error { using Error::Error; };
class SamplingExhausted : public Error { using Error::Error; };

// lifted geometry
class UnrepresentableBracket : public Error { using Error::Error; };
class DegenerateAt : public Error { using Error::Error; };
class NotSymbolic : public Error { using Error::Error; };

}  // namespace weil
