#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spindrops {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Operands live on incompatible spin systems or have mismatched shapes.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// The request is valid but outside what the toolkit supports (e.g. three spins-1).
class ScopeError : public Error {
  public:
    using Error::Error;
};

/// Malformed input text; `position` is a 0-based character offset.
class ParseError : public Error {
  public:
    ParseError(const std::string &msg, std::size_t position)
        : Error(msg + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

  private:
    std::size_t position_;
};

/// A file or payload does not follow the expected schema.
class SchemaError : public Error {
  public:
    using Error::Error;
};

} // namespace spindrops
