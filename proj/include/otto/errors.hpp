#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace otto {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Lexing or parsing failure. `position` is a 1-based column into the source text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// log/sqrt of an out-of-range argument, division by zero, overflow.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnboundParameter : public Error {
 public:
  explicit UnboundParameter(const std::string& name)
      : Error("unbound parameter '" + name + "'"), name_(name) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// The cycle does not deliver positive work from positive hot-bath heat.
class NotAnEngine : public Error {
 public:
  using Error::Error;
};

class NoSolution : public Error {
 public:
  using Error::Error;
};

/// The constraint equation has more than one root in the searched bracket.
class AmbiguousConstraint : public Error {
 public:
  using Error::Error;
};

class SingularConstraint : public Error {
 public:
  using Error::Error;
};

class Indeterminate : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(key) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace otto
