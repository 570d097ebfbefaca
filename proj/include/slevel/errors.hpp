#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slevel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Requested evaluation mode or operation is not available for a problem/domain.
class Unsupported : public Error {
 public:
  using Error::Error;
};

// A sampled value or gradient came back NaN/inf.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::size_t component)
      : Error(what), component_(component) {}
  std::size_t component() const { return component_; }

 private:
  std::size_t component_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace slevel
