#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace batopt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a model expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

class KineticsError : public DomainError {
 public:
  using DomainError::DomainError;
};

class MeasurementError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ExtrapolationError : public Error {
 public:
  using Error::Error;
};

// Failure while evaluating the NLP; carries the offending variable range.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, std::size_t first_var, std::size_t last_var);
  std::size_t first_variable() const { return first_; }
  std::size_t last_variable() const { return last_; }

 private:
  std::size_t first_;
  std::size_t last_;
};

class ReplayError : public Error {
 public:
  using Error::Error;
};

class DegenerateProfileError : public Error {
 public:
  using Error::Error;
};

}  // namespace batopt
