#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad user input: schema violations and out-of-range physical parameters.
class InputError : public Error {
public:
  using Error::Error;
};

class ValidationError : public InputError {
public:
  ValidationError(std::string field, const std::string& message)
      : InputError("invalid '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

class ParseError : public InputError {
public:
  ParseError(std::string field, int line, const std::string& message)
      : InputError(format(field, line, message)), field_(std::move(field)), line_(line) {}
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

private:
  static std::string format(const std::string& field, int line, const std::string& message) {
    std::string out = "parse error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!field.empty()) out += " in '" + field + "'";
    return out + ": " + message;
  }
  std::string field_;
  int line_;
};

// Anything that goes wrong while computing.
class NumericError : public Error {
public:
  using Error::Error;
};

class DimensionError : public NumericError {
public:
  using NumericError::NumericError;
};

class DegenerateDrive : public NumericError {
public:
  using NumericError::NumericError;
};

class FrameError : public NumericError {
public:
  using NumericError::NumericError;
};

class NotHermitian : public NumericError {
public:
  using NumericError::NumericError;
};

class ToleranceError : public NumericError {
public:
  using NumericError::NumericError;
};

class StepSizeUnderflow : public NumericError {
public:
  StepSizeUnderflow(double t_reached, const std::string& message)
      : NumericError(message + " (reached t = " + std::to_string(t_reached) + " us)"),
        t_reached_(t_reached) {}
  double t_reached() const noexcept { return t_reached_; }

private:
  double t_reached_;
};

class PhaseUnwrapError : public NumericError {
public:
  using NumericError::NumericError;
};

class LowOverlap : public NumericError {
public:
  using NumericError::NumericError;
};

class CalibrationError : public NumericError {
public:
  using NumericError::NumericError;
};

// Reading or writing files.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace cqed
