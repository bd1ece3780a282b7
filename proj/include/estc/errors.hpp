#pragma once

#include <stdexcept>
#include <string>

namespace estc {

// Base for every error raised by the library. Catch sites in the CLI map
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public Error {
 public:
  SingularMatrix(const std::string& what, double magnitude)
      : Error(what), magnitude_(magnitude) {}
  double magnitude() const { return magnitude_; }

 private:
  double magnitude_;
};

// Field / parameter validation failures.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::string key)
      : Error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class TransversalityViolation : public ValidationError {
 public:
  TransversalityViolation(char amplitude, int j, int k, double value);
  int j() const { return j_; }
  int k() const { return k_; }

 private:
  int j_;
  int k_;
};

class ZeroField : public ValidationError {
 public:
  ZeroField() : ValidationError("field intensity I_A is zero", "I_A") {}
};

class ShiftNotInS13 : public Error {
 public:
  using Error::Error;
};

class NotInterior : public Error {
 public:
  using Error::Error;
};

class DegenerateOverlap : public Error {
 public:
  DegenerateOverlap(const std::string& what, double rcond)
      : Error(what), rcond_(rcond) {}
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

class StageSingular : public Error {
 public:
  StageSingular(std::size_t stage, std::string site, double rcond);
  std::size_t stage() const { return stage_; }
  double rcond() const { return rcond_; }

 private:
  std::size_t stage_;
  double rcond_;
};

class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

// Malformed input text or files, with a line number when known (0 if not).
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::string key, int line)
      : ValidationError(what, std::move(key)), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace estc
