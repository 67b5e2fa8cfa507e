#pragma once

#include <stdexcept>
#include <string>

namespace spinres {

// Bad input: violated precondition, malformed config, unknown key.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failure at runtime: step underflow, NaN, truncation blow-up.
class NumericsError : public std::runtime_error {
 public:
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

class SingularityError : public NumericsError {
 public:
  explicit SingularityError(const std::string& what) : NumericsError(what) {}
};

class DegeneracyError : public ValidationError {
 public:
  explicit DegeneracyError(const std::string& what) : ValidationError(what) {}
};

class TruncationError : public NumericsError {
 public:
  explicit TruncationError(const std::string& what) : NumericsError(what) {}
};

}  // namespace spinres
