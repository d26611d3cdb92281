#pragma once

#include <stdexcept>
#include <string>

namespace cevm {

// Base class for all library errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// An argument lies outside the mathematical domain of an operation.
class domain_error : public error {
 public:
  explicit domain_error(const std::string& msg) : error(msg) {}
};

// A stated precondition of an operation does not hold.
class precondition_error : public error {
 public:
  explicit precondition_error(const std::string& msg) : error(msg) {}
};

// A user-supplied function produced a non-finite or otherwise unusable value.
class evaluation_error : public error {
 public:
  explicit evaluation_error(const std::string& msg) : error(msg) {}
};

// A numeric routine could not reach its tolerance; carries the achieved bound.
class numeric_error : public error {
 public:
  numeric_error(const std::string& msg, double achieved)
      : error(msg), achieved_tolerance(achieved) {}
  double achieved_tolerance;
};

// Name lookup failed (registry, JSON descriptor field).
class lookup_error : public error {
 public:
  explicit lookup_error(const std::string& msg) : error(msg) {}
};

// A model-level assumption failed (e.g. distribution not in any domain).
class model_error : public error {
 public:
  explicit model_error(const std::string& msg) : error(msg) {}
};

// Input data is insufficient for the requested statistical operation.
class data_error : public error {
 public:
  explicit data_error(const std::string& msg) : error(msg) {}
};

}  // namespace cevm
