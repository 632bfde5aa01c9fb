// Exception hierarchy shared by every pretime module.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pretime {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One or more parameter constraints failed. All failures are collected so a
/// single call reports everything that is wrong with the input.
class ConstraintViolation : public Error {
 public:
  explicit ConstraintViolation(std::vector<std::string> violated);

  const std::vector<std::string>& violated() const noexcept { return violated_; }
  bool names(const std::string& constraint) const;

 private:
  std::vector<std::string> violated_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class ToleranceNotMet : public Error {
 public:
  ToleranceNotMet(const std::string& what, double estimate, double target)
      : Error(what), estimate_(estimate), target_(target) {}

  double estimate() const noexcept { return estimate_; }
  double target() const noexcept { return target_; }

 private:
  double estimate_;
  double target_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pretime
