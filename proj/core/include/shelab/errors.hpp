//! \file errors.hpp
#pragma once

#include <stdexcept>
#include <string>

namespace shelab {

//! Invalid user-facing parameter. `field()` is the config key path, e.g. "model.s".
class ParameterError : public std::invalid_argument {
 public:
  ParameterError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

//! A closed form was requested outside the parameter region where it holds.
class DomainViolation : public std::domain_error {
 public:
  explicit DomainViolation(const std::string& inequality)
      : std::domain_error("closed form requires " + inequality), inequality_(inequality) {}
  const std::string& inequality() const noexcept { return inequality_; }

 private:
  std::string inequality_;
};

} // namespace shelab
