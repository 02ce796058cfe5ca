#pragma once

#include <stdexcept>
#include <string>

namespace isoflow {

/// Raised when an argument lies outside the domain of a geometric quantity
/// (inside the horizon, below the horizon area, non-positive perimeter, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised by the level-set solver when the field stops being finite.
class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(const std::string& what, double last_good_time)
      : std::runtime_error(what), last_good_time_(last_good_time) {}

  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

}  // namespace isoflow
