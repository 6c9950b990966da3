#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace nemalab {

/// Invalid configuration or parameters (CLI exit code 3).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The discrete evolution left its admissible regime (CLI exit code 2).
class SolverBreakdown : public std::runtime_error {
 public:
  enum class Kind { density_floor, non_finite, director_degenerate };

  SolverBreakdown(Kind kind, const std::string& what, double time = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), kind_(kind), time_(time) {}

  Kind kind() const { return kind_; }
  double time() const { return time_; }
  SolverBreakdown at_time(double t) const { return SolverBreakdown(kind_, what(), t); }

 private:
  Kind kind_;
  double time_;
};

std::string to_string(SolverBreakdown::Kind kind);

}  // namespace nemalab
