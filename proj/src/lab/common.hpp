#pragma once

#include <chrono>
#include <sstream>
#include <string>
#include <vector>

#include "nemalab/errors.hpp"
#include "nemalab/lab.hpp"
#include "nemalab/random_fields.hpp"
#include "nemalab/spectral.hpp"

namespace nemalab::lab::detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Column {
  std::string name;
  std::vector<double> values;
};

std::string csv_table(const std::vector<Column>& columns);

nlohmann::json to_json(const InitialNorms& n);
nlohmann::json to_json(const SolverBreakdown& b);

/// Stored index of the integer wavevector k and whether the stored
/// coefficient is the conjugate partner. Throws ConfigError when k is not
/// representable on the grid.
std::pair<std::size_t, bool> mode_index(const Grid& grid, std::array<int, 3> k);
Complex coefficient(const Spectrum& s, const std::array<int, 3>& k);

/// Random band-limited vector field with the given RMS value.
VectorField random_velocity(const Grid& grid, Rng& rng, const Band& band, double rms);

/// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nemalab::lab::detail
