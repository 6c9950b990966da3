#pragma once

#include <cstdint>
#include <random>

#include "nemalab/field.hpp"

namespace nemalab {

using Rng = std::mt19937_64;

/// Band selection for random fields, in physical |ξ|.
struct Band {
  double xi_min = 0.0;
  double xi_max = 1e300;
  /// Additionally drop modes removed by the 2/3 rule.
  bool dealiased = true;
};

/// Band covering dyadic blocks q_lo..q_hi (annulus support 2^q [5/6, 12/5]).
Band dyadic_band(int q_lo, int q_hi);

/// Mean-free real field with independent Gaussian coefficients on `band`,
/// normalised to unit L² norm. Returns zero if the band holds no mode.
RealField random_field(const Grid& grid, Rng& rng, const Band& band = {});
VectorField random_vector_field(const Grid& grid, int components, Rng& rng, const Band& band = {});

/// Single real Fourier mode A cos(ξ_k·x + phase).
RealField fourier_mode(const Grid& grid, const std::array<int, 3>& k, double amplitude = 1.0, double phase = 0.0);

}  // namespace nemalab
