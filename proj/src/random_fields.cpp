#include "nemalab/random_fields.hpp"

#include <cmath>

#include "nemalab/littlewood_paley.hpp"
#include "nemalab/spectral.hpp"

namespace nemalab {

Band dyadic_band(int q_lo, int q_hi) {
  return {std::ldexp(DyadicPartition::kInner, q_lo), std::ldexp(DyadicPartition::kOuter, q_hi), true};
}

RealField random_field(const Grid& grid, Rng& rng, const Band& band) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& r = grid.lattice().xi_norm;
  Spectrum s(grid);
  for (std::size_t m = 1; m < s.size(); ++m) {
    const double re = normal(rng);
    const double im = normal(rng);
    if (r[m] >= band.xi_min && r[m] <= band.xi_max) s[m] = Complex(re, im);
  }
  if (band.dealiased) dealias_in_place(s);
  // Kill Nyquist planes so every derivative is exact.
  const auto& nyq = grid.lattice().nyquist;
  for (std::size_t m = 0; m < s.size(); ++m)
    if (nyq[m]) s[m] = Complex{};
  // Round trip through physical space restores Hermitian symmetry.
  Spectrum clean = transform_forward(transform_inverse(s));
  clean[0] = Complex{};
  const double norm = clean.l2_norm();
  if (norm == 0.0) return RealField(grid);
  clean *= 1.0 / norm;
  return transform_inverse(clean);
}

VectorField random_vector_field(const Grid& grid, int components, Rng& rng, const Band& band) {
  std::vector<RealField> comps;
  for (int i = 0; i < components; ++i) comps.push_back(random_field(grid, rng, band).with_role(FieldRole::vector_component));
  return VectorField(std::move(comps));
}

RealField fourier_mode(const Grid& grid, const std::array<int, 3>& k, double amplitude, double phase) {
  return RealField::sample(grid, [&](const std::array<double, 3>& x) {
    double arg = phase;
    for (int a = 0; a < grid.dim(); ++a) arg += k[a] * (kTwoPi / grid.period(a)) * x[a];
    return amplitude * std::cos(arg);
  });
}

}  // namespace nemalab
