#include <boost/math/tools/roots.hpp>

#include "nemalab/errors.hpp"
#include "nemalab/lab.hpp"
#include "nemalab/random_fields.hpp"
#include "nemalab/spectral.hpp"

namespace nemalab::lab {

namespace {

constexpr HybridSpec kCritical{0.5, 1.5, 0};

BlockMasses masses_of(const VectorField& v, const DyadicPartition& p) {
  return block_masses(forward_all(v.components()), p);
}

VectorField normalized_sum(const VectorField& d, const VectorField& w, double s) {
  VectorField out(d.grid(), 3);
  for (std::size_t x = 0; x < d.grid().point_count(); ++x) {
    const double c[3] = {d[0][x] + s * w[0][x], d[1][x] + s * w[1][x], d[2][x] + s * w[2][x]};
    const double n = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    if (!(n > 1e-3)) throw std::domain_error("director perturbation passes through zero");
    for (int k = 0; k < 3; ++k) out[k][x] = c[k] / n;
  }
  return out;
}

}  // namespace

InitialNorms measure_initial_norms(const LCState& s, const DyadicPartition& p) {
  RealField a = s.rho;
  a -= RealField::constant(s.grid(), 1.0);
  InitialNorms n;
  n.density = hybrid_norm(block_masses(transform_forward(a), p), kCritical);
  n.velocity = besov_norm(masses_of(s.u, p), 0.5);
  // Block norms ignore the mean, so d and d − d̂ give the same value.
  n.director = hybrid_norm(masses_of(s.d, p), kCritical);
  return n;
}

VectorField perturb_director(const VectorField& d, const VectorField& w, double target, const HybridSpec& norm,
                             const DyadicPartition& p, double* s_out) {
  if (s_out) *s_out = 0.0;
  if (target == 0.0) return d;
  auto excess = [&](double s) {
    VectorField diff = normalized_sum(d, w, s);
    diff -= d;
    return hybrid_norm(masses_of(diff, p), norm) - target;
  };
  const double wn = hybrid_norm(masses_of(w, p), norm);
  if (!(wn > 0.0)) throw std::domain_error("director perturbation direction is zero");
  double lo = 0.0, hi = target / wn;
  double f_hi = excess(hi);
  for (int i = 0; f_hi < 0.0; ++i) {
    if (i == 60) throw std::domain_error("director target norm is unreachable");
    lo = hi;
    hi *= 2.0;
    f_hi = excess(hi);
  }
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(excess, lo, hi, excess(lo), f_hi,
                                                        boost::math::tools::eps_tolerance<double>(50), iters);
  // Keep whichever endpoint lands closer to the target.
  const double s = std::abs(excess(a)) <= std::abs(excess(b)) ? a : b;
  if (s_out) *s_out = s;
  return normalized_sum(d, w, s);
}

GeneratedData generate_initial_data(const Grid& grid, const InitialDataSpec& spec) {
  spec.validate();
  const DyadicPartition p(grid);
  const Band band = dyadic_band(spec.q_lo, spec.q_hi);
  const LCState eq = Equilibrium{spec.d_hat}.state(grid);

  for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
    const std::uint64_t seed = spec.seed + attempt;
    Rng rng(seed);
    RealField a = random_field(grid, rng, band);
    VectorField u = random_vector_field(grid, grid.dim(), rng, band);
    VectorField w = random_vector_field(grid, 3, rng, band);

    const double na = hybrid_norm(block_masses(transform_forward(a), p), kCritical);
    const double nu = besov_norm(masses_of(u, p), 0.5);
    if ((spec.eta_density > 0 && !(na > 0)) || (spec.eta_velocity > 0 && !(nu > 0))) continue;
    a *= spec.eta_density > 0 ? spec.eta_density / na : 0.0;
    u *= spec.eta_velocity > 0 ? spec.eta_velocity / nu : 0.0;

    GeneratedData out{eq, seed, 0.0};
    try {
      out.state.d = perturb_director(eq.d, w, spec.eta_director, kCritical, p, &out.director_epsilon);
    } catch (const std::domain_error&) {
      continue;
    }
    out.state.rho += a;
    out.state.u = std::move(u);
    return out;
  }
  throw ConfigError("initial data: no seed in 16 attempts reaches the target norms (is the band empty?)");
}

}  // namespace nemalab::lab
