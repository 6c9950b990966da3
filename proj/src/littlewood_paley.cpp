#include "nemalab/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nemalab/spectral.hpp"

namespace nemalab {

namespace {

constexpr double kCutoffEnd = 6.0 / 5.0;

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

// Blocks q with 5/6 < 2^{-q} r < 12/5.
int lowest_block(double r) { return static_cast<int>(std::floor(std::log2(r / DyadicPartition::kOuter))) + 1; }
int highest_block(double r) { return static_cast<int>(std::ceil(std::log2(r / DyadicPartition::kInner))) - 1; }

}  // namespace

double DyadicPartition::cutoff(double r) {
  return 1.0 - smooth_step((r - kInner) / (kCutoffEnd - kInner));
}

double DyadicPartition::standard_psi(double r) {
  if (r <= kInner || r >= kOuter) return 0.0;
  return cutoff(0.5 * r) - cutoff(r);
}

DyadicPartition::DyadicPartition(const Grid& grid) : DyadicPartition(grid, &DyadicPartition::standard_psi) {}

DyadicPartition::DyadicPartition(const Grid& grid, Profile profile) : grid_(grid), profile_(std::move(profile)) {
  build();
}

double DyadicPartition::psi(double r) const { return profile_(r); }

double DyadicPartition::weight(int q, double r) const { return profile_(std::ldexp(r, -q)); }

void DyadicPartition::build() {
  const auto& lat = grid_.lattice();
  q_min_ = lowest_block(grid_.min_xi());
  q_max_ = highest_block(grid_.max_xi());
  blocks_.assign(static_cast<std::size_t>(q_max_ - q_min_ + 1), {});
  for (std::size_t m = 0; m < lat.xi_norm.size(); ++m) {
    const double r = lat.xi_norm[m];
    if (r == 0.0) continue;
    // One extra block on each side so that a non-standard profile is seen.
    const int lo = std::max(q_min_, lowest_block(r) - 1);
    const int hi = std::min(q_max_, highest_block(r) + 1);
    for (int q = lo; q <= hi; ++q) {
      const double w = weight(q, r);
      if (w != 0.0) blocks_[q - q_min_].push_back({m, w});
    }
  }
}

DyadicPartition build_partition(const Grid& grid) {
  bool full_annulus = false;
  for (int q = lowest_block(grid.min_xi()); q <= highest_block(grid.max_xi()); ++q)
    if (std::ldexp(DyadicPartition::kInner, q) >= grid.min_xi() &&
        std::ldexp(DyadicPartition::kOuter, q) <= grid.nyquist_xi())
      full_annulus = true;
  if (!full_annulus) throw std::invalid_argument("build_partition: grid too small to host one full dyadic annulus");
  return DyadicPartition(grid);
}

double partition_of_unity_defect(const DyadicPartition& p) {
  const auto& lat = p.grid().lattice();
  std::vector<double> sum(lat.xi_norm.size(), 0.0);
  for (int q = p.q_min(); q <= p.q_max(); ++q)
    for (const auto& e : p.block(q)) sum[e.mode] += e.weight;
  double defect = 0.0;
  for (std::size_t m = 0; m < sum.size(); ++m)
    if (lat.xi_norm[m] > 0.0) defect = std::max(defect, std::abs(sum[m] - 1.0));
  return defect;
}

double BlockMasses::at(int q) const {
  if (q < q_min || q > q_max()) return 0.0;
  return l2[q - q_min];
}

BlockSet decompose(const Spectrum& f, const DyadicPartition& p) {
  require_same_grid(f.grid(), p.grid(), "decompose");
  const Grid& grid = f.grid();
  const auto& w = grid.lattice().weight;
  BlockSet out;
  out.q_min = p.q_min();
  out.masses.q_min = p.q_min();
  out.mean = std::real(f.zero_mode());
  std::vector<double> coverage(f.size(), 0.0);
  auto c = f.coeffs();
  for (int q = p.q_min(); q <= p.q_max(); ++q) {
    Spectrum block(grid);
    auto bc = block.coeffs();
    double mass = 0.0;
    for (const auto& e : p.block(q)) {
      bc[e.mode] = e.weight * c[e.mode];
      coverage[e.mode] += e.weight;
      mass += w[e.mode] * std::norm(bc[e.mode]);
    }
    out.masses.l2.push_back(std::sqrt(grid.volume() * mass));
    out.blocks.push_back(std::move(block));
  }
  double res = 0.0;
  for (std::size_t m = 1; m < f.size(); ++m) res += w[m] * std::norm((1.0 - coverage[m]) * c[m]);
  out.residual = std::sqrt(grid.volume() * res);
  return out;
}

BlockSet decompose(const RealField& f, const DyadicPartition& p) { return decompose(transform_forward(f), p); }

BlockMasses block_masses(const Spectrum& f, const DyadicPartition& p) {
  return block_masses(std::vector<Spectrum>{f}, p);
}

BlockMasses block_masses(const std::vector<Spectrum>& v, const DyadicPartition& p) {
  BlockMasses out;
  out.q_min = p.q_min();
  if (v.empty()) return out;
  const Grid& grid = p.grid();
  for (const auto& s : v) require_same_grid(s.grid(), grid, "block_masses");
  const auto& w = grid.lattice().weight;
  out.l2.reserve(p.block_count());
  for (int q = p.q_min(); q <= p.q_max(); ++q) {
    double mass = 0.0;
    for (const auto& e : p.block(q)) {
      const double ww = w[e.mode] * e.weight * e.weight;
      for (const auto& s : v) mass += ww * std::norm(s[e.mode]);
    }
    out.l2.push_back(std::sqrt(grid.volume() * mass));
  }
  return out;
}

Spectrum low_frequency_cutoff(const BlockSet& b, int q) {
  Spectrum out(b.blocks.front().grid());
  for (int p = b.q_min; p <= std::min(q - 1, b.q_max()); ++p) out += b.block(p);
  return out;
}

Spectrum reconstruct(const BlockSet& b) { return low_frequency_cutoff(b, b.q_max() + 1); }

double phi_exponent(const HybridSpec& spec, int q) { return q <= spec.split ? spec.s : spec.t; }

double besov_norm(const BlockMasses& b, double s) {
  double sum = 0.0;
  for (std::size_t i = 0; i < b.l2.size(); ++i) sum += std::exp2(s * (b.q_min + static_cast<int>(i))) * b.l2[i];
  return sum;
}

double hybrid_norm(const BlockMasses& b, const HybridSpec& spec) {
  double sum = 0.0;
  for (std::size_t i = 0; i < b.l2.size(); ++i) {
    const int q = b.q_min + static_cast<int>(i);
    sum += std::exp2(phi_exponent(spec, q) * q) * b.l2[i];
  }
  return sum;
}

double besov_norm(const BlockSet& b, double s) { return besov_norm(b.masses, s); }
double hybrid_norm(const BlockSet& b, const HybridSpec& spec) { return hybrid_norm(b.masses, spec); }

double besov_norm(const RealField& f, const DyadicPartition& p, double s) {
  return besov_norm(block_masses(transform_forward(f), p), s);
}

double besov_norm(const VectorField& v, const DyadicPartition& p, double s) {
  return besov_norm(block_masses(forward_all(v.components()), p), s);
}

double hybrid_norm(const RealField& f, const DyadicPartition& p, const HybridSpec& spec) {
  return hybrid_norm(block_masses(transform_forward(f), p), spec);
}

double hybrid_norm(const VectorField& v, const DyadicPartition& p, const HybridSpec& spec) {
  return hybrid_norm(block_masses(forward_all(v.components()), p), spec);
}

RealField scaling_transform(const RealField& f, int k, int m) {
  const Grid dilated = f.grid().rescaled(std::exp2(-k));
  std::vector<double> values(f.values().begin(), f.values().end());
  const double amplitude = std::exp2(static_cast<double>(k) * m);
  for (double& v : values) v *= amplitude;
  return RealField(dilated, std::move(values), f.role());
}

RealField scaling_transform(const RealField& f, double factor, int m) {
  if (!(factor > 0.0)) throw std::invalid_argument("scaling_transform: scale factor must be positive");
  int exponent = 0;
  const double mantissa = std::frexp(factor, &exponent);
  if (mantissa != 0.5) throw std::invalid_argument("scaling_transform: scale factor must be a power of two (dyadic)");
  return scaling_transform(f, exponent - 1, m);
}

VectorField scaling_transform(const VectorField& v, int k, int m) {
  std::vector<RealField> comps;
  for (const auto& c : v.components()) comps.push_back(scaling_transform(c, k, m));
  return VectorField(std::move(comps));
}

ProductEstimate product_estimate_report(const RealField& f, const RealField& g, const HybridSpec& spec) {
  require_same_grid(f.grid(), g.grid(), "product_estimate_report");
  const RealField fine_f = transform_inverse(pad(transform_forward(f), 2));
  const RealField fine_g = transform_inverse(pad(transform_forward(g), 2));
  const RealField fg = pointwise_product(fine_f, fine_g);
  const DyadicPartition fine(fg.grid());
  const DyadicPartition coarse(f.grid());
  ProductEstimate out;
  out.lhs = hybrid_norm(fg, fine, spec);
  out.rhs = fine_f.max_abs() * hybrid_norm(g, coarse, spec) + fine_g.max_abs() * hybrid_norm(f, coarse, spec);
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

std::string spectrum_report_csv(const BlockMasses& b, double s) {
  std::ostringstream os;
  os.precision(17);
  os << "q,block_L2,weighted_block_L2\n";
  for (int q = b.q_min; q <= b.q_max(); ++q) os << q << ',' << b.at(q) << ',' << std::exp2(q * s) * b.at(q) << '\n';
  return os.str();
}

}  // namespace nemalab
