#include "common.hpp"
#include "nemalab/helmholtz.hpp"

namespace nemalab::lab {

using nlohmann::json;

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

double relative_max_abs(const VectorField& v, double scale) {
  double m = 0.0;
  for (const auto& c : v.components()) m = std::max(m, c.max_abs());
  return m / std::max(scale, 1e-300);
}

// Heat flow e^{tΔ}f sampled on [0, 1]; one synthetic trajectory for the
// interpolation ratio.
BlockSeries heat_trajectory(const Spectrum& f, const DyadicPartition& p) {
  BlockSeries out{"f", {}, {}};
  const auto& lat = f.grid().lattice();
  for (int i = 0; i <= 20; ++i) {
    const double t = 0.05 * i;
    Spectrum g = f;
    for (std::size_t m = 0; m < g.size(); ++m) g[m] *= std::exp(-lat.xi_norm[m] * lat.xi_norm[m] * t);
    out.push(t, block_masses(g, p));
  }
  return out;
}

}  // namespace

ExperimentResult cmd_selftest(const ExperimentConfig& cfg) {
  const auto& opt = cfg.section("selftest");
  const Grid& grid = cfg.grid;
  const int trials = opt.at("trials").get<int>();
  const int helm_trials = opt.at("helmholtz_trials").get<int>();
  const int base_trials = opt.at("baseline_trials").get<int>();
  Rng rng(opt.at("seed").get<std::uint64_t>());

  ExperimentResult res;
  res.experiment = "selftest";

  detail::Stopwatch pw;
  const DyadicPartition p = opt.at("corrupt_psi").get<bool>()
                                ? DyadicPartition(grid, [](double r) { return DyadicPartition::standard_psi(r / 1.1); })
                                : DyadicPartition(grid);
  const double pou = partition_of_unity_defect(p);
  const double pou_seconds = pw.seconds();
  res.checks.push_back(Check::at_most("partition of unity", pou, opt.at("tolerance_partition").get<double>()));
  res.checks.push_back(Check::at_most("partition runtime seconds", pou_seconds, opt.at("partition_seconds").get<double>()));

  double support_violation = 0.0;
  const auto& lat = grid.lattice();
  for (int q = p.q_min(); q <= p.q_max(); ++q) {
    for (const auto& e : p.block(q)) {
      const double r = std::ldexp(lat.xi_norm[e.mode], -q);
      if (e.weight != 0.0 && (r < DyadicPartition::kInner * (1 - 1e-12) || r > DyadicPartition::kOuter * (1 + 1e-12))) {
        support_violation = std::max(support_violation, std::abs(e.weight));
      }
    }
  }
  res.checks.push_back(Check::at_most("block support in annulus", support_violation, 0.0));

  const Band full{};
  double worst_recon = 0.0, bern_lo = INFINITY, bern_hi = 0.0;
  for (int i = 0; i < trials; ++i) {
    const RealField x = random_field(grid, rng, full);
    const Spectrum f = transform_forward(x);
    const BlockSet b = decompose(f, p);
    // Rebuild in physical space rather than trusting the weight sums.
    RealField rest = x - RealField::constant(grid, b.mean);
    for (const auto& blk : b.blocks) rest -= transform_inverse(blk);
    worst_recon = std::max(worst_recon, rest.l2_norm() / x.l2_norm());
    for (int q = b.q_min; q <= b.q_max(); ++q) {
      const double m = b.masses.at(q);
      if (!(m > 1e-12 * f.l2_norm())) continue;
      const double ratio = lambda_pow(b.block(q), 1.0).l2_norm() / (std::ldexp(1.0, q) * m);
      bern_lo = std::min(bern_lo, ratio);
      bern_hi = std::max(bern_hi, ratio);
    }
  }
  res.checks.push_back(Check::at_most("reconstruction residual", worst_recon,
                                      opt.at("tolerance_reconstruction").get<double>()));
  res.checks.push_back(Check::at_least("Bernstein lower bracket", bern_lo, DyadicPartition::kInner * (1 - 1e-12)));
  res.checks.push_back(Check::at_most("Bernstein upper bracket", bern_hi, DyadicPartition::kOuter * (1 + 1e-12)));

  double worst_round = 0.0, worst_curl_grad = 0.0, worst_div_sol = 0.0;
  const double id_tol = opt.at("tolerance_identity").get<double>();
  for (int i = 0; i < helm_trials; ++i) {
    const VectorField u = random_vector_field(grid, grid.dim(), rng, full);
    const HelmholtzPair hp = helmholtz_decompose(u);
    worst_round = std::max(worst_round, (helmholtz_recompose(hp.h, hp.omega) - u).l2_norm() / u.l2_norm());
    const VectorField sol = helmholtz_recompose(RealField(grid), hp.omega);
    worst_div_sol = std::max(worst_div_sol, div(sol).max_abs() / std::max(u.l2_norm(), 1e-300));
    const RealField f = random_field(grid, rng, full);
    const VectorField gf = grad(f);
    const MatrixField cg = curl_mat(gf);
    double m = 0.0;
    for (int a = 0; a < grid.dim(); ++a)
      for (int b = 0; b < grid.dim(); ++b) m = std::max(m, cg(a, b).max_abs());
    worst_curl_grad = std::max(worst_curl_grad, m / std::max(relative_max_abs(gf, 1.0), 1e-300));
  }
  res.checks.push_back(Check::at_most("Helmholtz round trip", worst_round, opt.at("tolerance_helmholtz").get<double>()));
  res.checks.push_back(Check::at_most("curl of gradient", worst_curl_grad, id_tol));
  res.checks.push_back(Check::at_most("div of solenoidal part", worst_div_sol, id_tol));

  // Regression baselines: means over random draws.
  std::vector<double> deriv, product, interp;
  const HybridSpec prod_spec{0.5, 1.5, 0};
  for (int i = 0; i < base_trials; ++i) {
    const RealField f = random_field(grid, rng, full);
    const RealField g = random_field(grid, rng, full);
    const Spectrum fs = transform_forward(f);
    deriv.push_back(besov_norm(block_masses(grad_spectral(fs), p), -0.5) / besov_norm(block_masses(fs, p), 0.5));
    product.push_back(product_estimate_report(f, g, prod_spec).ratio);
    interp.push_back(interpolation_check(heat_trajectory(fs, p)).ratio);
  }
  const double deriv_lo = *std::min_element(deriv.begin(), deriv.end());
  res.checks.push_back(Check::within("derivation ratio bracket", deriv_lo, DyadicPartition::kInner * (1 - 1e-12),
                                     DyadicPartition::kOuter));
  res.checks.push_back(Check::within("derivation ratio upper", max_of(deriv), 0.0, DyadicPartition::kOuter * (1 + 1e-12)));
  res.checks.push_back(Check::within("product ratio finite", max_of(product), 1e-300, 1e300));
  res.checks.push_back(Check::within("interpolation ratio finite", max_of(interp), 1e-300, 1e300));

  res.report = {{"surrogate_2d", grid.dim() == 2},
                {"partition_defect", pou},
                {"partition_seconds", pou_seconds},
                {"reconstruction_residual", worst_recon},
                {"bernstein", {bern_lo, bern_hi}},
                {"helmholtz_round_trip", worst_round},
                {"curl_grad", worst_curl_grad},
                {"div_solenoidal", worst_div_sol},
                {"baselines",
                 {{"derivation_mean", mean(deriv)},
                  {"derivation_max", max_of(deriv)},
                  {"product_mean", mean(product)},
                  {"product_max", max_of(product)},
                  {"interpolation_mean", mean(interp)},
                  {"interpolation_max", max_of(interp)},
                  {"trials", base_trials}}}};
  return res;
}

}  // namespace nemalab::lab
