#include "common.hpp"
#include "nemalab/helmholtz.hpp"
#include "nemalab/svg_plot.hpp"

namespace nemalab::lab {

using nlohmann::json;

namespace {

MatrixField random_vorticity(const Grid& grid, Rng& rng, const Band& band) {
  const VectorField u = random_vector_field(grid, grid.dim(), rng, band);
  const auto om = rotational_part(forward_all(u.components()));
  MatrixField out(grid, grid.dim(), grid.dim());
  for (int i = 0; i < grid.dim(); ++i)
    for (int j = 0; j < grid.dim(); ++j) out(i, j) = transform_inverse(om[i * grid.dim() + j]);
  return out;
}

// Ω blocks against e^{−μ|ξ|²t} applied to the initial spectra.
json heat_case(const ExperimentConfig& cfg, const json& opt, std::vector<Check>& checks) {
  const Grid& grid = cfg.grid;
  const DyadicPartition p(grid);
  Rng rng(opt.at("seed").get<std::uint64_t>());
  LinearizedProblem prob;
  prob.mu = cfg.params.mu;
  prob.omega0 = random_vorticity(grid, rng, dyadic_band(cfg.initial.q_lo, cfg.initial.q_hi));
  StepperConfig c;
  c.dt = opt.at("dt").get<double>();
  c.t_end = opt.at("t_end").get<double>();

  const int entries = grid.dim() * grid.dim();
  const auto& lat = grid.lattice();
  std::vector<Spectrum> initial;
  double worst = 0.0;
  solve_linearized_omega_d(prob, c, {[&](double t, const std::vector<Spectrum>& f) {
                             if (initial.empty()) initial.assign(f.begin(), f.begin() + entries);
                             std::vector<Spectrum> oracle = initial, err;
                             for (int e = 0; e < entries; ++e) {
                               for (std::size_t m = 0; m < oracle[e].size(); ++m) {
                                 oracle[e][m] *= std::exp(-prob.mu * lat.xi_norm[m] * lat.xi_norm[m] * t);
                               }
                               err.push_back(f[e] - oracle[e]);
                             }
                             const auto mo = block_masses(oracle, p), me = block_masses(err, p);
                             for (int q = mo.q_min; q <= mo.q_max(); ++q) {
                               if (mo.at(q) > 1e-200) worst = std::max(worst, me.at(q) / mo.at(q));
                             }
                           }});
  checks.push_back(Check::at_most("heat decay of Omega blocks", worst, opt.at("tolerance").get<double>(),
                                  "max relative block error against exp(-mu |xi|^2 t)"));
  return {{"max_relative_block_error", worst}};
}

json acoustic_case(const ExperimentConfig& cfg, const json& opt, std::vector<Check>& checks) {
  const Grid& grid = cfg.grid;
  const double nu = cfg.params.nu();
  const double t_end = opt.at("t_end").get<double>();
  double worst = 0.0;
  json modes = json::array();
  for (const auto& kj : opt.at("modes")) {
    const auto k = kj.get<std::array<int, 3>>();
    detail::mode_index(grid, k);
    std::array<double, 3> xi{};
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      xi[a] = k[a] * kTwoPi / grid.period(a);
      r2 += xi[a] * xi[a];
    }
    auto phase = [&](const std::array<double, 3>& x) { return xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2]; };
    LinearizedProblem prob;
    prob.nu = nu;
    prob.rho0 = RealField::sample(grid, [&](const auto& x) { return std::cos(phase(x)); });
    prob.h0 = RealField::sample(grid, [&](const auto& x) { return 0.5 * std::sin(phase(x)); });
    StepperConfig c;
    c.dt = opt.at("dt").get<double>();
    c.t_end = t_end;
    const auto run = solve_linearized_rho_h(prob, c);
    const Complex rho0 = detail::coefficient(transform_forward(*prob.rho0), k);
    const Complex h0 = detail::coefficient(transform_forward(*prob.h0), k);
    const auto [rho_ref, h_ref] = acoustic_mode_oracle(std::sqrt(r2), nu, rho0, h0, t_end);
    const double err = std::max(std::abs(detail::coefficient(run.final_fields[0], k) - rho_ref),
                                std::abs(detail::coefficient(run.final_fields[1], k) - h_ref));
    worst = std::max(worst, err);
    modes.push_back({{"k", k}, {"xi", std::sqrt(r2)}, {"error", err}});
  }
  checks.push_back(Check::at_most("single acoustic mode vs oracle", worst, opt.at("tolerance").get<double>(),
                                  "max coefficient error at t_end"));
  return {{"modes", modes}, {"max_error", worst}};
}

json transport_case(const ExperimentConfig& cfg, const json& opt, std::vector<Check>& checks) {
  const Grid& grid = cfg.grid;
  Rng rng(opt.at("seed").get<std::uint64_t>());
  const Band band = dyadic_band(cfg.initial.q_lo, cfg.initial.q_hi);
  const VectorField u = detail::random_velocity(grid, rng, band, opt.at("velocity_amplitude").get<double>());
  LinearizedProblem prob;
  prob.nu = cfg.params.nu();
  prob.velocity = [&](double) { return u; };
  prob.rho0 = random_field(grid, rng, band);
  prob.h0 = random_field(grid, rng, band);

  std::vector<std::vector<Spectrum>> sols;
  const auto dts = opt.at("dts").get<std::vector<double>>();
  if (dts.size() != 3) throw ConfigError("linearized.transport.dts must list three step sizes");
  for (double dt : dts) {
    StepperConfig c;
    c.dt = dt;
    c.t_end = opt.at("t_end").get<double>();
    c.scheme = Scheme::imex2;
    sols.push_back(solve_linearized_rho_h(prob, c).final_fields);
  }
  auto dist = [](const std::vector<Spectrum>& a, const std::vector<Spectrum>& b) {
    return std::hypot((a[0] - b[0]).l2_norm(), (a[1] - b[1]).l2_norm());
  };
  const double e01 = dist(sols[0], sols[1]), e12 = dist(sols[1], sols[2]);
  const double order = std::log(e01 / e12) / std::log(dts[0] / dts[1]);
  checks.push_back(Check::at_least("imex2 order with transport", order, opt.at("min_order").get<double>()));
  return {{"dts", dts}, {"successive_differences", {e01, e12}}, {"observed_order", order}};
}

// Lattice point closest to 1.25·2^q inside the plateau of block q.
std::optional<std::array<int, 3>> plateau_mode(const Grid& grid, int q) {
  const double unit = kTwoPi / grid.period(0);
  const double lo = 1.2 * std::ldexp(1.0, q), hi = 5.0 / 3.0 * std::ldexp(1.0, q), want = 1.25 * std::ldexp(1.0, q);
  const int kmax = grid.size(0) / 3;
  std::optional<std::array<int, 3>> best;
  double best_gap = INFINITY;
  for (int kx = 0; kx <= kmax; ++kx) {
    for (int ky = 0; ky <= kmax; ++ky) {
      const double r = unit * std::hypot(kx, ky);
      if (r < lo || r > hi) continue;
      if (std::abs(r - want) < best_gap) best_gap = std::abs(r - want), best = std::array<int, 3>{kx, ky, 0};
    }
  }
  return best;
}

json damping_case(const ExperimentConfig& cfg, const json& opt, std::vector<Check>& checks,
                  std::map<std::string, std::string>& files) {
  const Grid grid = Grid::cube(2, opt.at("n").get<int>(), cfg.grid.period(0));
  const DyadicPartition p(grid);
  const double nu = cfg.params.nu();
  const int q_lo = opt.at("q_lo").get<int>(), q_hi = opt.at("q_hi").get<int>();
  if (q_lo < p.q_min() || q_hi > p.q_max()) throw ConfigError("linearized.damping: block range not resolved by the grid");

  std::vector<std::array<int, 3>> modes;
  std::vector<double> mode_xi;
  for (int q = q_lo; q <= q_hi; ++q) {
    const auto k = plateau_mode(grid, q);
    if (!k) throw ConfigError("linearized.damping: no lattice mode in the plateau of block " + std::to_string(q));
    modes.push_back(*k);
    mode_xi.push_back(kTwoPi / grid.period(0) * std::hypot((*k)[0], (*k)[1]));
  }
  LinearizedProblem prob;
  prob.nu = nu;
  prob.rho0 = RealField::sample(grid, [&](const auto& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      s += std::cos(kTwoPi / grid.period(0) * (modes[i][0] * x[0] + modes[i][1] * x[1]));
    }
    return s;
  });
  prob.h0 = RealField(grid);
  StepperConfig c;
  c.dt = opt.at("dt").get<double>();
  c.t_end = opt.at("t_end").get<double>();
  std::vector<BlockSeries> series;
  solve_linearized_rho_h(prob, c, {linear_block_recorder(series, p, {1, 1})});
  const DampingReport rep = damping_fit(series[0], series[1], nu);

  std::vector<double> qs_low, log_rates_low, q_all, rho_rates, oracle_rates, h_rates;
  json per_mode = json::array();
  double worst_high = 0.0;
  bool high_ok = true;
  const double factor = opt.at("plateau_factor").get<double>();
  for (const auto& b : rep.blocks) {
    if (b.q < q_lo || b.q > q_hi || b.excluded) continue;
    const double xi = mode_xi[b.q - q_lo];
    const double oracle = acoustic_slow_rate(xi, nu);
    q_all.push_back(b.q);
    rho_rates.push_back(b.rho.rate);
    h_rates.push_back(b.h.rate);
    oracle_rates.push_back(oracle);
    per_mode.push_back({{"q", b.q},
                        {"k", modes[b.q - q_lo]},
                        {"xi", xi},
                        {"rho_rate", b.rho.rate},
                        {"h_rate", b.h.rate},
                        {"oracle_rate", oracle},
                        {"relative_fit_error", std::abs(b.rho.rate - oracle) / oracle}});
    if (b.q <= opt.at("low_q_max").get<int>()) {
      qs_low.push_back(b.q);
      log_rates_low.push_back(std::log2(b.rho.rate));
    }
    if (b.q >= opt.at("high_q_min").get<int>()) {
      const double ratio = b.rho.rate * nu;
      worst_high = std::max(worst_high, std::max(ratio, 1.0 / ratio));
      high_ok = high_ok && b.rho.valid;
    }
  }
  const double slope = detail::ls_slope(qs_low, log_rates_low);
  const double target = opt.at("slope").get<double>(), tol = opt.at("slope_tolerance").get<double>();
  checks.push_back(Check::within("low-frequency rate slope", slope, target - tol, target + tol,
                                 "least-squares slope of log2(rate) against q"));
  checks.push_back(Check::at_most("high-frequency rate vs 1/nu", high_ok ? worst_high : INFINITY, factor,
                                  "worst max(rate nu, 1/(rate nu))"));
  checks.push_back(Check::flag("smoothing integral finite", std::isfinite(rep.smoothing_integral)));

  std::vector<detail::Column> cols{{"t", series[0].t}};
  for (int q = q_lo; q <= q_hi; ++q) cols.push_back({"rho_q" + std::to_string(q), series[0].block(q)});
  for (int q = q_lo; q <= q_hi; ++q) cols.push_back({"h_q" + std::to_string(q), series[1].block(q)});
  files["traces/damping_blocks.csv"] = detail::csv_table(cols);
  files["traces/damping_rates.csv"] = rep.to_csv();
  files["plots/damping_rates.svg"] =
      svg_line_plot({"Fitted decay rates", "q", "rate", true},
                    {{"rho fit", q_all, rho_rates, true}, {"h fit", q_all, h_rates, true}, {"mode oracle", q_all, oracle_rates}});
  json j = rep.to_json();
  j["modes"] = per_mode;
  j["low_slope"] = slope;
  j["high_worst_factor"] = worst_high;
  j["surrogate_2d"] = true;
  return j;
}

struct BoundTraces {
  NormTrace sup{"sup"}, l1{"l1"}, v{"V"}, forcing{"forcing"};
};

json bound_case(const ExperimentConfig& cfg, const json& opt, std::vector<Check>& checks) {
  const Grid& grid = cfg.grid;
  const DyadicPartition p(grid);
  Rng rng(opt.at("seed").get<std::uint64_t>());
  const Band band = dyadic_band(cfg.initial.q_lo, cfg.initial.q_hi);
  const VectorField u = detail::random_velocity(grid, rng, band, opt.at("velocity_amplitude").get<double>());
  const double u_b52 = besov_norm(u, p, 2.5);

  StepperConfig c;
  c.dt = opt.at("dt").get<double>();
  c.t_end = opt.at("t_end").get<double>();
  c.cadence = opt.at("cadence").get<double>();
  const HybridSpec crit{0.5, 1.5, 0};

  LinearizedProblem prob;
  prob.mu = cfg.params.mu;
  prob.nu = cfg.params.nu();
  prob.velocity = [&](double) { return u; };
  prob.omega0 = random_vorticity(grid, rng, band);
  prob.d0 = random_vector_field(grid, 3, rng, band);
  prob.rho0 = random_field(grid, rng, band);
  prob.h0 = random_field(grid, rng, band);
  const int entries = grid.dim() * grid.dim();

  BoundTraces od, rh;
  auto push_common = [&](BoundTraces& b, double t) {
    b.v.push(t, u_b52 * t);
    b.forcing.push(t, 0.0);
  };
  solve_linearized_omega_d(prob, c, {[&](double t, const std::vector<Spectrum>& f) {
                             const auto mo = block_masses(std::vector<Spectrum>(f.begin(), f.begin() + entries), p);
                             const auto md = block_masses(std::vector<Spectrum>(f.begin() + entries, f.end()), p);
                             od.sup.push(t, hybrid_norm(md, crit) + besov_norm(mo, 0.5));
                             od.l1.push(t, hybrid_norm(md, {2.5, 3.5, 0}) + besov_norm(mo, 2.5));
                             push_common(od, t);
                           }});
  solve_linearized_rho_h(prob, c, {[&](double t, const std::vector<Spectrum>& f) {
                           const auto mr = block_masses(f[0], p), mh = block_masses(f[1], p);
                           rh.sup.push(t, hybrid_norm(mr, crit) + besov_norm(mh, 0.5));
                           rh.l1.push(t, hybrid_norm(mr, {2.5, 1.5, 0}) + besov_norm(mh, 2.5));
                           push_common(rh, t);
                         }});
  const auto c_od = linear_bound_constant(od.sup, od.l1, od.v, od.forcing);
  const auto c_rh = linear_bound_constant(rh.sup, rh.l1, rh.v, rh.forcing);
  checks.push_back(Check::within("omega-d bound constant finite", c_od.c_emp, 0.0, 1e300));
  checks.push_back(Check::within("rho-h bound constant finite", c_rh.c_emp, 0.0, 1e300));
  return {{"u_B52", u_b52}, {"omega_d", c_od.to_json()}, {"rho_h", c_rh.to_json()}};
}

}  // namespace

ExperimentResult cmd_linearized(const ExperimentConfig& cfg) {
  const auto& sec = cfg.section("linearized");
  ExperimentResult res;
  res.experiment = "linearized";
  res.report["surrogate_2d"] = cfg.grid.dim() == 2;
  res.report["nu"] = cfg.params.nu();
  res.report["q0"] = q0_threshold(cfg.params.nu());
  try {
    res.report["heat"] = heat_case(cfg, sec.at("heat"), res.checks);
    res.report["acoustic"] = acoustic_case(cfg, sec.at("acoustic"), res.checks);
    res.report["transport"] = transport_case(cfg, sec.at("transport"), res.checks);
    res.report["damping"] = damping_case(cfg, sec.at("damping"), res.checks, res.files);
    res.report["bound"] = bound_case(cfg, sec.at("bound"), res.checks);
  } catch (const SolverBreakdown& b) {
    res.breakdown = detail::to_json(b);
  }
  return res;
}

}  // namespace nemalab::lab
