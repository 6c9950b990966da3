#include "common.hpp"
#include "nemalab/svg_plot.hpp"

namespace nemalab::lab {

using nlohmann::json;

namespace {

constexpr HybridSpec kHalf{-0.5, 0.5, 0};

struct Perturbation {
  RealField a;
  VectorField u;
  VectorField d;
};

LCState perturbed(const LCState& base, const Perturbation& w, double eps, const DyadicPartition& p) {
  if (eps == 0.0) return base;
  const double share = eps / 3.0;
  LCState s = base;
  RealField da = w.a;
  da *= share / hybrid_norm(block_masses(transform_forward(w.a), p), kHalf);
  s.rho += da;
  VectorField du = w.u;
  du *= share / besov_norm(block_masses(forward_all(w.u.components()), p), -0.5);
  s.u += du;
  s.d = perturb_director(base.d, w.d, share, kHalf, p);
  return s;
}

struct Distance {
  std::vector<double> t, total;
  std::optional<SolverBreakdown> breakdown;
};

Distance distance_trace(const std::vector<ReformSpectra>& base, const LCState& s, const ExperimentConfig& cfg,
                        const DyadicPartition& p) {
  TrajectoryBlocks diff;
  auto record = block_recorder(diff, p);
  std::size_t i = 0;
  Observer obs = [&](double t, const ReformSpectra& r) {
    ReformSpectra d = r;
    d.axpy(-1.0, base.at(i++));
    record(t, d);
  };
  const RunResult run = integrate(state_to_reform(s), cfg.params, cfg.stepper, {obs});
  Distance out;
  out.breakdown = run.breakdown;
  for (const auto& rep : frak_b_running(diff, 0.5)) {
    out.t.push_back(rep.T);
    out.total.push_back(rep.total);
  }
  return out;
}

}  // namespace

ExperimentResult cmd_stability(const ExperimentConfig& cfg) {
  const auto& opt = cfg.section("stability");
  const double eps = opt.at("epsilon").get<double>();
  const Grid& grid = cfg.grid;
  const DyadicPartition p(grid);

  ExperimentConfig run_cfg = cfg;
  run_cfg.stepper.t_end = opt.at("t_end").get<double>();

  const GeneratedData gen = generate_initial_data(grid, cfg.initial);
  Rng rng(opt.at("perturbation_seed").get<std::uint64_t>());
  const Band band = dyadic_band(cfg.initial.q_lo, cfg.initial.q_hi);
  Perturbation w{random_field(grid, rng, band), random_vector_field(grid, grid.dim(), rng, band),
                 random_vector_field(grid, 3, rng, band)};

  ExperimentResult res;
  res.experiment = "stability";

  std::vector<ReformSpectra> base;
  const RunResult base_run = integrate(state_to_reform(gen.state), run_cfg.params, run_cfg.stepper,
                                       {[&](double, const ReformSpectra& r) { base.push_back(r); }});
  if (base_run.breakdown) {
    res.breakdown = detail::to_json(*base_run.breakdown);
    return res;
  }

  const Distance full = distance_trace(base, perturbed(gen.state, w, eps, p), run_cfg, p);
  const Distance half = distance_trace(base, perturbed(gen.state, w, 0.5 * eps, p), run_cfg, p);
  const Distance zero = distance_trace(base, perturbed(gen.state, w, 0.0, p), run_cfg, p);
  for (const auto* d : {&full, &half, &zero}) {
    if (d->breakdown) {
      res.breakdown = detail::to_json(*d->breakdown);
      return res;
    }
  }

  const double max_full = *std::max_element(full.total.begin(), full.total.end());
  const double max_zero = *std::max_element(zero.total.begin(), zero.total.end());
  const double ratio = full.total.back() / half.total.back();
  const double tol = opt.at("halving_tolerance").get<double>();
  res.checks.push_back(Check::at_most("distance over epsilon", max_full / eps, opt.at("amplification_bound").get<double>(),
                                      "max over [0, T] of the 1/2 distance functional, divided by epsilon"));
  res.checks.push_back(Check::within("halving ratio", ratio, 2.0 * (1.0 - tol), 2.0 * (1.0 + tol),
                                     "distance(eps) / distance(eps/2) at T"));
  res.checks.push_back(Check::at_most("zero perturbation distance", max_zero, 0.0));

  std::vector<double> amp;
  for (double v : full.total) amp.push_back(v / eps);
  res.report = {{"surrogate_2d", grid.dim() == 2},
                {"epsilon", eps},
                {"initial_distance", full.total.front()},
                {"final_distance", full.total.back()},
                {"final_distance_half", half.total.back()},
                {"halving_ratio", ratio},
                {"max_amplification", max_full / eps}};
  res.files["traces/distance.csv"] = detail::csv_table(
      {{"t", full.t}, {"distance_eps", full.total}, {"distance_half_eps", half.total}, {"amplification", amp}});
  res.files["plots/distance.svg"] = svg_line_plot(
      {"Distance functional", "t", "distance", true}, {{"eps", full.t, full.total}, {"eps/2", half.t, half.total}});
  return res;
}

}  // namespace nemalab::lab
