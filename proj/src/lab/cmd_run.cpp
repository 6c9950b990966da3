#include "common.hpp"
#include "nemalab/svg_plot.hpp"

namespace nemalab::lab {

using nlohmann::json;

ExperimentResult cmd_run(const ExperimentConfig& cfg) {
  const auto& opt = cfg.section("run");
  const Grid& grid = cfg.grid;
  const DyadicPartition p(grid);

  const GeneratedData gen = generate_initial_data(grid, cfg.initial);
  const InitialNorms measured = measure_initial_norms(gen.state, p);

  TrajectoryBlocks traj;
  std::vector<double> mon_t, mon_dev, mon_defect, mon_min_rho;
  Observer monitor = [&](double t, const ReformSpectra& r) {
    const auto m = deviation_monitors(r);
    mon_t.push_back(t);
    mon_dev.push_back(m.max_density_deviation);
    mon_defect.push_back(m.max_director_defect);
    mon_min_rho.push_back(m.min_density);
  };
  const RunResult run = integrate(state_to_reform(gen.state), cfg.params, cfg.stepper, {block_recorder(traj, p), monitor});

  ExperimentResult res;
  res.experiment = "run";
  if (run.breakdown) res.breakdown = detail::to_json(*run.breakdown);

  const auto running = frak_b_running(traj, 1.5);
  const double n0 = initial_norm_sum(traj, 0);
  const auto verdict = theorem_bound_check(running, n0, cfg.gamma);
  const double max_dev = *std::max_element(mon_dev.begin(), mon_dev.end());
  const double max_defect = *std::max_element(mon_defect.begin(), mon_defect.end());
  const double min_rho = *std::min_element(mon_min_rho.begin(), mon_min_rho.end());

  std::vector<double> a_crit, u_crit, d_crit, u_b52;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    a_crit.push_back(hybrid_norm(traj.density.masses[i], {0.5, 1.5, 0}));
    u_crit.push_back(besov_norm(traj.velocity.masses[i], 0.5));
    d_crit.push_back(hybrid_norm(traj.director.masses[i], {0.5, 1.5, 0}));
    u_b52.push_back(besov_norm(traj.velocity.masses[i], 2.5));
  }
  NormTrace u_trace("u_B52");
  for (std::size_t i = 0; i < traj.size(); ++i) u_trace.push(traj.density.t[i], u_b52[i]);
  const NormTrace v = v_of_t(u_trace);

  const double target = cfg.initial.eta_density + cfg.initial.eta_velocity + cfg.initial.eta_director;
  res.checks.push_back(Check::at_most("initial norms match targets",
                                      std::abs(measured.sum() - target) / std::max(target, 1e-300), 1e-10,
                                      "relative difference of the initial norm sum"));
  if (opt.at("assert_bound").get<bool>()) {
    res.checks.push_back(Check::flag("run completed", run.completed));
    res.checks.push_back(Check::at_most("bounded functional", verdict.worst_ratio, cfg.gamma,
                                        "max over sampled T of the running 3/2 functional over N0"));
    res.checks.push_back(Check::at_most("max |rho - 1|", max_dev, opt.at("max_density_deviation").get<double>()));
    res.checks.push_back(
        Check::at_most("max ||d| - 1|", max_defect, opt.at("max_director_defect").get<double>()));
    res.checks.push_back(Check::at_most("sample spacing over dt", cfg.stepper.cadence / cfg.stepper.dt, 10.0 + 1e-9,
                                        "quadrature cadence for the time integrals"));
  }

  std::vector<double> totals;
  for (const auto& r : running) totals.push_back(r.total);
  res.report = {{"surrogate_2d", grid.dim() == 2},
                {"seed_used", gen.seed_used},
                {"director_epsilon", gen.director_epsilon},
                {"initial_norms", detail::to_json(measured)},
                {"n0", n0},
                {"bound", verdict.to_json()},
                {"frak_b_final", running.back().to_json()},
                {"monitors", {{"max_density_deviation", max_dev}, {"max_director_defect", max_defect}, {"min_density", min_rho}}},
                {"V_final", v.values().back()},
                {"t_final", run.t_final},
                {"steps", run.steps},
                {"cfl_violations", run.cfl_violations},
                {"min_cfl_limit", std::isfinite(run.min_cfl_limit) ? json(run.min_cfl_limit) : json(nullptr)}};

  res.files["traces/norms.csv"] = detail::csv_table({{"t", traj.density.t},
                                                     {"density_B12_32", a_crit},
                                                     {"velocity_B12", u_crit},
                                                     {"director_B12_32", d_crit},
                                                     {"velocity_B52", u_b52},
                                                     {"V", v.values()},
                                                     {"frak_b_running", totals}});
  res.files["traces/monitors.csv"] = detail::csv_table(
      {{"t", mon_t}, {"max_density_deviation", mon_dev}, {"max_director_defect", mon_defect}, {"min_density", mon_min_rho}});
  res.files["traces/frak_b.csv"] = frak_b_csv(running);
  std::vector<double> bound_line(traj.size(), cfg.gamma * n0);
  res.files["plots/frak_b.svg"] =
      svg_line_plot({"Running 3/2 functional", "t", "value", true},
                    {{"functional", traj.density.t, totals}, {"gamma * N0", traj.density.t, bound_line}});
  res.files["plots/norms.svg"] = svg_line_plot(
      {"Critical norms", "t", "norm", true},
      {{"density", traj.density.t, a_crit}, {"velocity", traj.density.t, u_crit}, {"director", traj.density.t, d_crit}});
  return res;
}

}  // namespace nemalab::lab
