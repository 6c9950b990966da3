#include "common.hpp"

namespace nemalab::lab {

using nlohmann::json;

namespace {

struct Scaled {
  double u_before, u_after, a_before, a_after, d_before, d_after;
};

Scaled scale_norms(const RealField& a, const VectorField& u, const VectorField& dd, int k) {
  const int dim = a.grid().dim();
  // Critical indices on ℝ^dim: s = dim/2 − m for an order-m transform.
  const double s_u = 0.5 * dim - 1.0, s_a = 0.5 * dim;
  const DyadicPartition p(a.grid());
  const RealField a_k = scaling_transform(a, k, 0);
  const VectorField u_k = scaling_transform(u, k, 1);
  const VectorField d_k = scaling_transform(dd, k, 0);
  const DyadicPartition pk(a_k.grid());
  return {besov_norm(u, p, s_u),   besov_norm(u_k, pk, s_u), besov_norm(a, p, s_a),
          besov_norm(a_k, pk, s_a), besov_norm(dd, p, s_a),  besov_norm(d_k, pk, s_a)};
}

}  // namespace

ExperimentResult cmd_scaling(const ExperimentConfig& cfg) {
  const auto& opt = cfg.section("scaling");
  const int k = opt.at("k").get<int>();
  const double tol = opt.at("tolerance").get<double>();
  const Grid& grid = cfg.grid;

  const GeneratedData gen = generate_initial_data(grid, cfg.initial);
  RealField a = gen.state.rho;
  a -= RealField::constant(grid, 1.0);
  VectorField dd = gen.state.d;
  for (int c = 0; c < 3; ++c) dd[c] -= RealField::constant(grid, cfg.initial.d_hat[c]);

  ExperimentResult res;
  res.experiment = "scaling";
  json cases = json::array();
  for (int kk : {0, k}) {
    const Scaled s = scale_norms(a, gen.state.u, dd, kk);
    auto rel = [](double before, double after) { return std::abs(after - before) / std::max(before, 1e-300); };
    const std::string tag = " (k=" + std::to_string(kk) + ")";
    if (kk == 0) {
      res.checks.push_back(Check::at_most("identity velocity" + tag, std::abs(s.u_after - s.u_before), 0.0));
      res.checks.push_back(Check::at_most("identity density" + tag, std::abs(s.a_after - s.a_before), 0.0));
    } else {
      res.checks.push_back(Check::at_most("velocity critical norm" + tag, rel(s.u_before, s.u_after), tol));
      res.checks.push_back(Check::at_most("density critical norm" + tag, rel(s.a_before, s.a_after), tol));
      res.checks.push_back(Check::at_most("director critical norm" + tag, rel(s.d_before, s.d_after), tol));
    }
    cases.push_back({{"k", kk},
                     {"velocity", {s.u_before, s.u_after}},
                     {"density", {s.a_before, s.a_after}},
                     {"director", {s.d_before, s.d_after}}});
  }
  res.report = {{"surrogate_2d", grid.dim() == 2},
                {"velocity_index", 0.5 * grid.dim() - 1.0},
                {"density_index", 0.5 * grid.dim()},
                {"cases", cases}};

  const DyadicPartition p(grid);
  const RealField a_k = scaling_transform(a, k, 0);
  const DyadicPartition pk(a_k.grid());
  const auto before = block_masses(transform_forward(a), p), after = block_masses(transform_forward(a_k), pk);
  std::vector<double> qs, mb, ma;
  for (int q = before.q_min; q <= before.q_max(); ++q) {
    qs.push_back(q);
    mb.push_back(before.at(q));
    ma.push_back(after.at(q + k));
  }
  res.files["traces/scaling_blocks.csv"] =
      detail::csv_table({{"q", qs}, {"density_block", mb}, {"scaled_block_q_plus_k", ma}});
  return res;
}

}  // namespace nemalab::lab
