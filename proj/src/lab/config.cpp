#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nemalab/errors.hpp"
#include "nemalab/lab.hpp"

namespace nemalab::lab {

using nlohmann::json;

json default_config(const std::string& experiment) {
  bool known = false;
  for (const auto& e : kExperiments) known = known || e == experiment;
  if (!known) throw ConfigError("unknown experiment '" + experiment + "'");

  const double eta = 1e-3;
  json cfg = {
      {"experiment", experiment},
      {"grid", {{"dim", 2}, {"n", 128}, {"period_pi", 16.0}}},
      {"params",
       {{"mu", 1.0}, {"lambda", 1.0}, {"xi_c", 1.0}, {"theta", 1.0}, {"pressure", "quadratic"}, {"density_floor", 0.1}}},
      {"stepper",
       {{"dt", 5e-3},
        {"scheme", "imex2"},
        {"renormalize_d", true},
        {"dealias", true},
        {"t_end", 20.0},
        {"cadence", 0.05}}},
      {"initial",
       {{"seed", 1},
        {"q_lo", -2},
        {"q_hi", 1},
        {"eta_density", eta / 3},
        {"eta_velocity", eta / 3},
        {"eta_director", eta / 3},
        {"d_hat", {0.0, 0.0, 1.0}}}},
      {"gamma", 100.0},
      {"threads", 1},
      {"run", {{"assert_bound", true}, {"max_density_deviation", 0.25}, {"max_director_defect", 1e-8}}},
      {"linearized",
       {{"heat", {{"t_end", 1.0}, {"dt", 0.01}, {"seed", 7}, {"tolerance", 1e-8}}},
        {"acoustic",
         {{"modes", json::array({{1, 0, 0}, {3, 4, 0}, {16, 0, 0}})},
          {"t_end", 1.0},
          {"dt", 0.01},
          {"tolerance", 1e-10}}},
        {"transport",
         {{"velocity_amplitude", 0.3}, {"dts", {4e-3, 2e-3, 1e-3}}, {"t_end", 1.0}, {"seed", 17}, {"min_order", 1.8}}},
        {"damping",
         {{"n", 512},
          {"q_lo", -3},
          {"q_hi", 4},
          {"t_end", 600.0},
          {"dt", 0.5},
          {"low_q_max", -1},
          {"high_q_min", 3},
          {"slope", 2.0},
          {"slope_tolerance", 0.3},
          {"plateau_factor", 2.0}}},
        {"bound",
         {{"velocity_amplitude", 0.05}, {"t_end", 2.0}, {"dt", 0.01}, {"cadence", 0.05}, {"seed", 29}}}}},
      {"scaling", {{"k", 1}, {"tolerance", 1e-10}}},
      {"stability",
       {{"epsilon", 1e-6},
        {"t_end", 1.0},
        {"perturbation_seed", 1001},
        {"amplification_bound", 100.0},
        {"halving_tolerance", 0.2}}},
      {"selftest",
       {{"trials", 100},
        {"helmholtz_trials", 20},
        {"baseline_trials", 50},
        {"seed", 1},
        {"corrupt_psi", false},
        {"tolerance_partition", 1e-12},
        {"tolerance_reconstruction", 1e-10},
        {"tolerance_helmholtz", 1e-10},
        {"tolerance_identity", 1e-12},
        {"partition_seconds", 1.0}}},
  };
  if (experiment == "stability") cfg["stepper"]["t_end"] = 1.0;
  return cfg;
}

namespace {

bool compatible(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

}  // namespace

void merge_strict(json& base, const json& patch, const std::string& where) {
  if (!patch.is_object()) throw ConfigError("config" + (where.empty() ? "" : " key '" + where + "'") + " must be an object");
  for (const auto& [key, value] : patch.items()) {
    const std::string path = join(where, key);
    if (!base.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    json& slot = base[key];
    if (!compatible(slot, value)) {
      throw ConfigError("config key '" + path + "' expects " + std::string(slot.type_name()) + ", got " +
                        value.type_name());
    }
    if (slot.is_object()) {
      merge_strict(slot, value, path);
    } else {
      slot = value;
    }
  }
}

void apply_assignment(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json patch = value;
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
  merge_strict(cfg, patch);
}

void InitialDataSpec::validate() const {
  if (q_lo > q_hi) throw ConfigError("initial: q_lo must not exceed q_hi");
  if (!(eta_density >= 0 && eta_velocity >= 0 && eta_director >= 0)) {
    throw ConfigError("initial: target norms must be nonnegative");
  }
  Equilibrium{d_hat}.validate();
}

const json& ExperimentConfig::section(const std::string& name) const {
  if (!raw.contains(name)) throw ConfigError("config has no section '" + name + "'");
  return raw.at(name);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  try {
    ExperimentConfig c;
    c.raw = j;
    c.experiment = j.at("experiment").get<std::string>();
    const auto& g = j.at("grid");
    const int dim = g.at("dim").get<int>();
    const int n = g.at("n").get<int>();
    const double period = g.at("period_pi").get<double>() * kTwoPi / 2.0;
    if (dim != 2 && dim != 3) throw ConfigError("grid.dim must be 2 or 3");
    if (!(period > 0)) throw ConfigError("grid.period_pi must be positive");
    try {
      c.grid = Grid::cube(dim, n, period);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("grid: ") + e.what());
    }

    const auto& p = j.at("params");
    c.params.mu = p.at("mu").get<double>();
    c.params.lambda = p.at("lambda").get<double>();
    c.params.xi_c = p.at("xi_c").get<double>();
    c.params.theta = p.at("theta").get<double>();
    c.params.pressure = pressure_law_from_string(p.at("pressure").get<std::string>());
    c.params.density_floor = p.at("density_floor").get<double>();
    c.params.validate();

    const auto& s = j.at("stepper");
    c.stepper.dt = s.at("dt").get<double>();
    c.stepper.scheme = scheme_from_string(s.at("scheme").get<std::string>());
    c.stepper.renormalize_d = s.at("renormalize_d").get<bool>();
    c.stepper.dealias = s.at("dealias").get<bool>();
    c.stepper.t_end = s.at("t_end").get<double>();
    c.stepper.cadence = s.at("cadence").get<double>();
    c.stepper.validate();

    const auto& i = j.at("initial");
    c.initial.seed = i.at("seed").get<std::uint64_t>();
    c.initial.q_lo = i.at("q_lo").get<int>();
    c.initial.q_hi = i.at("q_hi").get<int>();
    c.initial.eta_density = i.at("eta_density").get<double>();
    c.initial.eta_velocity = i.at("eta_velocity").get<double>();
    c.initial.eta_director = i.at("eta_director").get<double>();
    c.initial.d_hat = i.at("d_hat").get<std::array<double, 3>>();
    c.initial.validate();

    c.gamma = j.at("gamma").get<double>();
    if (!(c.gamma > 0)) throw ConfigError("gamma must be positive");
    c.threads = j.at("threads").get<int>();
    if (c.threads < 1) throw ConfigError("threads must be at least 1");
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig resolve_config(const std::string& experiment, const std::optional<std::filesystem::path>& file,
                                const std::vector<std::string>& overrides) {
  json cfg = default_config(experiment);
  if (const char* env = std::getenv("NEMALAB_THREADS"); env && *env) apply_assignment(cfg, std::string("threads=") + env);
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("cannot read config file " + file->string());
    json patch = json::parse(in, nullptr, false, true);
    if (patch.is_discarded()) throw ConfigError("config file " + file->string() + " is not valid JSON");
    // A manifest from an earlier run replays its resolved config.
    if (patch.is_object() && patch.value("format", "") == "nemalab-manifest") {
      if (!patch.contains("config")) throw ConfigError("manifest " + file->string() + " has no config member");
      patch = patch["config"];
    }
    if (patch.contains("experiment") && patch["experiment"] != experiment) {
      throw ConfigError("config file is for experiment '" + patch["experiment"].dump() + "', not '" + experiment + "'");
    }
    merge_strict(cfg, patch);
  }
  for (const auto& o : overrides) apply_assignment(cfg, o);
  if (cfg["experiment"] != experiment) throw ConfigError("the experiment key cannot be overridden");
  return ExperimentConfig::from_json(cfg);
}

}  // namespace nemalab::lab
