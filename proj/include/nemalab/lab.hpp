#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nemalab/diagnostics.hpp"

namespace nemalab::lab {

inline const std::vector<std::string> kExperiments{"run", "linearized", "scaling", "stability", "selftest"};

// ------------------------------------------------------------- configuration

/// Full key set with defaults. `experiment` selects per-experiment defaults.
nlohmann::json default_config(const std::string& experiment = "run");

/// Recursively overlays `patch` on `base`. Unknown keys and type changes
/// throw ConfigError naming the dotted key.
void merge_strict(nlohmann::json& base, const nlohmann::json& patch, const std::string& where = {});

/// Applies "a.b.c=value". The value is parsed as JSON when possible and
/// taken as a string otherwise.
void apply_assignment(nlohmann::json& cfg, const std::string& assignment);

struct InitialDataSpec {
  std::uint64_t seed = 1;
  int q_lo = -2;
  int q_hi = 1;
  double eta_density = 0.0;
  double eta_velocity = 0.0;
  double eta_director = 0.0;
  std::array<double, 3> d_hat{0.0, 0.0, 1.0};

  void validate() const;
};

struct ExperimentConfig {
  nlohmann::json raw;
  std::string experiment;
  Grid grid = Grid::cube(2, 128, 8.0 * kTwoPi);
  LCParams params;
  StepperConfig stepper;
  InitialDataSpec initial;
  double gamma = 100.0;
  int threads = 1;

  /// Experiment-specific options, e.g. section("stability").
  const nlohmann::json& section(const std::string& name) const;

  /// `resolved` must already hold every key (see default_config).
  static ExperimentConfig from_json(const nlohmann::json& resolved);
};

/// Defaults, then the config file, then each --set assignment.
ExperimentConfig resolve_config(const std::string& experiment, const std::optional<std::filesystem::path>& file,
                                const std::vector<std::string>& overrides);

// ----------------------------------------------------------- initial data

struct InitialNorms {
  double density = 0.0;   // ‖ρ − 1‖_{B̃^{1/2,3/2}}
  double velocity = 0.0;  // ‖u‖_{B^{1/2}}
  double director = 0.0;  // ‖d − d̂‖_{B̃^{1/2,3/2}}
  double sum() const { return density + velocity + director; }
};

InitialNorms measure_initial_norms(const LCState& s, const DyadicPartition& p);

struct GeneratedData {
  LCState state;
  std::uint64_t seed_used = 0;
  double director_epsilon = 0.0;
};

/// Random band-limited mean-free data rescaled onto the target norms.
/// d₀ = normalize(d̂ + εv) with ε found by root bracketing. A draw that
/// cannot reach its target is replaced by the next seed.
GeneratedData generate_initial_data(const Grid& grid, const InitialDataSpec& spec);

/// Unit director normalize(d + s·w) with s chosen so that
/// ‖result − d‖ in the given hybrid norm equals `target`.
VectorField perturb_director(const VectorField& d, const VectorField& w, double target, const HybridSpec& norm,
                             const DyadicPartition& p, double* s_out = nullptr);

// ------------------------------------------------------------- experiments

struct Check {
  std::string name;
  double value = 0.0;
  double lo = -INFINITY;
  double hi = INFINITY;
  bool pass = false;
  std::string note;

  static Check at_most(std::string name, double value, double hi, std::string note = {});
  static Check at_least(std::string name, double value, double lo, std::string note = {});
  static Check within(std::string name, double value, double lo, double hi, std::string note = {});
  static Check flag(std::string name, bool ok, std::string note = {});

  nlohmann::json to_json() const;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<Check> checks;
  nlohmann::json report = nlohmann::json::object();
  /// Relative path (traces/…, reports/…, plots/…) to file contents.
  std::map<std::string, std::string> files;
  std::optional<nlohmann::json> breakdown;
  double seconds = 0.0;

  bool pass() const;
  /// 0 pass, 1 failed check, 2 solver breakdown.
  int exit_code() const;
  const Check* find(const std::string& name) const;
};

ExperimentResult cmd_run(const ExperimentConfig& cfg);
ExperimentResult cmd_linearized(const ExperimentConfig& cfg);
ExperimentResult cmd_scaling(const ExperimentConfig& cfg);
ExperimentResult cmd_stability(const ExperimentConfig& cfg);
ExperimentResult cmd_selftest(const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// manifest.json plus every file of the result, each written atomically.
void write_artifacts(const ExperimentResult& result, const ExperimentConfig& cfg, const std::filesystem::path& out);

}  // namespace nemalab::lab
