#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nemalab/errors.hpp"
#include "nemalab/lab.hpp"

namespace fs = std::filesystem;
using namespace nemalab;

namespace {

constexpr int kExitConfig = 3;

struct Options {
  std::string config;
  std::string out;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  bool quiet = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON config file or an earlier manifest.json");
  sub->add_option("--out", o.out, "Output directory (default $NEMALAB_OUT/<verb> or out/<verb>)");
  sub->add_option("--threads", o.threads, "FFT threads")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "Random seed for initial data");
  sub->add_option("--set", o.sets, "Override a config key, e.g. --set stepper.dt=1e-3")->take_all();
  sub->add_flag("-q,--quiet", o.quiet, "Only print the verdict line");
}

fs::path output_dir(const Options& o, const std::string& verb) {
  if (!o.out.empty()) return o.out;
  const char* root = std::getenv("NEMALAB_OUT");
  return fs::path(root && *root ? root : "out") / verb;
}

int execute(const std::string& verb, const Options& o) {
  std::vector<std::string> sets;
  if (o.threads > 0) sets.push_back("threads=" + std::to_string(o.threads));
  if (o.seed) {
    sets.push_back("initial.seed=" + std::to_string(*o.seed));
    if (verb == "selftest") sets.push_back("selftest.seed=" + std::to_string(*o.seed));
  }
  sets.insert(sets.end(), o.sets.begin(), o.sets.end());

  lab::ExperimentConfig cfg;
  try {
    cfg = lab::resolve_config(verb, o.config.empty() ? std::nullopt : std::optional<fs::path>(o.config), sets);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  lab::ExperimentResult res;
  try {
    res = lab::run_experiment(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverBreakdown& e) {
    // Breakdowns outside the per-experiment handlers still get a manifest.
    res.experiment = verb;
    res.breakdown = nlohmann::json{{"kind", to_string(e.kind())}, {"message", e.what()}};
    if (std::isfinite(e.time())) (*res.breakdown)["time"] = e.time();
  }

  const fs::path out = output_dir(o, verb);
  try {
    lab::write_artifacts(res, cfg, out);
  } catch (const std::exception& e) {
    std::cerr << "cannot write artifacts to " << out << ": " << e.what() << "\n";
    return kExitConfig;
  }

  if (!o.quiet) {
    for (const auto& c : res.checks) {
      std::cout << (c.pass ? "  ok    " : "  FAIL  ") << c.name << " = " << c.value;
      if (std::isfinite(c.lo) && std::isfinite(c.hi) && c.lo != c.hi) std::cout << "  in [" << c.lo << ", " << c.hi << "]";
      else if (std::isfinite(c.hi) && !std::isfinite(c.lo)) std::cout << "  <= " << c.hi;
      else if (std::isfinite(c.lo) && !std::isfinite(c.hi)) std::cout << "  >= " << c.lo;
      std::cout << "\n";
    }
    if (res.breakdown) std::cout << "  solver breakdown: " << res.breakdown->dump() << "\n";
  }
  const int code = res.exit_code();
  std::cout << verb << ": " << (code == 0 ? "PASS" : code == 2 ? "BREAKDOWN" : "FAIL") << " (" << res.seconds
            << " s) -> " << out.string() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nemalab: numerical laboratory for compressible nematic liquid crystal flows"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nemalab 0.1.0");

  Options opts;
  const std::vector<std::pair<std::string, std::string>> verbs{
      {"run", "Full nonlinear run with the global bound check"},
      {"linearized", "Linearized heat, acoustic, transport, damping and bound experiments"},
      {"scaling", "Scaling invariance of the critical norms"},
      {"stability", "Lipschitz dependence on the initial data"},
      {"selftest", "Partition, reconstruction, Helmholtz and estimate baselines"},
  };
  for (const auto& [name, help] : verbs) add_common(app.add_subcommand(name, help), opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    return execute(verb, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
