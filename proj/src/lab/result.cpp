#include <filesystem>
#include <iomanip>

#include "common.hpp"
#include "nemalab/field_io.hpp"

namespace nemalab::lab {

using nlohmann::json;

namespace {

Check make(std::string name, double value, double lo, double hi, std::string note) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.lo = lo;
  c.hi = hi;
  c.note = std::move(note);
  c.pass = !std::isnan(value) && value >= lo && value <= hi;
  return c;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Check Check::at_most(std::string name, double value, double hi, std::string note) {
  return make(std::move(name), value, -INFINITY, hi, std::move(note));
}
Check Check::at_least(std::string name, double value, double lo, std::string note) {
  return make(std::move(name), value, lo, INFINITY, std::move(note));
}
Check Check::within(std::string name, double value, double lo, double hi, std::string note) {
  return make(std::move(name), value, lo, hi, std::move(note));
}
Check Check::flag(std::string name, bool ok, std::string note) {
  return make(std::move(name), ok ? 1.0 : 0.0, 1.0, 1.0, std::move(note));
}

json Check::to_json() const {
  json j{{"name", name}, {"value", finite_or_null(value)}, {"lo", finite_or_null(lo)}, {"hi", finite_or_null(hi)},
         {"pass", pass}};
  if (!note.empty()) j["note"] = note;
  return j;
}

bool ExperimentResult::pass() const {
  if (breakdown) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

int ExperimentResult::exit_code() const {
  if (breakdown) return 2;
  return pass() ? 0 : 1;
}

const Check* ExperimentResult::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  set_fft_threads(cfg.threads);
  detail::Stopwatch clock;
  ExperimentResult r;
  if (cfg.experiment == "run") r = cmd_run(cfg);
  else if (cfg.experiment == "linearized") r = cmd_linearized(cfg);
  else if (cfg.experiment == "scaling") r = cmd_scaling(cfg);
  else if (cfg.experiment == "stability") r = cmd_stability(cfg);
  else if (cfg.experiment == "selftest") r = cmd_selftest(cfg);
  else throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  r.seconds = clock.seconds();
  return r;
}

void write_artifacts(const ExperimentResult& result, const ExperimentConfig& cfg, const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  json checks = json::array();
  for (const auto& c : result.checks) checks.push_back(c.to_json());

  json report = result.report;
  report["checks"] = checks;
  report["pass"] = result.pass();
  if (result.breakdown) report["breakdown"] = *result.breakdown;

  std::map<std::string, std::string> files = result.files;
  files["reports/" + result.experiment + ".json"] = report.dump(2) + "\n";

  json listing = json::array();
  for (const auto& [rel, contents] : files) {
    const fs::path path = out / rel;
    fs::create_directories(path.parent_path());
    write_file_atomic(path, contents);
    listing.push_back({{"path", rel}, {"bytes", contents.size()}});
  }

  const json manifest{{"format", "nemalab-manifest"},
                      {"version", 1},
                      {"experiment", result.experiment},
                      {"surrogate_2d", cfg.grid.dim() == 2},
                      {"seed", cfg.initial.seed},
                      {"threads", cfg.threads},
                      {"exit_code", result.exit_code()},
                      {"pass", result.pass()},
                      {"seconds", result.seconds},
                      {"checks", checks},
                      {"files", listing},
                      {"config", cfg.raw}};
  fs::create_directories(out);
  write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
}

namespace detail {

std::string csv_table(const std::vector<Column>& columns) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c].name;
  os << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().values.size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c].values.at(i);
    os << '\n';
  }
  return os.str();
}

json to_json(const InitialNorms& n) {
  return {{"density", n.density}, {"velocity", n.velocity}, {"director", n.director}, {"sum", n.sum()}};
}

json to_json(const SolverBreakdown& b) {
  return {{"kind", to_string(b.kind())}, {"time", finite_or_null(b.time())}, {"message", b.what()}};
}

std::pair<std::size_t, bool> mode_index(const Grid& grid, std::array<int, 3> k) {
  const int last = grid.dim() - 1;
  bool conj = false;
  if (k[last] < 0) {
    for (auto& c : k) c = -c;
    conj = true;
  }
  for (int a = 0; a < 3; ++a) {
    const int n = a < grid.dim() ? grid.size(a) : 1;
    if (a >= grid.dim() ? k[a] != 0 : 2 * std::abs(k[a]) >= n) {
      throw ConfigError("wavevector is not representable below the Nyquist frequency of the grid");
    }
  }
  const auto& lat = grid.lattice();
  for (std::size_t m = 0; m < lat.wavenumber.size(); ++m) {
    if (lat.wavenumber[m] == k) return {m, conj};
  }
  throw ConfigError("wavevector not found on the grid");
}

Complex coefficient(const Spectrum& s, const std::array<int, 3>& k) {
  const auto [m, conj] = mode_index(s.grid(), k);
  return conj ? std::conj(s[m]) : s[m];
}

VectorField random_velocity(const Grid& grid, Rng& rng, const Band& band, double rms) {
  VectorField u = random_vector_field(grid, grid.dim(), rng, band);
  u *= rms * std::sqrt(grid.volume());
  return u;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - sx / n) * (x[i] - sx / n);
    sxy += (x[i] - sx / n) * (y[i] - sy / n);
  }
  return sxx > 0 ? sxy / sxx : NAN;
}

}  // namespace detail
}  // namespace nemalab::lab
