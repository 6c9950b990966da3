#pragma once

#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nemalab/littlewood_paley.hpp"
#include "nemalab/solver.hpp"

namespace nemalab {

// ---------------------------------------------------------------- traces

/// Scalar functional sampled in time, with its running trapezoid integral.
class NormTrace {
 public:
  explicit NormTrace(std::string name = {}) : name_(std::move(name)) {}

  /// Appends a sample; throws std::invalid_argument unless t increases strictly.
  void push(double t, double value);

  const std::string& name() const { return name_; }
  std::size_t size() const { return t_.size(); }
  bool empty() const { return t_.empty(); }
  const std::vector<double>& times() const { return t_; }
  const std::vector<double>& values() const { return v_; }
  /// ∫_0^{t_i} value dt by the trapezoid rule.
  const std::vector<double>& integrals() const { return integral_; }

  double sup() const;
  double integral() const { return integral_.empty() ? 0.0 : integral_.back(); }

 private:
  std::string name_;
  std::vector<double> t_, v_, integral_;
};

/// Columns t, then one column per trace (traces must share their time stamps).
std::string traces_csv(const std::vector<const NormTrace*>& traces, bool with_integrals = false);

/// V(t) = ∫_0^t ‖u‖_{B^{5/2}} ds from sampled B^{5/2} norms.
NormTrace v_of_t(const NormTrace& u_b52);

double q0_threshold(double nu);

// -------------------------------------------------------- block recording

/// Block masses of one field sampled along a trajectory.
struct BlockSeries {
  std::string name;
  std::vector<double> t;
  std::vector<BlockMasses> masses;

  void push(double time, BlockMasses m);
  std::size_t size() const { return t.size(); }
  /// Time series of block q.
  std::vector<double> block(int q) const;
};

/// Density a = ρ − 1, velocity u and director d − d̂ along a full run.
struct TrajectoryBlocks {
  BlockSeries density{"density", {}, {}};
  BlockSeries velocity{"velocity", {}, {}};
  BlockSeries director{"director", {}, {}};

  std::size_t size() const { return density.size(); }
};

/// Observer appending block masses of (a, u, d − d̂) to `out`.
Observer block_recorder(TrajectoryBlocks& out, const DyadicPartition& partition);
/// Observer appending block masses of each linearized field group to `out`.
/// `groups` lists the number of spectra forming each group, in order.
LinearObserver linear_block_recorder(std::vector<BlockSeries>& out, const DyadicPartition& partition,
                                     const std::vector<int>& groups);

// -------------------------------------------------------------- 𝔅^s_T

struct FrakBReport {
  double s = 1.5;
  double T = 0.0;
  double density_sup = 0.0;   // sup ‖a‖_{B̃^{s−1,s}}
  double velocity_sup = 0.0;  // sup ‖u‖_{B^{s−1}}
  double director_sup = 0.0;  // sup ‖d − d̂‖_{B̃^{s−1,s}}
  double density_l1 = 0.0;    // ∫ ‖a‖_{B̃^{s+1,s}}
  double velocity_l1 = 0.0;   // ∫ ‖u‖_{B^{s+1}}
  double director_l1 = 0.0;   // ∫ ‖d − d̂‖_{B̃^{s+1,s+2}}
  double total = 0.0;

  nlohmann::json to_json() const;
};

/// The six components over the whole recorded trajectory. Throws
/// std::invalid_argument when the trajectory is empty or two consecutive
/// samples are further apart than `max_gap`.
FrakBReport frak_b_norm(const TrajectoryBlocks& traj, double s = 1.5, int split = 0,
                        double max_gap = std::numeric_limits<double>::infinity());
/// The report restricted to [0, t_i] for every sample i.
std::vector<FrakBReport> frak_b_running(const TrajectoryBlocks& traj, double s = 1.5, int split = 0);
std::string frak_b_csv(const std::vector<FrakBReport>& running);

/// ‖a‖_{B̃^{1/2,3/2}} + ‖u‖_{B^{1/2}} + ‖d − d̂‖_{B̃^{1/2,3/2}} at sample i.
double initial_norm_sum(const TrajectoryBlocks& traj, std::size_t i = 0, int split = 0);

// ------------------------------------------------------ mixed functionals

enum class FqRegime { low, high };

struct MixedFq {
  double f2 = 0.0;
  /// ‖Δa‖² + ‖Δh‖² (low) or ‖ΛΔa‖² + ‖Δh‖² (high).
  double reference = 0.0;
  /// (ΛΔa | Δh).
  double cross = 0.0;
  double ratio = 0.0;
};

/// Low:  f² = ‖Δ_q a‖² + ‖Δ_q h‖² − (τν/4)(ΛΔ_q a | Δ_q h), 0 < τ ≤ 8/9.
/// High: f² = ‖ΛΔ_q a‖² + (3/ν²)‖Δ_q h‖² − (2/ν)(ΛΔ_q a | Δ_q h).
MixedFq mixed_fq(const Spectrum& a, const Spectrum& h, int q, double tau, double nu, FqRegime regime,
                 const DyadicPartition& partition);

// ------------------------------------------------------------ damping fit

struct RateFit {
  double rate = 0.0;
  double residual = 0.0;
  std::size_t points = 0;
  bool valid = false;
};

/// Least-squares fit of log m(t) = c − rate·t over samples with
/// m ∈ [lo, hi]·m(0). Oscillating traces are fitted on their local maxima.
RateFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& m, double lo = 1e-10,
                       double hi = 1e-2);

struct DampingEntry {
  int q = 0;
  bool above_q0 = false;
  RateFit rho;
  RateFit h;
  /// Slow decay rate of the mode matrix at |ξ| = 2^q.
  double reference_rate = 0.0;
  bool excluded = false;
};

struct DampingReport {
  double nu = 0.0;
  double q0 = 0.0;
  std::vector<DampingEntry> blocks;
  /// Σ_{q>q₀} 2^{5q/2} ∫‖Δ_q h‖ dt and the initial B^{1/2} mass of (ϱ, h).
  double smoothing_integral = 0.0;
  double initial_b12 = 0.0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Slow decay rate −max Re λ of the (ϱ, h) mode matrix at |ξ| = r.
double acoustic_slow_rate(double r, double nu);

/// Per-block fits from block series of ϱ and h; blocks whose initial
/// mass is below 1e-12 are excluded. Throws std::invalid_argument when a
/// series has fewer than three samples.
DampingReport damping_fit(const BlockSeries& rho, const BlockSeries& h, double nu, double lo = 1e-10,
                          double hi = 1e-2);

// --------------------------------------------------------- bound checks

struct BoundVerdict {
  bool pass = true;
  double n0 = 0.0;
  double gamma = 0.0;
  double worst_ratio = 0.0;
  double worst_time = 0.0;
  double worst_functional = 0.0;

  nlohmann::json to_json() const;
};

/// Pass when every running 𝔅 functional is ≤ Γ·N₀.
BoundVerdict theorem_bound_check(const std::vector<FrakBReport>& running, double n0, double gamma);

struct InterpolationCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// ‖f‖²_{L²_T(B̃^{3/2,5/2})} against ‖f‖_{L∞_T(B̃^{1/2,3/2})}‖f‖_{L¹_T(B̃^{5/2,7/2})}.
InterpolationCheck interpolation_check(const BlockSeries& f, int split = 0);

struct DeviationMonitors {
  double max_density_deviation = 0.0;
  double max_director_defect = 0.0;
  double min_density = 1.0;
};

DeviationMonitors deviation_monitors(const LCState& s);
DeviationMonitors deviation_monitors(const ReformSpectra& r);

/// Empirical constant of the linear (Ω, d) / (ϱ, h) estimates:
/// max_t LHS(t) / (e^{V(t)}·(N₀ + ∫_0^t e^{−V} forcing)).
struct LinearBoundReport {
  double c_emp = 0.0;
  double worst_time = 0.0;
  double v_final = 0.0;
  nlohmann::json to_json() const;
};

/// `sup_part`, `l1_part` and `forcing` are norm traces on common times.
LinearBoundReport linear_bound_constant(const NormTrace& sup_part, const NormTrace& l1_part, const NormTrace& v,
                                        const NormTrace& forcing);

}  // namespace nemalab
