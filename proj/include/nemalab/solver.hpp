#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nemalab/lc_system.hpp"

namespace nemalab {

enum class Scheme { imex1, imex2 };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct StepperConfig {
  double dt = 1e-3;
  /// imex1: integrating-factor Euler. imex2: integrating-factor Heun (default).
  Scheme scheme = Scheme::imex2;
  bool renormalize_d = true;
  bool dealias = true;
  double t_end = 1.0;
  /// Observer spacing in time; 0 samples every step.
  double cadence = 0.0;

  /// Throws ConfigError on nonpositive dt, negative t_end or cadence.
  void validate() const;
};

/// Largest stable advective step 0.5·Δx/max|u| (infinite for u ≡ 0).
double cfl_limit(const Grid& grid, const std::vector<RealField>& u);
double cfl_limit(const LCState& s);

/// Exact per-mode propagator of the stiff linear block over one step:
/// (a, h) through exp(t [[0, −|ξ|], [|ξ|, −ν|ξ|²]]), Ω through e^{−μ|ξ|²t},
/// d through e^{−θ|ξ|²t}.
class LinearPropagator {
 public:
  LinearPropagator(const Grid& grid, const LCParams& p, double dt);
  /// Explicit coefficients: Ω diffusion mu, acoustic viscosity nu, director diffusion theta.
  LinearPropagator(const Grid& grid, double mu, double nu, double theta, double dt);

  double dt() const { return dt_; }
  void apply(ReformSpectra& r) const;
  /// Only the (a, h) block.
  void apply_acoustic(Spectrum& a, Spectrum& h) const;
  /// Heat factor e^{−c|ξ|²dt} with c = μ (kind 0) or θ (kind 1).
  void apply_heat(Spectrum& f, int kind) const;

 private:
  double dt_;
  std::vector<double> e11_, e12_, e21_, e22_;
  std::vector<double> heat_mu_, heat_theta_;
};

/// Entries (E11, E12, E21, E22) of the (a, h) propagator at |ξ| = r.
std::array<double, 4> acoustic_propagator(double r, double nu, double t);

/// d/|d| pointwise. Points already within 4 ulp of unit length are left
/// untouched, which makes the map idempotent bit-for-bit.
/// Throws SolverBreakdown(director_degenerate) if |d| < 1/2 somewhere.
VectorField renormalize_director(const VectorField& d);
/// Largest ||d| − 1| over the grid.
double director_defect(const VectorField& d);

/// Full reformulated system in spectral variables.
class FullStepper {
 public:
  FullStepper(const Grid& grid, const LCParams& p, const StepperConfig& c);

  /// Advances r by dt (default: config dt). Throws SolverBreakdown.
  void step(ReformSpectra& r, double dt = 0.0);
  const LCParams& params() const { return params_; }
  const StepperConfig& config() const { return config_; }

 private:
  const LinearPropagator& propagator(double dt);
  void renormalize(ReformSpectra& r) const;

  Grid grid_;
  LCParams params_;
  StepperConfig config_;
  LinearPropagator main_;
  std::optional<LinearPropagator> tail_;
};

/// One step of the full system.
ReformState step_full(const ReformState& r, const LCParams& p, const StepperConfig& c);

using Observer = std::function<void(double t, const ReformSpectra& r)>;

struct RunResult {
  /// Final state, or the last good state when the run broke down.
  ReformState final_state;
  double t_final = 0.0;
  std::size_t steps = 0;
  std::vector<double> sample_times;
  bool completed = true;
  std::optional<SolverBreakdown> breakdown;
  /// Steps whose dt exceeded the advective CFL limit.
  std::size_t cfl_violations = 0;
  double min_cfl_limit = 0.0;
};

/// Repeated steps from r0 over [0, t_end]. Observers are called at t = 0,
/// every `cadence` and at t_end. Breakdowns end the run early and are
/// reported in the result rather than thrown.
RunResult integrate(const ReformState& r0, const LCParams& p, const StepperConfig& c,
                    const std::vector<Observer>& observers = {});
RunResult integrate_spectral(ReformSpectra r, const LCParams& p, const StepperConfig& c,
                             const std::vector<Observer>& observers = {});

// ------------------------------------------------------ linearized systems

using VelocityFn = std::function<VectorField(double t)>;

/// Prescribed-velocity linear problems:
///   Ω, d:  ∂Ω + u·∇Ω − μΔΩ = ℒ,   ∂d + u·∇d − Δd = ℳ
///   ϱ, h:  ∂ϱ + u·∇ϱ + Λh = 𝒥,    ∂h + u·∇h − νΔh − Λϱ = 𝒦
/// Empty callbacks mean zero velocity or zero forcing.
struct LinearizedProblem {
  double mu = 1.0;
  double nu = 3.0;
  VelocityFn velocity;

  std::optional<MatrixField> omega0;
  std::optional<VectorField> d0;
  std::function<MatrixField(double)> forcing_L;
  std::function<VectorField(double)> forcing_M;

  std::optional<RealField> rho0;
  std::optional<RealField> h0;
  std::function<RealField(double)> forcing_J;
  std::function<RealField(double)> forcing_K;
};

/// Fields are passed as spectra: (Ω entries row-major, then d components)
/// or (ϱ, h).
using LinearObserver = std::function<void(double t, const std::vector<Spectrum>& fields)>;

struct LinearRun {
  std::vector<Spectrum> final_fields;
  double t_final = 0.0;
  std::size_t steps = 0;
  std::vector<double> sample_times;
  std::size_t cfl_violations = 0;
};

LinearRun solve_linearized_omega_d(const LinearizedProblem& prob, const StepperConfig& c,
                                   const std::vector<LinearObserver>& observers = {});
LinearRun solve_linearized_rho_h(const LinearizedProblem& prob, const StepperConfig& c,
                                 const std::vector<LinearObserver>& observers = {});

// ------------------------------------------------------------ mode oracle

/// Closed-form solution of ∂ϱ = −|ξ|h, ∂h = −ν|ξ|²h + |ξ|ϱ by eigen-
/// decomposition, with the Jordan form at the double root |ξ| = 2/ν.
struct AcousticModeSolution {
  double xi = 0.0;
  double nu = 0.0;
  Complex rho0;
  Complex h0;
  Complex lambda_plus;
  Complex lambda_minus;
  bool degenerate = false;

  std::pair<Complex, Complex> at(double t) const;
};

AcousticModeSolution acoustic_mode_oracle(double xi, double nu, Complex rho0, Complex h0);
std::pair<Complex, Complex> acoustic_mode_oracle(double xi, double nu, Complex rho0, Complex h0, double t);

}  // namespace nemalab
