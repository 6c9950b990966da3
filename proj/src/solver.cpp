#include "nemalab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nemalab/spectral.hpp"

namespace nemalab {

std::string to_string(Scheme scheme) { return scheme == Scheme::imex1 ? "imex1" : "imex2"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "imex1") return Scheme::imex1;
  if (name == "imex2") return Scheme::imex2;
  throw ConfigError("unknown scheme '" + name + "' (expected imex1 or imex2)");
}

void StepperConfig::validate() const {
  std::ostringstream err;
  if (!(dt > 0.0) || !std::isfinite(dt)) err << "dt must be positive; ";
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) err << "t_end must be nonnegative; ";
  if (!(cadence >= 0.0) || !std::isfinite(cadence)) err << "cadence must be nonnegative; ";
  if (!err.str().empty()) throw ConfigError("StepperConfig: " + err.str());
}

double cfl_limit(const Grid& grid, const std::vector<RealField>& u) {
  double umax = 0.0;
  for (std::size_t x = 0; x < grid.point_count(); ++x) {
    double s = 0.0;
    for (const auto& c : u) s += c[x] * c[x];
    umax = std::max(umax, s);
  }
  umax = std::sqrt(umax);
  if (umax == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * grid.min_spacing() / umax;
}

double cfl_limit(const LCState& s) { return cfl_limit(s.grid(), s.u.components()); }

// ------------------------------------------------------------- propagator

std::array<double, 4> acoustic_propagator(double r, double nu, double t) {
  // exp(tM) = C·I + S·(M − σI), σ = tr M / 2, β² = σ² − det M.
  const double sigma = -0.5 * nu * r * r;
  const double beta2 = sigma * sigma - r * r;
  double c = 0.0, s = 0.0;
  const double z = beta2 * t * t;
  if (std::abs(z) < 1e-6) {
    const double e = std::exp(sigma * t);
    c = e * (1.0 + z / 2.0 + z * z / 24.0 + z * z * z / 720.0);
    s = e * t * (1.0 + z / 6.0 + z * z / 120.0 + z * z * z / 5040.0);
  } else if (beta2 > 0.0) {
    // Real roots; the slow one is formed as det/fast to avoid cancellation.
    const double beta = std::sqrt(beta2);
    const double fast = sigma - beta;
    const double slow = r * r / fast;
    const double ef = std::exp(fast * t);
    const double es = std::exp(slow * t);
    c = 0.5 * (es + ef);
    s = (es - ef) / (slow - fast);
  } else {
    const double omega = std::sqrt(-beta2);
    const double e = std::exp(sigma * t);
    c = e * std::cos(omega * t);
    s = e * std::sin(omega * t) / omega;
  }
  const double half = 0.5 * nu * r * r;
  return {c + s * half, -s * r, s * r, c - s * half};
}

LinearPropagator::LinearPropagator(const Grid& grid, const LCParams& p, double dt)
    : LinearPropagator(grid, p.mu, p.nu(), p.theta, dt) {}

LinearPropagator::LinearPropagator(const Grid& grid, double mu, double nu, double theta, double dt) : dt_(dt) {
  const auto& xi = grid.lattice().xi_norm;
  const std::size_t n = xi.size();
  e11_.resize(n);
  e12_.resize(n);
  e21_.resize(n);
  e22_.resize(n);
  heat_mu_.resize(n);
  heat_theta_.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double r = xi[m];
    const auto e = acoustic_propagator(r, nu, dt);
    e11_[m] = e[0];
    e12_[m] = e[1];
    e21_[m] = e[2];
    e22_[m] = e[3];
    heat_mu_[m] = std::exp(-mu * r * r * dt);
    heat_theta_[m] = std::exp(-theta * r * r * dt);
  }
}

void LinearPropagator::apply_acoustic(Spectrum& a, Spectrum& h) const {
  auto ac = a.coeffs();
  auto hc = h.coeffs();
  for (std::size_t m = 0; m < ac.size(); ++m) {
    const Complex x = ac[m], y = hc[m];
    ac[m] = e11_[m] * x + e12_[m] * y;
    hc[m] = e21_[m] * x + e22_[m] * y;
  }
}

void LinearPropagator::apply_heat(Spectrum& f, int kind) const {
  const auto& factor = kind == 0 ? heat_mu_ : heat_theta_;
  auto c = f.coeffs();
  for (std::size_t m = 0; m < c.size(); ++m) c[m] *= factor[m];
}

void LinearPropagator::apply(ReformSpectra& r) const {
  apply_acoustic(r.a, r.h);
  for (auto& o : r.omega) apply_heat(o, 0);
  for (auto& d : r.d) apply_heat(d, 1);
}

// --------------------------------------------------------------- director

VectorField renormalize_director(const VectorField& d) {
  const double tol = 4.0 * std::numeric_limits<double>::epsilon();
  VectorField out = d;
  const std::size_t n = d.grid().point_count();
  for (std::size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (int k = 0; k < d.size(); ++k) s += d[k][x] * d[k][x];
    const double norm = std::sqrt(s);
    if (!(norm >= 0.5)) {
      std::ostringstream os;
      os << "director length " << norm << " below 1/2";
      throw SolverBreakdown(SolverBreakdown::Kind::director_degenerate, os.str());
    }
    if (std::abs(norm - 1.0) <= tol) continue;
    for (int k = 0; k < d.size(); ++k) out[k][x] = d[k][x] / norm;
  }
  return out;
}

double director_defect(const VectorField& d) {
  double worst = 0.0;
  for (std::size_t x = 0; x < d.grid().point_count(); ++x) {
    double s = 0.0;
    for (int k = 0; k < d.size(); ++k) s += d[k][x] * d[k][x];
    worst = std::max(worst, std::abs(std::sqrt(s) - 1.0));
  }
  return worst;
}

// ----------------------------------------------------------- full stepper

namespace {

bool all_finite(const ReformSpectra& r) {
  if (!r.a.all_finite() || !r.h.all_finite()) return false;
  for (const auto& s : r.omega)
    if (!s.all_finite()) return false;
  for (const auto& s : r.d)
    if (!s.all_finite()) return false;
  return true;
}

}  // namespace

FullStepper::FullStepper(const Grid& grid, const LCParams& p, const StepperConfig& c)
    : grid_(grid), params_(p), config_(c), main_(grid, p, c.dt) {
  p.validate();
  c.validate();
}

const LinearPropagator& FullStepper::propagator(double dt) {
  if (dt == main_.dt()) return main_;
  if (!tail_ || tail_->dt() != dt) tail_.emplace(grid_, params_, dt);
  return *tail_;
}

void FullStepper::renormalize(ReformSpectra& r) const {
  const VectorField d(inverse_all(r.d, FieldRole::vector_component));
  r.d = forward_all(renormalize_director(d).components());
}

void FullStepper::step(ReformSpectra& r, double dt) {
  if (dt <= 0.0) dt = config_.dt;
  const LinearPropagator& e = propagator(dt);
  try {
    const ReformSpectra k1 = explicit_terms(r, params_, config_.dealias);
    if (config_.scheme == Scheme::imex1) {
      r.axpy(dt, k1);
      e.apply(r);
    } else {
      ReformSpectra stage = r;
      stage.axpy(dt, k1);
      e.apply(stage);
      const ReformSpectra k2 = explicit_terms(stage, params_, config_.dealias);
      r.axpy(0.5 * dt, k1);
      e.apply(r);
      r.axpy(0.5 * dt, k2);
    }
    if (!all_finite(r)) throw SolverBreakdown(SolverBreakdown::Kind::non_finite, "non-finite state after step");
    if (config_.renormalize_d) renormalize(r);
  } catch (const std::invalid_argument& err) {
    // Transforms refuse non-finite samples.
    throw SolverBreakdown(SolverBreakdown::Kind::non_finite, err.what());
  }
}

ReformState step_full(const ReformState& r, const LCParams& p, const StepperConfig& c) {
  FullStepper stepper(r.grid(), p, c);
  ReformSpectra s = to_spectra(r);
  stepper.step(s);
  return from_spectra(s);
}

namespace {

// Drives a fixed-step loop over [0, t_end] and decides when to sample.
class Clock {
 public:
  explicit Clock(const StepperConfig& c) : dt_(c.dt), t_end_(c.t_end), cadence_(c.cadence), next_(c.cadence) {}

  bool done() const { return t_end_ - t_ <= 1e-9 * dt_; }
  /// Length of the next step; the last step absorbs a short remainder.
  double next_dt() const {
    const double rest = t_end_ - t_;
    return rest - dt_ <= 1e-9 * dt_ ? rest : dt_;
  }
  void advance(double h) {
    ++steps_;
    t_ = h == dt_ ? static_cast<double>(steps_) * dt_ : t_ + h;
    if (done()) t_ = t_end_;
  }
  /// True when the state at the current time should be observed.
  bool sample_due() {
    if (done()) return true;
    if (cadence_ <= 0.0) return true;
    if (t_ + 1e-9 * dt_ < next_) return false;
    while (next_ <= t_ + 1e-9 * dt_) next_ += cadence_;
    return true;
  }
  double t() const { return t_; }
  std::size_t steps() const { return steps_; }

 private:
  double dt_, t_end_, cadence_, next_;
  double t_ = 0.0;
  std::size_t steps_ = 0;
};

}  // namespace

RunResult integrate_spectral(ReformSpectra r, const LCParams& p, const StepperConfig& c,
                             const std::vector<Observer>& observers) {
  FullStepper stepper(r.grid(), p, c);
  Clock clock(c);
  RunResult out{from_spectra(r), 0.0, 0, {}, true, std::nullopt, 0, std::numeric_limits<double>::infinity()};
  auto notify = [&](double t) {
    out.sample_times.push_back(t);
    for (const auto& obs : observers) obs(t, r);
  };
  notify(0.0);
  while (!clock.done()) {
    const double h = clock.next_dt();
    const auto u = inverse_all(velocity_spectra(r), FieldRole::vector_component);
    const double limit = cfl_limit(r.grid(), u);
    out.min_cfl_limit = std::min(out.min_cfl_limit, limit);
    if (h > limit) ++out.cfl_violations;
    ReformSpectra last_good = r;
    try {
      stepper.step(r, h);
    } catch (const SolverBreakdown& e) {
      out.completed = false;
      out.breakdown = e.at_time(clock.t());
      out.final_state = from_spectra(last_good);
      out.t_final = clock.t();
      out.steps = clock.steps();
      return out;
    }
    clock.advance(h);
    if (clock.sample_due()) notify(clock.t());
  }
  out.final_state = from_spectra(r);
  out.t_final = clock.t();
  out.steps = clock.steps();
  return out;
}

RunResult integrate(const ReformState& r0, const LCParams& p, const StepperConfig& c,
                    const std::vector<Observer>& observers) {
  return integrate_spectral(to_spectra(r0), p, c, observers);
}

// ------------------------------------------------------ linearized systems

namespace {

using Fields = std::vector<Spectrum>;

void axpy(Fields& y, double alpha, const Fields& x) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto yc = y[i].coeffs();
    auto xc = x[i].coeffs();
    for (std::size_t m = 0; m < yc.size(); ++m) yc[m] += alpha * xc[m];
  }
}

// −u·∇f for every field, plus forcing.
Fields transport(const Fields& y, const std::vector<RealField>& u, bool dealiased) {
  Fields out;
  out.reserve(y.size());
  const int dim = y.front().grid().dim();
  for (const auto& f : y) {
    if (u.empty()) {
      out.emplace_back(f.grid());
      continue;
    }
    RealField adv(f.grid());
    for (int j = 0; j < dim; ++j) {
      const RealField g = transform_inverse(derivative(f, j));
      for (std::size_t x = 0; x < adv.size(); ++x) adv[x] -= u[j][x] * g[x];
    }
    Spectrum s = transform_forward(adv);
    if (dealiased) dealias_in_place(s);
    out.push_back(std::move(s));
  }
  return out;
}

template <class Explicit, class Propagate>
LinearRun run_linear(Fields y, const StepperConfig& c, Explicit&& rhs, Propagate&& propagate, const VelocityFn& velocity,
                     const std::vector<LinearObserver>& observers) {
  c.validate();
  Clock clock(c);
  LinearRun out;
  auto notify = [&](double t) {
    out.sample_times.push_back(t);
    for (const auto& obs : observers) obs(t, y);
  };
  notify(0.0);
  while (!clock.done()) {
    const double h = clock.next_dt();
    const double t = clock.t();
    if (velocity) {
      const VectorField u = velocity(t);
      if (h > cfl_limit(u.grid(), u.components())) ++out.cfl_violations;
    }
    const Fields k1 = rhs(t, y);
    if (c.scheme == Scheme::imex1) {
      axpy(y, h, k1);
      propagate(y, h);
    } else {
      Fields stage = y;
      axpy(stage, h, k1);
      propagate(stage, h);
      const Fields k2 = rhs(t + h, stage);
      axpy(y, 0.5 * h, k1);
      propagate(y, h);
      axpy(y, 0.5 * h, k2);
    }
    for (const auto& f : y)
      if (!f.all_finite()) throw SolverBreakdown(SolverBreakdown::Kind::non_finite, "non-finite linearized state", t);
    clock.advance(h);
    if (clock.sample_due()) notify(clock.t());
  }
  out.final_fields = std::move(y);
  out.t_final = clock.t();
  out.steps = clock.steps();
  return out;
}

// Caches propagators for the regular step and the final remainder.
class PropagatorCache {
 public:
  PropagatorCache(const Grid& grid, double mu, double nu) : grid_(grid), mu_(mu), nu_(nu) {}
  const LinearPropagator& get(double dt) {
    for (const auto& p : cache_)
      if (p.dt() == dt) return p;
    if (cache_.size() >= 2) cache_.erase(cache_.begin());
    cache_.emplace_back(grid_, mu_, nu_, 1.0, dt);
    return cache_.back();
  }

 private:
  Grid grid_;
  double mu_, nu_;
  std::vector<LinearPropagator> cache_;
};

}  // namespace

LinearRun solve_linearized_omega_d(const LinearizedProblem& prob, const StepperConfig& c,
                                   const std::vector<LinearObserver>& observers) {
  if (!prob.omega0 && !prob.d0) throw ConfigError("solve_linearized_omega_d: initial Ω or d required");
  if (!(prob.mu > 0.0)) throw ConfigError("solve_linearized_omega_d: mu must be positive");
  const Grid grid = prob.omega0 ? prob.omega0->grid() : prob.d0->grid();
  Fields y;
  int n_omega = 0;
  if (prob.omega0) {
    for (int i = 0; i < prob.omega0->rows(); ++i)
      for (int j = 0; j < prob.omega0->cols(); ++j) y.push_back(transform_forward((*prob.omega0)(i, j)));
    n_omega = static_cast<int>(y.size());
  }
  if (prob.d0)
    for (const auto& comp : prob.d0->components()) y.push_back(transform_forward(comp));

  PropagatorCache cache(grid, prob.mu, 1.0);
  auto propagate = [&](Fields& f, double h) {
    const LinearPropagator& e = cache.get(h);
    for (int i = 0; i < static_cast<int>(f.size()); ++i) e.apply_heat(f[i], i < n_omega ? 0 : 1);
  };
  auto rhs = [&](double t, const Fields& f) {
    std::vector<RealField> u;
    if (prob.velocity) u = prob.velocity(t).components();
    Fields out = transport(f, u, c.dealias);
    if (prob.forcing_L && n_omega > 0) {
      const MatrixField L = prob.forcing_L(t);
      for (int i = 0; i < L.rows(); ++i)
        for (int j = 0; j < L.cols(); ++j) out[i * L.cols() + j] += transform_forward(L(i, j));
    }
    if (prob.forcing_M && prob.d0) {
      const VectorField M = prob.forcing_M(t);
      for (int k = 0; k < M.size(); ++k) out[n_omega + k] += transform_forward(M[k]);
    }
    return out;
  };
  return run_linear(std::move(y), c, rhs, propagate, prob.velocity, observers);
}

LinearRun solve_linearized_rho_h(const LinearizedProblem& prob, const StepperConfig& c,
                                 const std::vector<LinearObserver>& observers) {
  if (!prob.rho0 || !prob.h0) throw ConfigError("solve_linearized_rho_h: initial ϱ and h required");
  if (!(prob.nu > 0.0)) throw ConfigError("solve_linearized_rho_h: nu must be positive");
  require_same_grid(prob.rho0->grid(), prob.h0->grid(), "solve_linearized_rho_h");
  const Grid grid = prob.rho0->grid();
  Fields y{transform_forward(*prob.rho0), transform_forward(*prob.h0)};
  PropagatorCache cache(grid, 1.0, prob.nu);
  auto propagate = [&](Fields& f, double h) { cache.get(h).apply_acoustic(f[0], f[1]); };
  auto rhs = [&](double t, const Fields& f) {
    std::vector<RealField> u;
    if (prob.velocity) u = prob.velocity(t).components();
    Fields out = transport(f, u, c.dealias);
    if (prob.forcing_J) out[0] += transform_forward(prob.forcing_J(t));
    if (prob.forcing_K) out[1] += transform_forward(prob.forcing_K(t));
    return out;
  };
  return run_linear(std::move(y), c, rhs, propagate, prob.velocity, observers);
}

// ------------------------------------------------------------ mode oracle

AcousticModeSolution acoustic_mode_oracle(double xi, double nu, Complex rho0, Complex h0) {
  if (!(xi > 0.0) || !(nu > 0.0)) throw std::invalid_argument("acoustic_mode_oracle: |xi| and nu must be positive");
  AcousticModeSolution s;
  s.xi = xi;
  s.nu = nu;
  s.rho0 = rho0;
  s.h0 = h0;
  // Characteristic polynomial λ² + ν|ξ|²λ + |ξ|² = 0.
  const double b = nu * xi * xi;
  const double disc = b * b - 4.0 * xi * xi;
  s.degenerate = std::abs(disc) <= 1e-14 * (b * b + 4.0 * xi * xi);
  const Complex root = s.degenerate ? Complex{} : std::sqrt(Complex(disc, 0.0));
  s.lambda_plus = 0.5 * (-b + root);
  s.lambda_minus = 0.5 * (-b - root);
  return s;
}

std::pair<Complex, Complex> AcousticModeSolution::at(double t) const {
  const double r = xi;
  if (degenerate) {
    // x(t) = e^{λt}(I + t(M − λI))x0 with λ = −ν|ξ|²/2.
    const Complex lam = lambda_plus;
    const Complex e = std::exp(lam * t);
    const Complex n_rho = -lam * rho0 - r * h0;
    const Complex n_h = r * rho0 + (-nu * r * r - lam) * h0;
    return {e * (rho0 + t * n_rho), e * (h0 + t * n_h)};
  }
  // Eigenvectors v± = (|ξ|, −λ±); x0 = c₊v₊ + c₋v₋.
  const Complex sum = rho0 / r;
  const Complex cp = (-h0 - lambda_minus * sum) / (lambda_plus - lambda_minus);
  const Complex cm = sum - cp;
  const Complex ep = cp * std::exp(lambda_plus * t);
  const Complex em = cm * std::exp(lambda_minus * t);
  return {r * (ep + em), -(lambda_plus * ep + lambda_minus * em)};
}

std::pair<Complex, Complex> acoustic_mode_oracle(double xi, double nu, Complex rho0, Complex h0, double t) {
  return acoustic_mode_oracle(xi, nu, rho0, h0).at(t);
}

}  // namespace nemalab
