#include "nemalab/lc_system.hpp"

#include <cmath>
#include <sstream>

#include "nemalab/helmholtz.hpp"
#include "nemalab/spectral.hpp"

namespace nemalab {

std::string to_string(SolverBreakdown::Kind kind) {
  switch (kind) {
    case SolverBreakdown::Kind::density_floor: return "density_floor";
    case SolverBreakdown::Kind::non_finite: return "non_finite";
    case SolverBreakdown::Kind::director_degenerate: return "director_degenerate";
  }
  return "unknown";
}

std::string to_string(PressureLaw law) {
  switch (law) {
    case PressureLaw::quadratic: return "quadratic";
  }
  return "unknown";
}

PressureLaw pressure_law_from_string(const std::string& name) {
  if (name == "quadratic") return PressureLaw::quadratic;
  throw ConfigError("unknown pressure law '" + name + "' (only 'quadratic' is implemented)");
}

void LCParams::validate() const {
  std::ostringstream err;
  if (!(mu > 0.0)) err << "mu must be positive; ";
  if (!(2.0 * mu + 3.0 * lambda >= 0.0)) err << "2 mu + 3 lambda must be nonnegative; ";
  if (!(xi_c > 0.0)) err << "xi_c must be positive; ";
  if (!(theta > 0.0)) err << "theta must be positive; ";
  if (!(density_floor > 0.0 && density_floor < 1.0)) err << "density_floor must lie in (0, 1); ";
  if (!err.str().empty()) throw ConfigError("LCParams: " + err.str());
}

void Equilibrium::validate() const {
  const double n = std::hypot(d_hat[0], d_hat[1], d_hat[2]);
  if (!(std::abs(n - 1.0) <= 1e-12)) throw ConfigError("Equilibrium: d_hat must be a unit vector");
}

LCState Equilibrium::state(const Grid& grid) const {
  std::vector<RealField> d;
  for (double c : d_hat) d.push_back(RealField::constant(grid, c, FieldRole::vector_component));
  return {RealField::constant(grid, 1.0), VectorField(grid, grid.dim()), VectorField(std::move(d))};
}

ReformState Equilibrium::reform(const Grid& grid) const {
  LCState s = state(grid);
  return {RealField(grid), RealField(grid), MatrixField(grid, grid.dim(), grid.dim()), std::move(s.d)};
}

ReformSpectra& ReformSpectra::axpy(double alpha, const ReformSpectra& x) {
  auto update = [alpha](Spectrum& y, const Spectrum& xs) {
    auto yc = y.coeffs();
    auto xc = xs.coeffs();
    for (std::size_t m = 0; m < yc.size(); ++m) yc[m] += alpha * xc[m];
  };
  update(a, x.a);
  update(h, x.h);
  for (std::size_t i = 0; i < omega.size(); ++i) update(omega[i], x.omega[i]);
  for (std::size_t i = 0; i < d.size(); ++i) update(d[i], x.d[i]);
  return *this;
}

// ------------------------------------------------------------------ pressure

namespace {

void require_positive_density(const RealField& rho, const char* what) {
  for (double v : rho.values())
    if (!(v > 0.0))
      throw SolverBreakdown(SolverBreakdown::Kind::density_floor, std::string(what) + ": density must be positive");
}

void require_density_floor(const RealField& a, double floor) {
  for (double v : a.values()) {
    if (!std::isfinite(v)) throw SolverBreakdown(SolverBreakdown::Kind::non_finite, "non-finite density");
    if (1.0 + v < floor) {
      std::ostringstream os;
      os << "density " << 1.0 + v << " below floor " << floor;
      throw SolverBreakdown(SolverBreakdown::Kind::density_floor, os.str());
    }
  }
}

Spectrum project(const RealField& f, bool dealiased) {
  Spectrum s = transform_forward(f);
  if (dealiased) dealias_in_place(s);
  return s;
}

RealField filtered(const RealField& f) { return transform_inverse(project(f, true), f.role()); }

// Physical fields needed by the nonlinear terms.
struct Kinematics {
  int dim = 0;
  std::vector<RealField> u;       // u_i
  std::vector<RealField> grad_u;  // [i*dim + j] = ∂_j u_i
  std::vector<RealField> Au;      // (𝒜u)_i
  std::vector<RealField> grad_d;  // [k*dim + j] = ∂_j d_k
};

Kinematics kinematics(const std::vector<Spectrum>& u, const std::vector<Spectrum>& d, const LCParams& p) {
  Kinematics k;
  k.dim = u.front().grid().dim();
  const int dim = k.dim;
  const Spectrum div_u = div_spectral(u);
  for (int i = 0; i < dim; ++i) {
    k.u.push_back(transform_inverse(u[i]));
    for (int j = 0; j < dim; ++j) k.grad_u.push_back(transform_inverse(derivative(u[i], j)));
    Spectrum au = laplacian(u[i]);
    au *= p.mu;
    Spectrum gd = derivative(div_u, i);
    gd *= (p.lambda + p.mu);
    k.Au.push_back(transform_inverse(au + gd));
  }
  for (const auto& dk : d)
    for (int j = 0; j < dim; ++j) k.grad_d.push_back(transform_inverse(derivative(dk, j)));
  return k;
}

RealField grad_d_squared(const Kinematics& k) {
  RealField out(k.grad_d.front().grid());
  auto o = out.values();
  for (const auto& g : k.grad_d) {
    auto gv = g.values();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] += gv[n] * gv[n];
  }
  return out;
}

// Row divergence of the Ericksen stress, physical.
std::vector<RealField> stress_divergence(const Kinematics& k, bool dealiased) {
  const int dim = k.dim;
  const int ncomp = static_cast<int>(k.grad_d.size()) / dim;
  const Grid& grid = k.grad_d.front().grid();
  const RealField g2 = grad_d_squared(k);
  std::vector<Spectrum> s(dim * dim, Spectrum(grid));
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      RealField sij(grid);
      auto v = sij.values();
      for (int c = 0; c < ncomp; ++c) {
        auto gi = k.grad_d[c * dim + i].values();
        auto gj = k.grad_d[c * dim + j].values();
        for (std::size_t n = 0; n < v.size(); ++n) v[n] += gi[n] * gj[n];
      }
      if (i == j) {
        auto g = g2.values();
        for (std::size_t n = 0; n < v.size(); ++n) v[n] -= 0.5 * g[n];
      }
      s[i * dim + j] = project(sij, dealiased);
      if (i != j) s[j * dim + i] = s[i * dim + j];
    }
  std::vector<RealField> out;
  for (int i = 0; i < dim; ++i) {
    Spectrum acc(grid);
    for (int j = 0; j < dim; ++j) acc += derivative(s[i * dim + j], j);
    out.push_back(transform_inverse(acc, FieldRole::vector_component));
  }
  return out;
}

std::vector<Spectrum> assemble_N(const RealField& a, const Kinematics& k, const LCParams& p, bool dealiased) {
  require_density_floor(a, p.density_floor);
  const int dim = k.dim;
  const auto divs = stress_divergence(k, dealiased);
  const auto av = a.values();
  std::vector<Spectrum> out;
  for (int i = 0; i < dim; ++i) {
    RealField n(a.grid(), FieldRole::vector_component);
    auto nv = n.values();
    auto au = k.Au[i].values();
    auto ds = divs[i].values();
    for (std::size_t x = 0; x < nv.size(); ++x) {
      double adv = 0.0;
      for (int j = 0; j < dim; ++j) adv += k.u[j][x] * k.grad_u[i * dim + j][x];
      const double rho = 1.0 + av[x];
      nv[x] = -adv - (av[x] / rho) * au[x] - p.xi_c * ds[x] / rho;
    }
    out.push_back(project(n, dealiased));
  }
  return out;
}

}  // namespace

RealField pressure(const RealField& rho, PressureLaw law) {
  (void)law;
  require_positive_density(rho, "pressure");
  RealField out = rho;
  for (double& v : out.values()) v = 0.5 * v * v;
  return out;
}

RealField dpressure(const RealField& rho, PressureLaw law) {
  (void)law;
  require_positive_density(rho, "dpressure");
  return rho;
}

// ----------------------------------------------------------------- stresses

MatrixField gradient_gram(const VectorField& d) {
  const Grid& grid = d.grid();
  const int dim = grid.dim();
  std::vector<VectorField> g;
  for (const auto& c : d.components()) g.push_back(grad(c));
  MatrixField out(grid, dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      auto v = out(i, j).values();
      for (const auto& gk : g) {
        auto gi = gk[i].values();
        auto gj = gk[j].values();
        for (std::size_t n = 0; n < v.size(); ++n) v[n] += gi[n] * gj[n];
      }
    }
  return out;
}

MatrixField ericksen_stress(const VectorField& d) {
  MatrixField gram = gradient_gram(d);
  const int dim = gram.rows();
  RealField trace(d.grid());
  for (int i = 0; i < dim; ++i) trace += gram(i, i);
  for (int i = 0; i < dim; ++i) {
    auto v = gram(i, i).values();
    auto t = trace.values();
    for (std::size_t n = 0; n < v.size(); ++n) v[n] -= 0.5 * t[n];
  }
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) gram(i, j) = filtered(gram(i, j)).with_role(FieldRole::matrix_component);
  return gram;
}

VectorField stress_div(const VectorField& d) { return div_rows(ericksen_stress(d)); }

VectorField operator_A(const VectorField& u, const LCParams& p) {
  const int dim = u.grid().dim();
  if (u.size() != dim) throw std::invalid_argument("operator_A: component count must equal dimension");
  const auto us = forward_all(u.components());
  const Spectrum div_u = div_spectral(us);
  VectorField out(u.grid(), dim);
  for (int i = 0; i < dim; ++i) {
    Spectrum lap = laplacian(us[i]);
    lap *= p.mu;
    Spectrum gd = derivative(div_u, i);
    gd *= (p.lambda + p.mu);
    out[i] = transform_inverse(lap + gd, FieldRole::vector_component);
  }
  return out;
}

// ------------------------------------------------------------- nonlinearity

std::vector<Spectrum> nonlinear_N_spectral(const RealField& a, const std::vector<Spectrum>& u,
                                           const std::vector<Spectrum>& d, const LCParams& p, bool dealiased) {
  return assemble_N(a, kinematics(u, d, p), p, dealiased);
}

VectorField nonlinear_N(const LCState& s, const LCParams& p) {
  RealField a = s.rho;
  for (double& v : a.values()) v -= 1.0;
  const auto n = nonlinear_N_spectral(a, forward_all(s.u.components()), forward_all(s.d.components()), p);
  return VectorField(inverse_all(n, FieldRole::vector_component));
}

// --------------------------------------------------------------------- RHS

LCState rhs_full(const LCState& s, const LCParams& p) {
  const Grid& grid = s.grid();
  const int dim = grid.dim();
  require_density_floor(s.rho - RealField::constant(grid, 1.0), p.density_floor);

  // Continuity.
  std::vector<Spectrum> flux;
  for (int i = 0; i < dim; ++i) flux.push_back(project(pointwise_product(s.rho, s.u[i]), true));
  RealField drho = transform_inverse(div_spectral(flux));
  drho *= -1.0;

  // Momentum, divided through by ρ.
  const VectorField Au = operator_A(s.u, p);
  const VectorField grad_rho = grad(s.rho);
  const RealField dp = dpressure(s.rho, p.pressure);
  const VectorField sdiv = stress_div(s.d);
  std::vector<VectorField> grad_u;
  for (int i = 0; i < dim; ++i) grad_u.push_back(grad(s.u[i]));
  VectorField du(grid, dim);
  for (int i = 0; i < dim; ++i) {
    RealField force(grid), adv(grid);
    for (std::size_t x = 0; x < grid.point_count(); ++x) {
      force[x] = (Au[i][x] - dp[x] * grad_rho[i][x] - p.xi_c * sdiv[i][x]) / s.rho[x];
      double a = 0.0;
      for (int j = 0; j < dim; ++j) a += s.u[j][x] * grad_u[i][j][x];
      adv[x] = a;
    }
    du[i] = (filtered(force) - filtered(adv)).with_role(FieldRole::vector_component);
  }

  // Director.
  std::vector<VectorField> grad_d;
  for (const auto& c : s.d.components()) grad_d.push_back(grad(c));
  RealField g2(grid);
  for (const auto& g : grad_d)
    for (int j = 0; j < dim; ++j) g2 += pointwise_product(g[j], g[j]);
  VectorField dd(grid, s.d.size());
  for (int k = 0; k < s.d.size(); ++k) {
    RealField adv(grid);
    for (int j = 0; j < dim; ++j) adv += pointwise_product(s.u[j], grad_d[k][j]);
    const RealField lap = transform_inverse(laplacian(transform_forward(s.d[k])));
    RealField relax = lap + filtered(pointwise_product(g2, s.d[k]));
    relax *= p.theta;
    dd[k] = (relax - filtered(adv)).with_role(FieldRole::vector_component);
  }
  return {std::move(drho), std::move(du), std::move(dd)};
}

ReformSpectra linear_terms(const ReformSpectra& r, const LCParams& p) {
  ReformSpectra out{Spectrum(r.grid()), Spectrum(r.grid()), {}, {}};
  out.a = lambda_pow(r.h, 1.0);
  out.a *= -1.0;
  Spectrum lh = laplacian(r.h);
  lh *= p.nu();
  out.h = lh + lambda_pow(r.a, 1.0);
  for (const auto& o : r.omega) {
    Spectrum l = laplacian(o);
    l *= p.mu;
    out.omega.push_back(std::move(l));
  }
  for (const auto& d : r.d) {
    Spectrum l = laplacian(d);
    l *= p.theta;
    out.d.push_back(std::move(l));
  }
  return out;
}

ReformSpectra explicit_terms(const ReformSpectra& r, const LCParams& p, bool dealiased) {
  const Grid& grid = r.grid();
  const int dim = grid.dim();
  const auto u = velocity_spectra(r);
  const RealField a = transform_inverse(r.a);
  const Kinematics k = kinematics(u, r.d, p);
  const auto n = assemble_N(a, k, p, dealiased);

  ReformSpectra out{Spectrum(grid), potential_part(n), rotational_part(n), {}};

  std::vector<Spectrum> flux;
  for (int i = 0; i < dim; ++i) flux.push_back(project(pointwise_product(a, k.u[i]), dealiased));
  out.a = div_spectral(flux);
  out.a *= -1.0;

  const RealField g2 = grad_d_squared(k);
  for (std::size_t c = 0; c < r.d.size(); ++c) {
    const RealField dc = transform_inverse(r.d[c]);
    RealField rhs(grid, FieldRole::vector_component);
    for (std::size_t x = 0; x < grid.point_count(); ++x) {
      double adv = 0.0;
      for (int j = 0; j < dim; ++j) adv += k.u[j][x] * k.grad_d[c * dim + j][x];
      rhs[x] = p.theta * g2[x] * dc[x] - adv;
    }
    out.d.push_back(project(rhs, dealiased));
  }
  return out;
}

ReformState rhs_reformulated(const ReformState& r, const LCParams& p) {
  const ReformSpectra s = to_spectra(r);
  ReformSpectra out = linear_terms(s, p);
  out.axpy(1.0, explicit_terms(s, p));
  return from_spectra(out);
}

// -------------------------------------------------------------- conversions

ReformState state_to_reform(const LCState& s) {
  if (!(s.rho.min() > 0.0)) throw std::invalid_argument("state_to_reform: density must be positive");
  RealField a = s.rho;
  for (double& v : a.values()) v -= 1.0;
  HelmholtzPair hp = helmholtz_decompose(s.u);
  return {std::move(a), std::move(hp.h), std::move(hp.omega), s.d};
}

LCState reform_to_state(const ReformState& r) {
  if (!(r.a.min() > -1.0)) throw std::invalid_argument("reform_to_state: a must exceed -1 everywhere");
  RealField rho = r.a;
  for (double& v : rho.values()) v += 1.0;
  return {std::move(rho), helmholtz_recompose(r.h, r.omega), r.d};
}

ReformSpectra to_spectra(const ReformState& r) {
  const int dim = r.grid().dim();
  ReformSpectra out{transform_forward(r.a), transform_forward(r.h), {}, forward_all(r.d.components())};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) out.omega.push_back(transform_forward(r.omega(i, j)));
  return out;
}

ReformState from_spectra(const ReformSpectra& r) {
  const int dim = r.grid().dim();
  MatrixField omega(r.grid(), dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) omega(i, j) = transform_inverse(r.omega[i * dim + j], FieldRole::matrix_component);
  return {transform_inverse(r.a), transform_inverse(r.h), std::move(omega),
          VectorField(inverse_all(r.d, FieldRole::vector_component))};
}

std::vector<Spectrum> velocity_spectra(const ReformSpectra& r) { return helmholtz_recompose_spectral(r.h, r.omega); }

double energy(const LCState& s, const LCParams& p) {
  const Grid& grid = s.grid();
  std::vector<VectorField> grad_d;
  for (const auto& c : s.d.components()) grad_d.push_back(grad(c));
  double sum = 0.0;
  for (std::size_t x = 0; x < grid.point_count(); ++x) {
    double u2 = 0.0;
    for (const auto& c : s.u.components()) u2 += c[x] * c[x];
    double g2 = 0.0;
    for (const auto& g : grad_d)
      for (const auto& c : g.components()) g2 += c[x] * c[x];
    const double drho = s.rho[x] - 1.0;
    // Quadratic law: P(ρ) − P(1) − P'(1)(ρ − 1) = ½(ρ − 1)².
    sum += 0.5 * s.rho[x] * u2 + 0.5 * drho * drho + 0.5 * p.xi_c * g2;
  }
  return sum * grid.volume() / static_cast<double>(grid.point_count());
}

}  // namespace nemalab
