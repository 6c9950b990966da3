#pragma once

#include <array>
#include <string>
#include <vector>

#include "nemalab/errors.hpp"
#include "nemalab/field.hpp"

namespace nemalab {

enum class PressureLaw { quadratic };

std::string to_string(PressureLaw law);
PressureLaw pressure_law_from_string(const std::string& name);

struct LCParams {
  double mu = 1.0;
  double lambda = 1.0;
  /// Kinetic/potential competition constant in front of the Ericksen stress.
  double xi_c = 1.0;
  /// Director relaxation constant.
  double theta = 1.0;
  PressureLaw pressure = PressureLaw::quadratic;
  /// Smallest density the nonlinear terms accept.
  double density_floor = 0.1;

  double nu() const { return 2.0 * mu + lambda; }
  /// Throws ConfigError unless μ > 0, 2μ + 3λ ≥ 0 and the floor lies in (0, 1).
  void validate() const;
};

/// Physical variables: density, velocity (dim components), director (3 components).
struct LCState {
  RealField rho;
  VectorField u;
  VectorField d;

  const Grid& grid() const { return rho.grid(); }
};

/// Reformulated variables: a = ρ − 1, h = Λ⁻¹Div u, Ω = Λ⁻¹curl u, d.
struct ReformState {
  RealField a;
  RealField h;
  MatrixField omega;
  VectorField d;

  const Grid& grid() const { return a.grid(); }
};

/// Spectral image of a ReformState; omega is dim x dim row-major.
struct ReformSpectra {
  Spectrum a;
  Spectrum h;
  std::vector<Spectrum> omega;
  std::vector<Spectrum> d;

  const Grid& grid() const { return a.grid(); }
  ReformSpectra& axpy(double alpha, const ReformSpectra& x);
};

struct Equilibrium {
  std::array<double, 3> d_hat{0.0, 0.0, 1.0};

  /// Throws ConfigError unless |d̂| = 1 to 1e-12.
  void validate() const;
  LCState state(const Grid& grid) const;
  ReformState reform(const Grid& grid) const;
};

// ------------------------------------------------------------------ pressure

/// P(ρ) = ½ρ² and P'(ρ) = ρ. Throw SolverBreakdown on ρ ≤ 0.
RealField pressure(const RealField& rho, PressureLaw law = PressureLaw::quadratic);
RealField dpressure(const RealField& rho, PressureLaw law = PressureLaw::quadratic);

// ----------------------------------------------------------------- stresses

/// ∇d⊙∇d, entry (i, j) = Σ_k ∂_i d_k ∂_j d_k, pointwise without dealiasing.
MatrixField gradient_gram(const VectorField& d);
/// ∇d⊙∇d − ½|∇d|²I with the products dealiased.
MatrixField ericksen_stress(const VectorField& d);
/// Row divergence of ericksen_stress.
VectorField stress_div(const VectorField& d);

/// 𝒜u = μΔu + (λ+μ)∇Div u.
VectorField operator_A(const VectorField& u, const LCParams& p);

// ------------------------------------------------------------- nonlinearity

/// 𝒩 = −u·∇u − ((ρ−1)/ρ)𝒜u − (ξ_c/ρ)Div(∇d⊙∇d − ½|∇d|²I).
/// Throws SolverBreakdown when ρ drops below the density floor.
VectorField nonlinear_N(const LCState& s, const LCParams& p);

/// Spectral form: a is ρ − 1 in physical space, u and d are spectra.
/// Only ∇d enters, so the zero modes of d are never read.
std::vector<Spectrum> nonlinear_N_spectral(const RealField& a, const std::vector<Spectrum>& u,
                                           const std::vector<Spectrum>& d, const LCParams& p, bool dealias = true);

// --------------------------------------------------------------------- RHS

/// Time derivative of (ρ, u, d) for the velocity form of the full system:
///   ∂ρ = −Div(ρu)
///   ∂u = (1/ρ)[𝒜u − ∇P(ρ) − ξ_c Div(∇d⊙∇d − ½|∇d|²I)] − u·∇u
///   ∂d = θ(Δd + |∇d|²d) − u·∇d
LCState rhs_full(const LCState& s, const LCParams& p);

/// Time derivative of (a, h, Ω, d):
///   ∂a = −Λh − Div(au)
///   ∂h = νΔh + Λa + Λ⁻¹Div 𝒩
///   ∂Ω = μΔΩ + Λ⁻¹curl 𝒩
///   ∂d = θ(Δd + |∇d|²d) − u·∇d
ReformState rhs_reformulated(const ReformState& r, const LCParams& p);

/// Stiff linear part of rhs_reformulated, spectral.
ReformSpectra linear_terms(const ReformSpectra& r, const LCParams& p);
/// Transport and nonlinear part of rhs_reformulated, spectral. With `dealias`
/// every product is formed from and projected onto the 2/3-rule band.
ReformSpectra explicit_terms(const ReformSpectra& r, const LCParams& p, bool dealias = true);

// -------------------------------------------------------------- conversions

/// Throws std::invalid_argument when ρ ≤ 0 somewhere. The mean of u is lost.
ReformState state_to_reform(const LCState& s);
/// Throws std::invalid_argument when a ≤ −1 somewhere.
LCState reform_to_state(const ReformState& r);

ReformSpectra to_spectra(const ReformState& r);
ReformState from_spectra(const ReformSpectra& r);
/// Velocity rebuilt from (h, Ω), spectral.
std::vector<Spectrum> velocity_spectra(const ReformSpectra& r);

/// ∫ ½ρ|u|² + (P(ρ) − P(1) − P'(1)(ρ−1)) + ½ξ_c|∇d|² dx.
double energy(const LCState& s, const LCParams& p);

}  // namespace nemalab
