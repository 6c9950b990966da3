#pragma once

#include <vector>

#include "nemalab/field.hpp"

namespace nemalab {

/// Compressible potential h = Λ⁻¹Div u and incompressible part Ω = Λ⁻¹curl u.
struct HelmholtzPair {
  RealField h;
  MatrixField omega;
};

/// Spectral counterpart of HelmholtzPair; omega is dim x dim, row-major.
struct HelmholtzSpectra {
  Spectrum h;
  std::vector<Spectrum> omega;
};

/// Acts on the mean-free, Nyquist-free part of u.
HelmholtzPair helmholtz_decompose(const VectorField& u);
/// u = −Λ⁻¹∇h + Λ⁻¹curl Ω with (curl Ω)_i = Σ_j ∂_j Ω_ji.
VectorField helmholtz_recompose(const RealField& h, const MatrixField& omega);

HelmholtzSpectra helmholtz_decompose_spectral(const std::vector<Spectrum>& u);
std::vector<Spectrum> helmholtz_recompose_spectral(const Spectrum& h, const std::vector<Spectrum>& omega);

/// Λ⁻¹Div of a vector spectrum.
Spectrum potential_part(const std::vector<Spectrum>& v);
/// Λ⁻¹curl of a vector spectrum, dim x dim row-major.
std::vector<Spectrum> rotational_part(const std::vector<Spectrum>& v);

}  // namespace nemalab
