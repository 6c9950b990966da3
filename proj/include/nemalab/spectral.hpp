#pragma once

#include "nemalab/field.hpp"

namespace nemalab {

// ---------------------------------------------------------------- transforms

/// Coefficients normalised so that the zero mode equals the sample mean.
/// Throws std::invalid_argument on non-finite samples.
Spectrum transform_forward(const RealField& f);
RealField transform_inverse(const Spectrum& s, FieldRole role = FieldRole::scalar);

/// Thread count used by FFT plans created after the call (>= 1).
void set_fft_threads(int threads);
int fft_threads();

// ------------------------------------------------------ spectral multipliers

/// Λ^order: multiply by |ξ|^order. The zero mode is mapped to zero for every
/// order != 0 (homogeneous operators act on the mean-free part).
Spectrum lambda_pow(const Spectrum& s, double order);

/// ∂/∂x_axis. The Nyquist plane of that axis is zeroed.
Spectrum derivative(const Spectrum& s, int axis);
Spectrum laplacian(const Spectrum& s);
/// Copy with the zero mode removed.
Spectrum mean_free(const Spectrum& s);

/// 2/3-rule truncation: zeroes every mode with some |k_a| > fraction · n_a / 2.
Spectrum dealias(const Spectrum& s, double fraction = 2.0 / 3.0);
void dealias_in_place(Spectrum& s, double fraction = 2.0 / 3.0);
/// Number of modes (full spectrum) kept by dealias.
std::size_t dealias_retained_count(const Grid& grid, double fraction = 2.0 / 3.0);

/// Exact interpolation onto grid.refined(factor) by zero padding.
Spectrum pad(const Spectrum& s, int factor);
/// Restriction of a refined spectrum to `coarse`; modes the coarse grid cannot
/// hold and its Nyquist planes are dropped.
Spectrum truncate(const Spectrum& s, const Grid& coarse);

/// Alias-free product evaluated on a 2x padded grid and returned there.
RealField exact_product(const RealField& f, const RealField& g);

// --------------------------------------------------- differential operators

VectorField grad(const RealField& f);
RealField div(const VectorField& v);
/// (curl v)_i^j = ∂_j v^i − ∂_i v^j.
MatrixField curl_mat(const VectorField& v);
/// Row divergence (Div M)_i = Σ_j ∂_j M_ij.
VectorField div_rows(const MatrixField& m);
/// curl of a matrix field: (curl M)_i = Σ_j ∂_j M_ji.
VectorField curl_of_matrix(const MatrixField& m);

// Spectral-space versions used by the solver and the Helmholtz split.
std::vector<Spectrum> grad_spectral(const Spectrum& f);
Spectrum div_spectral(const std::vector<Spectrum>& v);

std::vector<Spectrum> forward_all(const std::vector<RealField>& fields);
std::vector<RealField> inverse_all(const std::vector<Spectrum>& spectra, FieldRole role);

}  // namespace nemalab
