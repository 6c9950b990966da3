#include "nemalab/helmholtz.hpp"

#include <stdexcept>

#include "nemalab/spectral.hpp"

namespace nemalab {

Spectrum potential_part(const std::vector<Spectrum>& v) { return lambda_pow(div_spectral(v), -1.0); }

std::vector<Spectrum> rotational_part(const std::vector<Spectrum>& v) {
  const int dim = v.front().grid().dim();
  if (static_cast<int>(v.size()) != dim) throw std::invalid_argument("rotational_part: component count must equal dimension");
  std::vector<Spectrum> omega;
  omega.reserve(dim * dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      omega.push_back(i == j ? Spectrum(v[i].grid()) : lambda_pow(derivative(v[i], j) - derivative(v[j], i), -1.0));
  return omega;
}

HelmholtzSpectra helmholtz_decompose_spectral(const std::vector<Spectrum>& u) {
  return {potential_part(u), rotational_part(u)};
}

std::vector<Spectrum> helmholtz_recompose_spectral(const Spectrum& h, const std::vector<Spectrum>& omega) {
  const Grid& grid = h.grid();
  const int dim = grid.dim();
  if (static_cast<int>(omega.size()) != dim * dim) throw std::invalid_argument("helmholtz_recompose: omega must be dim x dim");
  std::vector<Spectrum> u;
  u.reserve(dim);
  for (int i = 0; i < dim; ++i) {
    Spectrum curl_i(grid);
    for (int j = 0; j < dim; ++j) curl_i += derivative(omega[j * dim + i], j);
    u.push_back(lambda_pow(curl_i - derivative(h, i), -1.0));
  }
  return u;
}

HelmholtzPair helmholtz_decompose(const VectorField& u) {
  const int dim = u.grid().dim();
  if (u.size() != dim) throw std::invalid_argument("helmholtz_decompose: component count must equal dimension");
  const auto spec = helmholtz_decompose_spectral(forward_all(u.components()));
  MatrixField omega(u.grid(), dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) omega(i, j) = transform_inverse(spec.omega[i * dim + j], FieldRole::matrix_component);
  return {transform_inverse(spec.h), std::move(omega)};
}

VectorField helmholtz_recompose(const RealField& h, const MatrixField& omega) {
  const int dim = h.grid().dim();
  require_same_grid(h.grid(), omega.grid(), "helmholtz_recompose");
  std::vector<Spectrum> os;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) os.push_back(transform_forward(omega(i, j)));
  return VectorField(inverse_all(helmholtz_recompose_spectral(transform_forward(h), os), FieldRole::vector_component));
}

}  // namespace nemalab
