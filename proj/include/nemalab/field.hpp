#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nemalab/grid.hpp"

namespace nemalab {

using Complex = std::complex<double>;

enum class FieldRole { scalar, vector_component, matrix_component };

std::string to_string(FieldRole role);
FieldRole role_from_string(const std::string& name);

/// Real samples of a periodic function on a Grid.
class RealField {
 public:
  explicit RealField(Grid grid, FieldRole role = FieldRole::scalar);
  RealField(Grid grid, std::vector<double> values, FieldRole role = FieldRole::scalar);

  /// Samples `fn(x)` at every lattice point (x has dim() live entries).
  static RealField sample(const Grid& grid, const std::function<double(const std::array<double, 3>&)>& fn,
                          FieldRole role = FieldRole::scalar);
  static RealField constant(const Grid& grid, double value, FieldRole role = FieldRole::scalar);

  const Grid& grid() const { return grid_; }
  FieldRole role() const { return role_; }
  RealField with_role(FieldRole role) const;

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  bool all_finite() const;
  double mean() const;
  double max_abs() const;
  double min() const;
  double max() const;
  /// sqrt(∫ f² dx) by the trapezoid (spectrally exact) rule.
  double l2_norm() const;

  RealField& operator+=(const RealField& other);
  RealField& operator-=(const RealField& other);
  RealField& operator*=(double factor);

 private:
  Grid grid_;
  std::vector<double> values_;
  FieldRole role_;
};

RealField operator+(RealField a, const RealField& b);
RealField operator-(RealField a, const RealField& b);
RealField operator*(double factor, RealField a);
/// Pointwise product (no dealiasing).
RealField pointwise_product(const RealField& a, const RealField& b);

/// Fourier coefficients c_k with f(x) = Σ_k c_k e^{iξ_k·x}, half-complex layout.
class Spectrum {
 public:
  explicit Spectrum(Grid grid);
  Spectrum(Grid grid, std::vector<Complex> coeffs);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }
  Complex operator[](std::size_t i) const { return coeffs_[i]; }
  Complex& operator[](std::size_t i) { return coeffs_[i]; }

  Complex zero_mode() const { return coeffs_[0]; }
  /// Parseval: sqrt(V Σ_k |c_k|²) over the full spectrum.
  double l2_norm() const;
  /// Real part of ∫ f ḡ dx.
  double inner(const Spectrum& other) const;
  /// Largest |c(-k) - conj c(k)| on the self-conjugate planes, relative to max |c|.
  double hermitian_defect() const;
  /// Number of modes with |c_k| > threshold, counted over the full spectrum.
  std::size_t support_count(double threshold = 0.0) const;
  bool all_finite() const;

  Spectrum& operator+=(const Spectrum& other);
  Spectrum& operator-=(const Spectrum& other);
  Spectrum& operator*=(Complex factor);

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

Spectrum operator+(Spectrum a, const Spectrum& b);
Spectrum operator-(Spectrum a, const Spectrum& b);
Spectrum operator*(Complex factor, Spectrum a);

/// dim-or-more component field sharing one grid (velocity has dim components,
/// the director always has three).
class VectorField {
 public:
  VectorField(Grid grid, int components);
  explicit VectorField(std::vector<RealField> components);

  const Grid& grid() const { return grid_; }
  int size() const { return static_cast<int>(components_.size()); }
  const RealField& operator[](int i) const { return components_[i]; }
  RealField& operator[](int i) { return components_[i]; }
  const std::vector<RealField>& components() const { return components_; }

  bool all_finite() const;
  double l2_norm() const;
  /// Pointwise Euclidean norm.
  RealField magnitude() const;

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(double factor);

 private:
  Grid grid_;
  std::vector<RealField> components_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double factor, VectorField a);

/// rows x cols matrix of fields, row-major.
class MatrixField {
 public:
  MatrixField(Grid grid, int rows, int cols);

  const Grid& grid() const { return grid_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const RealField& operator()(int i, int j) const { return entries_[i * cols_ + j]; }
  RealField& operator()(int i, int j) { return entries_[i * cols_ + j]; }

  double l2_norm() const;
  /// max over points of |M + Mᵀ| entries.
  double antisymmetry_defect() const;
  MatrixField& operator-=(const MatrixField& other);

 private:
  Grid grid_;
  int rows_;
  int cols_;
  std::vector<RealField> entries_;
};

}  // namespace nemalab
