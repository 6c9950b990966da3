#include "nemalab/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nemalab {

std::string to_string(FieldRole role) {
  switch (role) {
    case FieldRole::scalar: return "scalar";
    case FieldRole::vector_component: return "vector_component";
    case FieldRole::matrix_component: return "matrix_component";
  }
  return "scalar";
}

FieldRole role_from_string(const std::string& name) {
  if (name == "scalar") return FieldRole::scalar;
  if (name == "vector_component") return FieldRole::vector_component;
  if (name == "matrix_component") return FieldRole::matrix_component;
  throw std::invalid_argument("unknown field role '" + name + "'");
}

// ---------------------------------------------------------------- RealField

RealField::RealField(Grid grid, FieldRole role)
    : grid_(std::move(grid)), values_(grid_.point_count(), 0.0), role_(role) {}

RealField::RealField(Grid grid, std::vector<double> values, FieldRole role)
    : grid_(std::move(grid)), values_(std::move(values)), role_(role) {
  if (values_.size() != grid_.point_count())
    throw std::invalid_argument("RealField: value count does not match grid point count");
}

RealField RealField::sample(const Grid& grid, const std::function<double(const std::array<double, 3>&)>& fn,
                            FieldRole role) {
  RealField f(grid, role);
  std::size_t m = 0;
  for (int i0 = 0; i0 < grid.size(0); ++i0)
    for (int i1 = 0; i1 < grid.size(1); ++i1)
      for (int i2 = 0; i2 < grid.size(2); ++i2, ++m) {
        std::array<double, 3> x{grid.coordinate(0, i0), grid.coordinate(1, i1), 0.0};
        if (grid.dim() == 3) x[2] = grid.coordinate(2, i2);
        f.values_[m] = fn(x);
      }
  return f;
}

RealField RealField::constant(const Grid& grid, double value, FieldRole role) {
  return RealField(grid, std::vector<double>(grid.point_count(), value), role);
}

RealField RealField::with_role(FieldRole role) const {
  RealField copy = *this;
  copy.role_ = role;
  return copy;
}

bool RealField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double RealField::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double RealField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double RealField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double RealField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double RealField::l2_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s * grid_.volume() / static_cast<double>(values_.size()));
}

RealField& RealField::operator+=(const RealField& other) {
  require_same_grid(grid_, other.grid_, "RealField +=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

RealField& RealField::operator-=(const RealField& other) {
  require_same_grid(grid_, other.grid_, "RealField -=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

RealField& RealField::operator*=(double factor) {
  for (double& v : values_) v *= factor;
  return *this;
}

RealField operator+(RealField a, const RealField& b) { return a += b; }
RealField operator-(RealField a, const RealField& b) { return a -= b; }
RealField operator*(double factor, RealField a) { return a *= factor; }

RealField pointwise_product(const RealField& a, const RealField& b) {
  require_same_grid(a.grid(), b.grid(), "pointwise_product");
  RealField out(a.grid(), a.role());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

// ----------------------------------------------------------------- Spectrum

Spectrum::Spectrum(Grid grid) : grid_(std::move(grid)), coeffs_(grid_.mode_count(), Complex{}) {}

Spectrum::Spectrum(Grid grid, std::vector<Complex> coeffs) : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.mode_count())
    throw std::invalid_argument("Spectrum: coefficient count does not match grid mode count");
}

double Spectrum::l2_norm() const {
  const auto& w = grid_.lattice().weight;
  double s = 0.0;
  for (std::size_t m = 0; m < coeffs_.size(); ++m) s += w[m] * std::norm(coeffs_[m]);
  return std::sqrt(grid_.volume() * s);
}

double Spectrum::inner(const Spectrum& other) const {
  require_same_grid(grid_, other.grid_, "Spectrum::inner");
  const auto& w = grid_.lattice().weight;
  double s = 0.0;
  for (std::size_t m = 0; m < coeffs_.size(); ++m) s += w[m] * std::real(coeffs_[m] * std::conj(other.coeffs_[m]));
  return grid_.volume() * s;
}

double Spectrum::hermitian_defect() const {
  const auto& lat = grid_.lattice();
  const int dim = grid_.dim();
  const int last = dim - 1;
  const auto& shape = lat.shape;
  double scale = 0.0;
  for (const auto& c : coeffs_) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return 0.0;

  // Self-conjugate planes: last-axis index 0 and (for even n) n/2.
  const int n_last = grid_.size(last);
  double defect = 0.0;
  auto partner = [&](int idx, int a) { return idx == 0 ? 0 : grid_.size(a) - idx; };
  for (int plane : {0, n_last / 2}) {
    for (int i0 = 0; i0 < shape[0]; ++i0) {
      for (int i1 = 0; i1 < shape[1]; ++i1) {
        for (int i2 = 0; i2 < shape[2]; ++i2) {
          std::array<int, 3> idx{i0, i1, i2};
          if (idx[last] != plane) continue;
          std::array<int, 3> jdx = idx;
          for (int a = 0; a < dim; ++a)
            if (a != last) jdx[a] = partner(idx[a], a);
          const std::size_t m = (static_cast<std::size_t>(idx[0]) * shape[1] + idx[1]) * shape[2] + idx[2];
          const std::size_t p = (static_cast<std::size_t>(jdx[0]) * shape[1] + jdx[1]) * shape[2] + jdx[2];
          defect = std::max(defect, std::abs(coeffs_[p] - std::conj(coeffs_[m])));
        }
      }
    }
  }
  return defect / scale;
}

std::size_t Spectrum::support_count(double threshold) const {
  const auto& w = grid_.lattice().weight;
  std::size_t n = 0;
  for (std::size_t m = 0; m < coeffs_.size(); ++m)
    if (std::abs(coeffs_[m]) > threshold) n += static_cast<std::size_t>(w[m]);
  return n;
}

bool Spectrum::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

Spectrum& Spectrum::operator+=(const Spectrum& other) {
  require_same_grid(grid_, other.grid_, "Spectrum +=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

Spectrum& Spectrum::operator-=(const Spectrum& other) {
  require_same_grid(grid_, other.grid_, "Spectrum -=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

Spectrum& Spectrum::operator*=(Complex factor) {
  for (auto& c : coeffs_) c *= factor;
  return *this;
}

Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }
Spectrum operator*(Complex factor, Spectrum a) { return a *= factor; }

// -------------------------------------------------------------- VectorField

VectorField::VectorField(Grid grid, int components) : grid_(std::move(grid)) {
  components_.reserve(components);
  for (int i = 0; i < components; ++i) components_.emplace_back(grid_, FieldRole::vector_component);
}

VectorField::VectorField(std::vector<RealField> components) : grid_(components.at(0).grid()) {
  for (const auto& c : components) require_same_grid(grid_, c.grid(), "VectorField");
  components_ = std::move(components);
}

bool VectorField::all_finite() const {
  return std::all_of(components_.begin(), components_.end(), [](const RealField& f) { return f.all_finite(); });
}

double VectorField::l2_norm() const {
  double s = 0.0;
  for (const auto& c : components_) {
    const double n = c.l2_norm();
    s += n * n;
  }
  return std::sqrt(s);
}

RealField VectorField::magnitude() const {
  RealField out(grid_);
  for (std::size_t p = 0; p < out.size(); ++p) {
    double s = 0.0;
    for (const auto& c : components_) s += c[p] * c[p];
    out[p] = std::sqrt(s);
  }
  return out;
}

VectorField& VectorField::operator+=(const VectorField& other) {
  if (other.size() != size()) throw std::invalid_argument("VectorField +=: component count mismatch");
  for (int i = 0; i < size(); ++i) components_[i] += other.components_[i];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
  if (other.size() != size()) throw std::invalid_argument("VectorField -=: component count mismatch");
  for (int i = 0; i < size(); ++i) components_[i] -= other.components_[i];
  return *this;
}

VectorField& VectorField::operator*=(double factor) {
  for (auto& c : components_) c *= factor;
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double factor, VectorField a) { return a *= factor; }

// -------------------------------------------------------------- MatrixField

MatrixField::MatrixField(Grid grid, int rows, int cols) : grid_(std::move(grid)), rows_(rows), cols_(cols) {
  entries_.reserve(static_cast<std::size_t>(rows) * cols);
  for (int i = 0; i < rows * cols; ++i) entries_.emplace_back(grid_, FieldRole::matrix_component);
}

double MatrixField::l2_norm() const {
  double s = 0.0;
  for (const auto& e : entries_) {
    const double n = e.l2_norm();
    s += n * n;
  }
  return std::sqrt(s);
}

double MatrixField::antisymmetry_defect() const {
  double d = 0.0;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      for (std::size_t p = 0; p < grid_.point_count(); ++p)
        d = std::max(d, std::abs((*this)(i, j)[p] + (*this)(j, i)[p]));
  return d;
}

MatrixField& MatrixField::operator-=(const MatrixField& other) {
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

}  // namespace nemalab
