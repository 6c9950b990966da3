#include "nemalab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nemalab {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::shared_ptr<const SpectralLattice> build_lattice(int dim, const std::array<int, 3>& n,
                                                     const std::array<double, 3>& period) {
  auto lat = std::make_shared<SpectralLattice>();
  const int last = dim - 1;
  for (int a = 0; a < 3; ++a) lat->shape[a] = (a < dim) ? n[a] : 1;
  lat->shape[last] = n[last] / 2 + 1;

  const std::size_t count =
      static_cast<std::size_t>(lat->shape[0]) * lat->shape[1] * lat->shape[2];
  lat->wavenumber.resize(count);
  lat->xi.resize(count);
  lat->xi_norm.resize(count);
  lat->weight.resize(count);
  lat->nyquist.resize(count);

  std::size_t m = 0;
  for (int i0 = 0; i0 < lat->shape[0]; ++i0) {
    for (int i1 = 0; i1 < lat->shape[1]; ++i1) {
      for (int i2 = 0; i2 < lat->shape[2]; ++i2, ++m) {
        const std::array<int, 3> idx{i0, i1, i2};
        std::array<int, 3> k{0, 0, 0};
        std::array<double, 3> xi{0.0, 0.0, 0.0};
        std::uint8_t nyq = 0;
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) {
          int ka = idx[a];
          if (a != last && ka > n[a] / 2) ka -= n[a];
          if (ka == n[a] / 2) nyq |= static_cast<std::uint8_t>(1u << a);
          k[a] = ka;
          xi[a] = ka * (kTwoPi / period[a]);
          r2 += xi[a] * xi[a];
        }
        lat->wavenumber[m] = k;
        lat->xi[m] = xi;
        lat->xi_norm[m] = std::sqrt(r2);
        const int kl = idx[last];
        lat->weight[m] = (kl == 0 || kl == n[last] / 2) ? 1.0 : 2.0;
        lat->nyquist[m] = nyq;
      }
    }
  }
  return lat;
}

}  // namespace

Grid::Grid(int dim, std::array<int, 3> sizes, std::array<double, 3> periods)
    : dim_(dim), sizes_(sizes), periods_(periods) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("grid dimension must be 2 or 3");
  for (int a = 0; a < 3; ++a) {
    if (a >= dim) {
      sizes_[a] = 1;
      periods_[a] = 1.0;
      continue;
    }
    if (sizes[a] < 8 || !is_power_of_two(sizes[a]))
      throw std::invalid_argument("grid size on axis " + std::to_string(a) +
                                  " must be a power of two >= 8, got " +
                                  std::to_string(sizes[a]));
    if (!(periods[a] > 0.0) || !std::isfinite(periods[a]))
      throw std::invalid_argument("grid period must be positive and finite");
  }
  lattice_ = build_lattice(dim_, sizes_, periods_);
}

Grid Grid::cube(int dim, int n, double period) {
  return Grid(dim, {n, n, dim == 3 ? n : 1}, {period, period, dim == 3 ? period : 1.0});
}

std::size_t Grid::point_count() const {
  return static_cast<std::size_t>(sizes_[0]) * sizes_[1] * sizes_[2];
}

double Grid::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= periods_[a];
  return v;
}

double Grid::min_spacing() const {
  double h = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim_; ++a) h = std::min(h, spacing(a));
  return h;
}

double Grid::min_xi() const {
  double r = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim_; ++a) r = std::min(r, kTwoPi / periods_[a]);
  return r;
}

double Grid::max_xi() const { return *std::max_element(lattice_->xi_norm.begin(), lattice_->xi_norm.end()); }

double Grid::nyquist_xi() const {
  double r = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim_; ++a) r = std::min(r, (sizes_[a] / 2) * (kTwoPi / periods_[a]));
  return r;
}

Grid Grid::rescaled(double factor) const {
  std::array<double, 3> p = periods_;
  for (int a = 0; a < dim_; ++a) p[a] *= factor;
  return Grid(dim_, sizes_, p);
}

Grid Grid::refined(int factor) const {
  std::array<int, 3> s = sizes_;
  for (int a = 0; a < dim_; ++a) s[a] *= factor;
  return Grid(dim_, s, periods_);
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": fields live on different grids");
}

}  // namespace nemalab
