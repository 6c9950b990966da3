#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace nemalab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Mode tables for the half-complex (r2c) layout of a periodic lattice.
///
/// The last active axis stores only k >= 0; every other axis stores the full
/// signed range. `weight` is the multiplicity of a stored mode in sums over
/// the full spectrum (2 when the Hermitian partner is implicit, 1 otherwise).
struct SpectralLattice {
  std::array<int, 3> shape{1, 1, 1};
  std::vector<std::array<int, 3>> wavenumber;
  std::vector<std::array<double, 3>> xi;
  std::vector<double> xi_norm;
  std::vector<double> weight;
  // Bit a is set when the mode sits on the Nyquist plane of axis a.
  std::vector<std::uint8_t> nyquist;
};

/// Periodic lattice in 2 or 3 dimensions with power-of-two point counts.
///
/// In 2D the third axis is inert (size 1). Physical samples are stored
/// row-major with the last axis fastest.
class Grid {
 public:
  Grid(int dim, std::array<int, 3> sizes, std::array<double, 3> periods);

  /// Equal sizes and periods on every active axis.
  static Grid cube(int dim, int n, double period = kTwoPi);

  int dim() const { return dim_; }
  int size(int axis) const { return sizes_[axis]; }
  double period(int axis) const { return periods_[axis]; }
  const std::array<int, 3>& sizes() const { return sizes_; }
  const std::array<double, 3>& periods() const { return periods_; }

  std::size_t point_count() const;
  std::size_t mode_count() const { return lattice_->xi_norm.size(); }
  double volume() const;
  double spacing(int axis) const { return periods_[axis] / sizes_[axis]; }
  double min_spacing() const;

  /// Smallest nonzero |ξ| on the lattice.
  double min_xi() const;
  /// Largest |ξ| present on the lattice (a corner mode).
  double max_xi() const;
  /// Smallest per-axis Nyquist frequency.
  double nyquist_xi() const;

  const SpectralLattice& lattice() const { return *lattice_; }

  /// Same point counts, every period multiplied by `factor`.
  Grid rescaled(double factor) const;
  /// Point counts multiplied by `factor`, same periods.
  Grid refined(int factor) const;

  /// Physical coordinate of sample `index` along `axis`.
  double coordinate(int axis, int index) const { return index * spacing(axis); }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim_ == b.dim_ && a.sizes_ == b.sizes_ && a.periods_ == b.periods_;
  }
  friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

 private:
  int dim_;
  std::array<int, 3> sizes_;
  std::array<double, 3> periods_;
  std::shared_ptr<const SpectralLattice> lattice_;
};

/// Throws std::invalid_argument unless `a == b`.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace nemalab
