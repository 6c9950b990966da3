#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nemalab/field.hpp"

namespace nemalab {

/// Radial dyadic partition of unity ψ supported in the annulus [5/6, 12/5].
///
/// ψ(r) = χ(r/2) − χ(r), where χ is a C^∞ cutoff equal to 1 on [0, 5/6]
/// and 0 on [6/5, ∞). The sum Σ_q ψ(2^{−q} r) telescopes to 1 for r > 0.
class DyadicPartition {
 public:
  static constexpr double kInner = 5.0 / 6.0;
  static constexpr double kOuter = 12.0 / 5.0;

  using Profile = std::function<double(double)>;

  /// Block range covers every nonzero lattice mode of `grid`.
  explicit DyadicPartition(const Grid& grid);
  /// Custom radial profile (used for fault injection); range as above.
  DyadicPartition(const Grid& grid, Profile profile);

  const Grid& grid() const { return grid_; }
  int q_min() const { return q_min_; }
  int q_max() const { return q_max_; }
  int block_count() const { return q_max_ - q_min_ + 1; }

  double psi(double r) const;
  double weight(int q, double r) const;
  static double standard_psi(double r);
  static double cutoff(double r);

  /// Lattice entries (mode index, ψ(2^{−q}|ξ|)) of block q.
  struct Entry {
    std::size_t mode;
    double weight;
  };
  const std::vector<Entry>& block(int q) const { return blocks_.at(q - q_min_); }

 private:
  void build();

  Grid grid_;
  Profile profile_;
  int q_min_ = 0;
  int q_max_ = 0;
  std::vector<std::vector<Entry>> blocks_;
};

/// build_partition: rejects grids that cannot host one full annulus.
DyadicPartition build_partition(const Grid& grid);

/// Max over nonzero lattice ξ of |Σ_q ψ(2^{−q}|ξ|) − 1|.
double partition_of_unity_defect(const DyadicPartition& p);

/// Per-block L² masses ‖Δ_q f‖ for q in [q_min, q_max].
struct BlockMasses {
  int q_min = 0;
  std::vector<double> l2;

  int q_max() const { return q_min + static_cast<int>(l2.size()) - 1; }
  double at(int q) const;
};

/// Dyadic blocks Δ_q f with bookkeeping.
struct BlockSet {
  int q_min = 0;
  std::vector<Spectrum> blocks;
  BlockMasses masses;
  double mean = 0.0;
  /// ‖f − mean − Σ_q Δ_q f‖_{L²}.
  double residual = 0.0;

  int q_max() const { return q_min + static_cast<int>(blocks.size()) - 1; }
  const Spectrum& block(int q) const { return blocks.at(q - q_min); }
};

BlockSet decompose(const RealField& f, const DyadicPartition& p);
BlockSet decompose(const Spectrum& f, const DyadicPartition& p);

/// Block masses without materialising the blocks.
BlockMasses block_masses(const Spectrum& f, const DyadicPartition& p);
/// Vector version: ‖Δ_q v‖ = sqrt(Σ_i ‖Δ_q v_i‖²).
BlockMasses block_masses(const std::vector<Spectrum>& v, const DyadicPartition& p);

/// S_q f = Σ_{p ≤ q−1} Δ_p f.
Spectrum low_frequency_cutoff(const BlockSet& b, int q);
Spectrum reconstruct(const BlockSet& b);

/// Hybrid exponent pair: s on blocks q <= split, t on blocks q > split.
struct HybridSpec {
  double s = 0.5;
  double t = 1.5;
  int split = 0;
};

double phi_exponent(const HybridSpec& spec, int q);

/// Σ_q 2^{qs} ‖Δ_q f‖_{L²}.
double besov_norm(const BlockMasses& b, double s);
double besov_norm(const BlockSet& b, double s);
double hybrid_norm(const BlockMasses& b, const HybridSpec& spec);
double hybrid_norm(const BlockSet& b, const HybridSpec& spec);

/// Convenience wrappers that transform and decompose.
double besov_norm(const RealField& f, const DyadicPartition& p, double s);
double besov_norm(const VectorField& v, const DyadicPartition& p, double s);
double hybrid_norm(const RealField& f, const DyadicPartition& p, const HybridSpec& spec);
double hybrid_norm(const VectorField& v, const DyadicPartition& p, const HybridSpec& spec);

/// 2^{km} f(2^k x). The torus is dilated with the field: samples are kept,
/// every period is divided by 2^k, so block q of f becomes block q+k.
RealField scaling_transform(const RealField& f, int k, int m);
/// Same, for a real scale factor; rejects factors that are not powers of two.
RealField scaling_transform(const RealField& f, double factor, int m);
VectorField scaling_transform(const VectorField& v, int k, int m);

struct ProductEstimate {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// ‖fg‖_{B̃} against ‖f‖_∞‖g‖_{B̃} + ‖g‖_∞‖f‖_{B̃}, product formed alias-free
/// on a 2x padded grid.
ProductEstimate product_estimate_report(const RealField& f, const RealField& g, const HybridSpec& spec);

/// One CSV row per block: q, block_L2, 2^{qs}·block_L2.
std::string spectrum_report_csv(const BlockMasses& b, double s);

}  // namespace nemalab
