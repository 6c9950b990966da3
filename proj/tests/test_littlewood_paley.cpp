#include <cmath>

#include "doctest.h"
#include "nemalab/littlewood_paley.hpp"
#include "nemalab/random_fields.hpp"
#include "nemalab/spectral.hpp"
#include "test_util.hpp"

using namespace nemalab;
using nemalab::testing::rel_l2_diff;

TEST_SUITE("partition") {
  TEST_CASE("telescoping sum at |xi| = 1 and support of psi") {
    double sum = 0.0;
    for (int q = -10; q <= 10; ++q) sum += DyadicPartition::standard_psi(std::ldexp(1.0, -q));
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(DyadicPartition::standard_psi(0.5) == 0.0);
    CHECK(DyadicPartition::standard_psi(5.0 / 6.0) == 0.0);
    CHECK(DyadicPartition::standard_psi(12.0 / 5.0) == 0.0);
    CHECK(DyadicPartition::standard_psi(3.0) == 0.0);
    CHECK(DyadicPartition::standard_psi(1.5) > 0.0);
  }

  TEST_CASE("at most two consecutive blocks contribute on [6/5, 5/3]") {
    for (int i = 0; i <= 2000; ++i) {
      const double r = 1.2 + (5.0 / 3.0 - 1.2) * i / 2000.0;
      std::vector<int> active;
      double sum = 0.0;
      for (int q = -6; q <= 6; ++q) {
        const double w = DyadicPartition::standard_psi(std::ldexp(r, -q));
        if (w > 0.0) active.push_back(q);
        sum += w;
      }
      REQUIRE(!active.empty());
      CHECK(active.size() <= 2u);
      if (active.size() == 2u) CHECK(active[1] == active[0] + 1);
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("profile is nonnegative and bounded by one") {
    for (int i = 0; i <= 4000; ++i) {
      const double r = 0.5 + 2.5 * i / 4000.0;
      const double v = DyadicPartition::standard_psi(r);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }

  TEST_CASE("partition of unity over the lattice") {
    const DyadicPartition p = build_partition(Grid::cube(2, 128, 8.0 * kTwoPi));
    CHECK(partition_of_unity_defect(p) <= 1e-12);
    CHECK(p.q_min() <= -3);
    CHECK(p.q_max() >= 3);
    const DyadicPartition p3 = build_partition(Grid::cube(3, 16, 3.0));
    CHECK(partition_of_unity_defect(p3) <= 1e-12);
  }

  TEST_CASE("corrupted profile breaks the partition check") {
    const Grid g = Grid::cube(2, 32);
    const DyadicPartition bad(g, [](double r) { return (r > 0.5 && r < 3.0) ? 0.6 : 0.0; });
    CHECK(partition_of_unity_defect(bad) > 0.1);
  }
}

TEST_SUITE("decompose") {
  TEST_CASE("single mode at |xi| = 2^q* touches blocks q*-1 and q* only") {
    const Grid g = Grid::cube(2, 64);
    const BlockSet b = decompose(fourier_mode(g, {4, 0, 0}), DyadicPartition(g));  // |ξ| = 4 = 2^2
    const double total = fourier_mode(g, {4, 0, 0}).l2_norm();
    double mass_sum = 0.0;
    for (int q = b.q_min; q <= b.q_max(); ++q) {
      if (q != 1 && q != 2) CHECK(b.masses.at(q) <= 1e-14 * total);
      mass_sum += b.masses.at(q);
    }
    CHECK(b.masses.at(2) > 0.0);
    // ψ(1) + ψ(2) = 1, so the (nonnegative) weights split the mass exactly.
    CHECK(mass_sum == doctest::Approx(total).epsilon(1e-12));
  }

  TEST_CASE("constant field has no blocks and no residual") {
    const Grid g = Grid::cube(3, 16);
    const BlockSet b = decompose(RealField::constant(g, 1.7), DyadicPartition(g));
    for (double m : b.masses.l2) CHECK(m == 0.0);
    CHECK(b.residual == 0.0);
    CHECK(b.mean == doctest::Approx(1.7));
  }

  TEST_CASE("blocks reconstruct the mean-free part") {
    const Grid g = Grid::cube(2, 64, 8.0 * kTwoPi);
    const DyadicPartition p(g);
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
      RealField f = random_field(g, rng);
      f += RealField::constant(g, 0.3);
      const BlockSet b = decompose(f, p);
      const RealField rec = transform_inverse(reconstruct(b));
      const RealField target = f - RealField::constant(g, f.mean());
      CHECK(rel_l2_diff(rec, target) <= 1e-10);
      CHECK(b.residual <= 1e-10 * f.l2_norm());
      // S_q f + Σ_{p>=q} Δ_p f
      for (int q : {b.q_min + 1, 0, b.q_max()}) {
        Spectrum acc = low_frequency_cutoff(b, q);
        for (int pq = q; pq <= b.q_max(); ++pq) acc += b.block(pq);
        CHECK(rel_l2_diff(transform_inverse(acc), target) <= 1e-10);
      }
    }
  }

  TEST_CASE("block spectra stay inside their annulus and obey Bernstein") {
    const Grid g = Grid::cube(3, 32, 4.0 * kTwoPi);
    const DyadicPartition p(g);
    Rng rng(43);
    const Spectrum s = transform_forward(random_field(g, rng, Band{0.0, 1e300, false}));
    const BlockSet b = decompose(s, p);
    const auto& r = g.lattice().xi_norm;
    for (int q = b.q_min; q <= b.q_max(); ++q) {
      const Spectrum& blk = b.block(q);
      for (std::size_t m = 0; m < blk.size(); ++m)
        if (blk[m] != Complex{}) {
          CHECK(r[m] > std::ldexp(DyadicPartition::kInner, q));
          CHECK(r[m] < std::ldexp(DyadicPartition::kOuter, q));
        }
      const double mass = blk.l2_norm();
      if (mass == 0.0) continue;
      const double ratio = lambda_pow(blk, 1.0).l2_norm() / mass;
      CHECK(ratio >= std::ldexp(5.0 / 6.0, q));
      CHECK(ratio <= std::ldexp(12.0 / 5.0, q));
    }
  }

  TEST_CASE("block_masses agrees with the materialised blocks") {
    const Grid g = Grid::cube(2, 32, 5.0);
    const DyadicPartition p(g);
    Rng rng(47);
    const Spectrum s = transform_forward(random_field(g, rng));
    const BlockSet b = decompose(s, p);
    const BlockMasses fast = block_masses(s, p);
    for (int q = b.q_min; q <= b.q_max(); ++q) CHECK(fast.at(q) == doctest::Approx(b.block(q).l2_norm()).epsilon(1e-12));
  }
}

TEST_SUITE("norms") {
  TEST_CASE("single-term sums") {
    BlockMasses m{-3, {0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0}};  // q = -3..3, unit mass at q = 2
    CHECK(besov_norm(m, 0.5) == doctest::Approx(2.0));
    CHECK(hybrid_norm(m, {0.5, 1.5, 0}) == doctest::Approx(8.0));
    BlockMasses low{-3, {0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0}};  // unit mass at q = -2
    CHECK(hybrid_norm(low, {0.5, 1.5, 0}) == doctest::Approx(0.5));
    CHECK(besov_norm(BlockMasses{-2, {0.0, 0.0, 0.0}}, 0.5) == 0.0);
  }

  TEST_CASE("phi exponent") {
    const HybridSpec spec{0.5, 1.5, 0};
    CHECK(phi_exponent(spec, 0) == 0.5);
    CHECK(phi_exponent(spec, -4) == 0.5);
    CHECK(phi_exponent(spec, 1) == 1.5);
    for (int q = -5; q <= 5; ++q) CHECK(phi_exponent({0.7, 0.7, 0}, q) == 0.7);
  }

  TEST_CASE("hybrid with s = t is the Besov norm; embedding and monotonicity") {
    const Grid g = Grid::cube(2, 64, 8.0 * kTwoPi);
    const DyadicPartition p(g);
    Rng rng(53);
    for (int trial = 0; trial < 20; ++trial) {
      const BlockMasses b = block_masses(transform_forward(random_field(g, rng)), p);
      for (double s : {-0.5, 0.5, 1.5}) CHECK(hybrid_norm(b, {s, s, 0}) == besov_norm(b, s));
      CHECK(hybrid_norm(b, {0.5, 1.5, 0}) >= besov_norm(b, 0.5));
    }
    // Per-block coefficient dominance for s1 <= s2, t1 >= t2.
    const HybridSpec big{0.5, 2.5, 0};
    const HybridSpec small{1.5, 1.5, 0};
    for (int q = -6; q <= 6; ++q) CHECK(std::exp2(q * phi_exponent(big, q)) >= std::exp2(q * phi_exponent(small, q)));
  }

  TEST_CASE("derivation bracket: |grad f|_{B^{s-1}} / |f|_{B^s} in [5/6, 12/5]") {
    const Grid g = Grid::cube(2, 64, 8.0 * kTwoPi);
    const DyadicPartition p(g);
    Rng rng(59);
    for (int trial = 0; trial < 20; ++trial) {
      const RealField f = random_field(g, rng);
      for (double s : {0.5, 1.5}) {
        const double ratio = besov_norm(grad(f), p, s - 1.0) / besov_norm(f, p, s);
        CHECK(ratio >= 5.0 / 6.0);
        CHECK(ratio <= 12.0 / 5.0);
      }
    }
  }
}

TEST_SUITE("scaling") {
  TEST_CASE("k = 0 is the identity") {
    const Grid g = Grid::cube(3, 16);
    Rng rng(61);
    const RealField f = random_field(g, rng);
    const RealField s = scaling_transform(f, 0, 1);
    CHECK(s.grid() == g);
    CHECK(nemalab::testing::max_abs_diff(s, f) == 0.0);
  }

  TEST_CASE("critical norms are preserved in 3D") {
    const Grid g = Grid::cube(3, 32, 8.0 * kTwoPi);
    Rng rng(67);
    const VectorField u = random_vector_field(g, 3, rng);
    const VectorField su = scaling_transform(u, 1, 1);
    const double before = besov_norm(u, DyadicPartition(g), 0.5);
    const double after = besov_norm(su, DyadicPartition(su.grid()), 0.5);
    CHECK(std::abs(after - before) <= 1e-10 * before);

    const RealField a = random_field(g, rng);
    const RealField sa = scaling_transform(a, 1, 0);
    const double a0 = besov_norm(a, DyadicPartition(g), 1.5);
    const double a1 = besov_norm(sa, DyadicPartition(sa.grid()), 1.5);
    CHECK(std::abs(a1 - a0) <= 1e-10 * a0);
  }

  TEST_CASE("non-dyadic factors are rejected") {
    const Grid g = Grid::cube(2, 16);
    const RealField f = RealField::constant(g, 1.0);
    CHECK_THROWS_AS(scaling_transform(f, 3.0, 1), std::invalid_argument);
    CHECK_NOTHROW(scaling_transform(f, 4.0, 1));
    CHECK(scaling_transform(f, 0.5, 1).grid().period(0) == doctest::Approx(2.0 * kTwoPi));
  }
}

TEST_SUITE("product estimate") {
  TEST_CASE("constant factor gives ratio one") {
    const Grid g = Grid::cube(2, 32, 4.0 * kTwoPi);
    Rng rng(71);
    const RealField f = random_field(g, rng);
    const RealField c = RealField::constant(g, -2.0);
    const HybridSpec spec{0.5, 1.5, 0};
    const ProductEstimate e = product_estimate_report(f, c, spec);
    CHECK(e.lhs == doctest::Approx(2.0 * hybrid_norm(f, DyadicPartition(g), spec)).epsilon(1e-10));
    CHECK(e.ratio == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("symmetric right-hand side for f = g") {
    const Grid g = Grid::cube(2, 32, 4.0 * kTwoPi);
    Rng rng(73);
    const RealField f = random_field(g, rng);
    const HybridSpec spec{0.5, 1.5, 0};
    const ProductEstimate e = product_estimate_report(f, f, spec);
    const RealField fine = transform_inverse(pad(transform_forward(f), 2));
    CHECK(e.rhs == doctest::Approx(2.0 * fine.max_abs() * hybrid_norm(f, DyadicPartition(g), spec)).epsilon(1e-12));
    CHECK(std::isfinite(e.ratio));
  }
}

TEST_SUITE("report") {
  TEST_CASE("spectrum csv rows") {
    const std::string csv = spectrum_report_csv(BlockMasses{-1, {1.0, 2.0}}, 1.0);
    CHECK(csv.find("q,block_L2,weighted_block_L2") == 0u);
    CHECK(csv.find("-1,1,0.5") != std::string::npos);
    CHECK(csv.find("0,2,2") != std::string::npos);
  }
}
