#include <cmath>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "nemalab/field_io.hpp"
#include "nemalab/helmholtz.hpp"
#include "nemalab/random_fields.hpp"
#include "nemalab/spectral.hpp"
#include "test_util.hpp"

using namespace nemalab;
using nemalab::testing::coefficient_at;
using nemalab::testing::max_abs_diff;
using nemalab::testing::rel_l2_diff;

TEST_SUITE("grid") {
  TEST_CASE("rejects non power-of-two and tiny sizes") {
    CHECK_THROWS_AS(Grid::cube(2, 12), std::invalid_argument);
    CHECK_THROWS_AS(Grid::cube(2, 4), std::invalid_argument);
    CHECK_THROWS_AS(Grid::cube(4, 16), std::invalid_argument);
    CHECK_NOTHROW(Grid::cube(3, 8));
  }

  TEST_CASE("lattice frequencies and Nyquist tracking") {
    const Grid g = Grid::cube(2, 16, 4.0 * kTwoPi);
    CHECK(g.mode_count() == 16u * 9u);
    CHECK(g.min_xi() == doctest::Approx(0.25));
    CHECK(g.nyquist_xi() == doctest::Approx(2.0));
    std::size_t nyquist_modes = 0;
    for (auto flag : g.lattice().nyquist) nyquist_modes += flag ? 1 : 0;
    // Row k0 = 8 (9 entries) plus column k1 = 8 (16 entries), shared corner.
    CHECK(nyquist_modes == 9u + 16u - 1u);
  }
}

TEST_SUITE("transform") {
  TEST_CASE("constant field maps to the zero mode only") {
    const Grid g = Grid::cube(3, 8);
    const Spectrum s = transform_forward(RealField::constant(g, 2.5));
    CHECK(s.zero_mode().real() == doctest::Approx(2.5));
    CHECK(s.support_count(1e-14) == 1u);
  }

  TEST_CASE("single harmonic has exactly two nonzero modes") {
    const Grid g = Grid::cube(3, 16);
    const Spectrum s = transform_forward(fourier_mode(g, {1, 0, 0}));
    CHECK(s.support_count(1e-14) == 2u);
    CHECK(std::abs(coefficient_at(s, {1, 0, 0}) - Complex(0.5, 0.0)) < 1e-15);
    CHECK(std::abs(coefficient_at(s, {-1, 0, 0}) - Complex(0.5, 0.0)) < 1e-15);
  }

  TEST_CASE("round trip, Parseval and Hermitian symmetry on random fields") {
    Rng rng(7);
    for (int dim : {2, 3}) {
      const Grid g = dim == 2 ? Grid::cube(2, 32, 3.0) : Grid::cube(3, 16, 5.0);
      std::normal_distribution<double> normal;
      for (int trial = 0; trial < 50; ++trial) {
        RealField f(g);
        for (auto& v : f.values()) v = normal(rng);
        const Spectrum s = transform_forward(f);
        const RealField back = transform_inverse(s);
        CHECK(rel_l2_diff(back, f) < 1e-12);
        // Direct quadrature against the weighted coefficient sum.
        double quad = 0.0;
        for (double v : f.values()) quad += v * v;
        quad *= g.volume() / static_cast<double>(g.point_count());
        CHECK(std::abs(s.l2_norm() * s.l2_norm() - quad) <= 1e-12 * quad);
        CHECK(s.hermitian_defect() < 1e-12);
      }
    }
  }

  TEST_CASE("non-finite samples are rejected") {
    const Grid g = Grid::cube(2, 8);
    RealField f(g);
    f[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(transform_forward(f), std::invalid_argument);
  }
}

TEST_SUITE("multipliers") {
  TEST_CASE("lambda_pow on single modes") {
    const Grid g = Grid::cube(3, 16);
    const Spectrum unit = transform_forward(fourier_mode(g, {0, 1, 0}));
    for (double order : {-2.0, -0.5, 0.5, 3.0}) {
      const Spectrum p = lambda_pow(unit, order);
      CHECK(std::abs(coefficient_at(p, {0, 1, 0}) - coefficient_at(unit, {0, 1, 0})) < 1e-15);
    }
    const Spectrum five = lambda_pow(transform_forward(fourier_mode(g, {3, 4, 0})), 1.0);
    CHECK(std::abs(coefficient_at(five, {3, 4, 0}) - Complex(2.5, 0.0)) < 1e-13);
  }

  TEST_CASE("lambda_pow zero mode policy and identity for order 0") {
    const Grid g = Grid::cube(2, 16);
    Rng rng(3);
    RealField f = random_field(g, rng);
    f += RealField::constant(g, 4.0);
    const Spectrum s = transform_forward(f);
    CHECK(lambda_pow(s, 0.0).zero_mode() == s.zero_mode());
    CHECK(std::abs(lambda_pow(s, -1.0).zero_mode()) == 0.0);
    CHECK(std::abs(lambda_pow(s, 2.0).zero_mode()) == 0.0);
  }

  TEST_CASE("Λ^s Λ^{-s} is the identity on mean-free fields") {
    const Grid g = Grid::cube(3, 16, 7.0);
    Rng rng(11);
    const Spectrum s = transform_forward(random_field(g, rng, Band{0.0, 1e300, false}));
    for (double order : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
      const Spectrum back = lambda_pow(lambda_pow(s, order), -order);
      CHECK((back - s).l2_norm() <= 1e-12 * s.l2_norm());
    }
  }

  TEST_CASE("derivative zeroes the Nyquist plane") {
    const Grid g = Grid::cube(2, 8);
    const RealField nyq = fourier_mode(g, {4, 0, 0});
    CHECK(transform_inverse(derivative(transform_forward(nyq), 0)).max_abs() == 0.0);
  }
}

TEST_SUITE("dealias") {
  TEST_CASE("idempotent and leaves band-limited input unchanged") {
    const Grid g = Grid::cube(2, 64);
    Rng rng(5);
    const Spectrum s = dealias(transform_forward(random_field(g, rng)));
    const Spectrum d = dealias(s);
    CHECK((d - s).l2_norm() == 0.0);
    CHECK((dealias(d) - d).l2_norm() == 0.0);
  }

  TEST_CASE("retained count matches lattice enumeration") {
    for (int dim : {2, 3}) {
      const int n = dim == 2 ? 64 : 32;
      const Grid g = Grid::cube(dim, n);
      // Enumerate the full integer lattice k_a in [-n/2, n/2).
      const double cut = (2.0 / 3.0) * n / 2.0;
      std::size_t count = 0;
      const int zrange = dim == 3 ? n : 1;
      for (int i = -n / 2; i < n / 2; ++i)
        for (int j = -n / 2; j < n / 2; ++j)
          for (int l = (dim == 3 ? -n / 2 : 0); l < (dim == 3 ? -n / 2 + zrange : 1); ++l)
            if (std::abs(i) <= cut && std::abs(j) <= cut && std::abs(l) <= cut) ++count;
      CHECK(dealias_retained_count(g) == count);
      // Full-spectrum noise keeps exactly that many modes.
      Rng rng(9);
      std::normal_distribution<double> normal;
      RealField noise(g);
      for (auto& v : noise.values()) v = normal(rng);
      CHECK(dealias(transform_forward(noise)).support_count(0.0) == count);
    }
    CHECK(dealias_retained_count(Grid::cube(2, 64)) == 43u * 43u);
  }

  TEST_CASE("dealiased product equals the exact padded product") {
    const Grid g = Grid::cube(2, 32);
    Rng rng(13);
    const RealField f = random_field(g, rng);
    const RealField h = random_field(g, rng);
    const Spectrum aliased = dealias(transform_forward(pointwise_product(f, h)));
    const Spectrum exact = transform_forward(exact_product(f, h));
    const auto& lat = g.lattice();
    double worst = 0.0;
    for (std::size_t m = 0; m < aliased.size(); ++m) {
      if (aliased[m] == Complex{}) continue;
      worst = std::max(worst, std::abs(aliased[m] - coefficient_at(exact, lat.wavenumber[m])));
    }
    CHECK(worst < 1e-12 * exact.l2_norm());
  }
}

TEST_SUITE("differential operators") {
  TEST_CASE("gradient of a constant vanishes") {
    const Grid g = Grid::cube(3, 8);
    const VectorField gr = grad(RealField::constant(g, 3.0));
    for (int a = 0; a < 3; ++a) CHECK(gr[a].max_abs() == 0.0);
  }

  TEST_CASE("curl of a gradient vanishes") {
    const Grid g = Grid::cube(3, 16, 9.0);
    Rng rng(17);
    const RealField f = random_field(g, rng);
    const MatrixField c = curl_mat(grad(f));
    CHECK(c.l2_norm() < 1e-12 * grad(f).l2_norm());
    CHECK(curl_mat(grad(f)).antisymmetry_defect() < 1e-12);
  }

  TEST_CASE("divergence of the rotational part vanishes") {
    Rng rng(19);
    for (int dim : {2, 3}) {
      const Grid g = Grid::cube(dim, 16, 6.0);
      for (int trial = 0; trial < 20; ++trial) {
        const VectorField v = random_vector_field(g, dim, rng);
        const auto parts = helmholtz_decompose(v);
        const VectorField solenoidal = helmholtz_recompose(RealField(g), parts.omega);
        CHECK(div(solenoidal).l2_norm() <= 1e-12 * v.l2_norm());
      }
    }
  }
}

TEST_SUITE("helmholtz") {
  TEST_CASE("gradient field with |ξ| = 1 gives Ω = 0 and h = -φ") {
    const Grid g = Grid::cube(3, 16);
    const RealField phi = fourier_mode(g, {0, 0, 1}, 0.7, 0.3);
    const auto parts = helmholtz_decompose(grad(phi));
    CHECK(parts.omega.l2_norm() < 1e-13);
    CHECK(max_abs_diff(parts.h, -1.0 * phi) < 1e-13);
  }

  TEST_CASE("divergence-free field has h = 0") {
    const Grid g = Grid::cube(2, 16);
    // u = (∂_2 ψ, −∂_1 ψ)
    Rng rng(23);
    const RealField psi = random_field(g, rng);
    const VectorField gp = grad(psi);
    VectorField u(std::vector<RealField>{gp[1], -1.0 * gp[0]});
    CHECK(helmholtz_decompose(u).h.l2_norm() < 1e-12 * u.l2_norm());
  }

  TEST_CASE("zero input recomposes to zero") {
    const Grid g = Grid::cube(3, 8);
    const VectorField u = helmholtz_recompose(RealField(g), MatrixField(g, 3, 3));
    CHECK(u.l2_norm() == 0.0);
  }

  TEST_CASE("round trip on random, gradient and solenoidal fields") {
    Rng rng(29);
    for (int dim : {2, 3}) {
      const Grid g = Grid::cube(dim, 16, 10.0);
      for (int trial = 0; trial < 20; ++trial) {
        const VectorField u = random_vector_field(g, dim, rng);
        const auto parts = helmholtz_decompose(u);
        CHECK(rel_l2_diff(helmholtz_recompose(parts.h, parts.omega), u) < 1e-10);
        CHECK(parts.omega.antisymmetry_defect() < 1e-12);
        CHECK(std::abs(parts.h.mean()) < 1e-14);
      }
      const VectorField gradient = grad(random_field(g, rng));
      const auto gp = helmholtz_decompose(gradient);
      CHECK(rel_l2_diff(helmholtz_recompose(gp.h, gp.omega), gradient) < 1e-10);
      const VectorField v = random_vector_field(g, dim, rng);
      const VectorField sol = helmholtz_recompose(RealField(g), helmholtz_decompose(v).omega);
      const auto sp = helmholtz_decompose(sol);
      CHECK(rel_l2_diff(helmholtz_recompose(sp.h, sp.omega), sol) < 1e-10);
    }
  }
}

TEST_SUITE("field io") {
  TEST_CASE("snapshot round trip is exact") {
    const Grid g(3, {8, 16, 8}, {1.0, 2.0, 3.0});
    Rng rng(31);
    const RealField f = random_field(g, rng).with_role(FieldRole::vector_component);
    const auto path = std::filesystem::temp_directory_path() / "nemalab_field_io_test.bin";
    write_field(path, f);
    const RealField back = read_field(path);
    CHECK(back.grid() == g);
    CHECK(back.role() == FieldRole::vector_component);
    CHECK(max_abs_diff(back, f) == 0.0);
    std::filesystem::remove(path);
  }

  TEST_CASE("missing file is reported") {
    CHECK_THROWS(read_field("/nonexistent/nemalab/field.bin"));
  }
}
