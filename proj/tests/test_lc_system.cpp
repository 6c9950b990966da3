#include <cmath>

#include "doctest.h"
#include "nemalab/helmholtz.hpp"
#include "nemalab/lc_system.hpp"
#include "nemalab/random_fields.hpp"
#include "nemalab/spectral.hpp"
#include "test_util.hpp"

using namespace nemalab;
using nemalab::testing::max_abs_diff;
using nemalab::testing::perturbed_director;
using nemalab::testing::random_small_state;
using nemalab::testing::rel_l2_diff;

namespace {

// Fourth-order periodic central difference along `axis`.
RealField fd_derivative(const RealField& f, int axis) {
  const Grid& g = f.grid();
  const auto& n = g.sizes();
  const double h = g.spacing(axis);
  std::array<std::size_t, 3> stride{static_cast<std::size_t>(n[1]) * n[2], static_cast<std::size_t>(n[2]), 1};
  RealField out(g, f.role());
  for (int i0 = 0; i0 < n[0]; ++i0)
    for (int i1 = 0; i1 < n[1]; ++i1)
      for (int i2 = 0; i2 < n[2]; ++i2) {
        std::array<int, 3> idx{i0, i1, i2};
        auto at = [&](int shift) {
          auto j = idx;
          j[axis] = ((j[axis] + shift) % n[axis] + n[axis]) % n[axis];
          return f[j[0] * stride[0] + j[1] * stride[1] + j[2] * stride[2]];
        };
        out[i0 * stride[0] + i1 * stride[1] + i2 * stride[2]] =
            (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
      }
  return out;
}

// 𝒩 assembled entirely from finite differences, no dealiasing.
VectorField fd_nonlinear_N(const LCState& s, const LCParams& p) {
  const Grid& g = s.grid();
  const int dim = g.dim();
  std::vector<std::vector<RealField>> du(dim), dd(3);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) du[i].push_back(fd_derivative(s.u[i], j));
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < dim; ++j) dd[k].push_back(fd_derivative(s.d[k], j));
  RealField divu(g);
  for (int i = 0; i < dim; ++i) divu += du[i][i];
  std::vector<RealField> grad_div;
  for (int i = 0; i < dim; ++i) grad_div.push_back(fd_derivative(divu, i));
  RealField g2(g);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < dim; ++j) g2 += pointwise_product(dd[k][j], dd[k][j]);
  // Stress S_ij and its row divergence.
  std::vector<RealField> div_s(dim, RealField(g));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      RealField sij(g);
      for (int k = 0; k < 3; ++k) sij += pointwise_product(dd[k][i], dd[k][j]);
      if (i == j) sij -= 0.5 * g2;
      div_s[i] += fd_derivative(sij, j);
    }
  VectorField out(g, dim);
  for (int i = 0; i < dim; ++i) {
    RealField lap(g);
    for (int j = 0; j < dim; ++j) lap += fd_derivative(du[i][j], j);
    for (std::size_t x = 0; x < g.point_count(); ++x) {
      double adv = 0.0;
      for (int j = 0; j < dim; ++j) adv += s.u[j][x] * du[i][j][x];
      const double au = p.mu * lap[x] + (p.lambda + p.mu) * grad_div[i][x];
      const double rho = s.rho[x];
      out[i][x] = -adv - ((rho - 1.0) / rho) * au - p.xi_c * div_s[i][x] / rho;
    }
  }
  return out;
}

double rel_diff(const Spectrum& a, const Spectrum& b, double scale) { return (a - b).l2_norm() / scale; }

}  // namespace

TEST_SUITE("params") {
  TEST_CASE("validation") {
    LCParams p;
    CHECK_NOTHROW(p.validate());
    p.mu = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.mu = 1.0;
    p.lambda = -0.7;  // 2μ + 3λ < 0
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.lambda = -2.0 / 3.0;
    CHECK_NOTHROW(p.validate());
  }

  TEST_CASE("nu bounded below by 4/3 mu on admissible parameters") {
    Rng rng(3);
    std::uniform_real_distribution<double> U(0.01, 5.0);
    for (int t = 0; t < 200; ++t) {
      LCParams p;
      p.mu = U(rng);
      p.lambda = -2.0 * p.mu / 3.0 + U(rng) - 0.01;
      p.validate();
      CHECK(p.nu() >= 4.0 / 3.0 * p.mu - 1e-14);
    }
  }

  TEST_CASE("equilibrium director must be unit") {
    Equilibrium e;
    CHECK_NOTHROW(e.validate());
    e.d_hat = {1.0, 1.0, 0.0};
    CHECK_THROWS_AS(e.validate(), ConfigError);
  }
}

TEST_SUITE("pressure") {
  TEST_CASE("quadratic law values") {
    const Grid g = Grid::cube(2, 8);
    CHECK(pressure(RealField::constant(g, 1.0)).max() == 0.5);
    CHECK(pressure(RealField::constant(g, 2.0)).min() == 2.0);
    CHECK(dpressure(RealField::constant(g, 3.0)).max() == 3.0);
    CHECK_THROWS_AS(pressure(RealField::constant(g, 0.0)), SolverBreakdown);
    CHECK_THROWS_AS(dpressure(RealField::constant(g, -1.0)), SolverBreakdown);
  }

  TEST_CASE("(1/rho) grad P is curl free") {
    const Grid g = Grid::cube(3, 16);
    Rng rng(11);
    RealField rho = random_field(g, rng, {0.0, 3.0});
    rho *= 2.0;
    rho += RealField::constant(g, 1.0);
    REQUIRE(rho.min() > 0.2);
    const VectorField gp = grad(pressure(rho));
    VectorField f(g, 3);
    for (int i = 0; i < 3; ++i) f[i] = RealField(g, std::vector<double>(gp[i].values().begin(), gp[i].values().end()));
    for (int i = 0; i < 3; ++i)
      for (std::size_t x = 0; x < g.point_count(); ++x) f[i][x] /= rho[x];
    const MatrixField c = curl_mat(f);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) worst = std::max(worst, c(i, j).max_abs());
    CHECK(worst <= 1e-10);
  }
}

TEST_SUITE("stress") {
  TEST_CASE("constant director carries no stress") {
    const Grid g = Grid::cube(2, 16);
    const LCState eq = Equilibrium{}.state(g);
    const MatrixField s = ericksen_stress(eq.d);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(s(i, j).max_abs() == 0.0);
    CHECK(stress_div(eq.d).l2_norm() == 0.0);
  }

  TEST_CASE("trace of the gradient Gram matrix") {
    const Grid g = Grid::cube(3, 16);
    Rng rng(5);
    const VectorField d = perturbed_director(g, rng, 0.3, {0.0, 3.0});
    const MatrixField gram = gradient_gram(d);
    RealField trace = gram(0, 0) + gram(1, 1) + gram(2, 2);
    RealField g2(g);
    for (int k = 0; k < 3; ++k) {
      const VectorField gk = grad(d[k]);
      for (int j = 0; j < 3; ++j) g2 += pointwise_product(gk[j], gk[j]);
    }
    CHECK(max_abs_diff(trace, g2) <= 1e-12);
  }

  TEST_CASE("planar twist closed form") {
    const Grid g = Grid::cube(3, 16);
    const double alpha = 3.0;
    VectorField d(g, 3);
    d[0] = RealField::sample(g, [&](const auto& x) { return std::cos(alpha * x[0]); });
    d[1] = RealField::sample(g, [&](const auto& x) { return std::sin(alpha * x[0]); });
    const MatrixField gram = gradient_gram(d);
    const MatrixField s = ericksen_stress(d);
    const double a2 = alpha * alpha;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double gram_ref = (i == 0 && j == 0) ? a2 : 0.0;
        const double s_ref = gram_ref - (i == j ? 0.5 * a2 : 0.0);
        CHECK(max_abs_diff(gram(i, j), RealField::constant(g, gram_ref)) <= 1e-12);
        CHECK(max_abs_diff(s(i, j), RealField::constant(g, s_ref)) <= 1e-12);
      }
    CHECK(stress_div(d).l2_norm() <= 1e-11);
  }
}

TEST_SUITE("operator_A") {
  const Grid g = Grid::cube(2, 16);
  const double xi2 = 2.0 * 2.0 + 1.0 * 1.0;  // k = (2, 1)

  TEST_CASE("divergence-free mode") {
    LCParams p;
    // u = (k1, -k0) sin(k·x) is solenoidal.
    VectorField u(g, 2);
    u[0] = RealField::sample(g, [](const auto& x) { return 1.0 * std::sin(2 * x[0] + x[1]); });
    u[1] = RealField::sample(g, [](const auto& x) { return -2.0 * std::sin(2 * x[0] + x[1]); });
    VectorField expected = -xi2 * p.mu * u;
    CHECK(rel_l2_diff(operator_A(u, p), expected) <= 1e-12);
  }

  TEST_CASE("gradient mode") {
    LCParams p;
    p.mu = 0.7;
    p.lambda = 0.4;
    VectorField u(g, 2);
    u[0] = RealField::sample(g, [](const auto& x) { return 2.0 * std::cos(2 * x[0] + x[1]); });
    u[1] = RealField::sample(g, [](const auto& x) { return 1.0 * std::cos(2 * x[0] + x[1]); });
    VectorField expected = -xi2 * p.nu() * u;
    CHECK(rel_l2_diff(operator_A(u, p), expected) <= 1e-12);
  }

  TEST_CASE("lambda + mu = 0 reduces to mu Laplacian") {
    LCParams p;
    p.mu = 0.5;
    p.lambda = -0.5;
    Rng rng(2);
    const VectorField u = random_vector_field(g, 2, rng);
    VectorField lap(g, 2);
    for (int i = 0; i < 2; ++i) lap[i] = p.mu * transform_inverse(laplacian(transform_forward(u[i])));
    CHECK(rel_l2_diff(operator_A(u, p), lap) <= 1e-14);
  }
}

TEST_SUITE("nonlinearity") {
  TEST_CASE("unit density and constant director leave pure advection") {
    const Grid g = Grid::cube(2, 32);
    Rng rng(8);
    LCState s = Equilibrium{}.state(g);
    s.u = random_vector_field(g, 2, rng, {0.0, 4.0});
    const VectorField n = nonlinear_N(s, LCParams{});
    VectorField adv(g, 2);
    for (int i = 0; i < 2; ++i) {
      const VectorField gu = grad(s.u[i]);
      RealField a = pointwise_product(s.u[0], gu[0]) + pointwise_product(s.u[1], gu[1]);
      adv[i] = -1.0 * transform_inverse(dealias(transform_forward(a)));
    }
    CHECK(rel_l2_diff(n, adv) <= 1e-12);
  }

  TEST_CASE("static unit-density state gives minus the stress divergence") {
    const Grid g = Grid::cube(2, 32);
    Rng rng(9);
    LCState s = Equilibrium{}.state(g);
    s.d = perturbed_director(g, rng, 0.2, {0.0, 4.0});
    const VectorField n = nonlinear_N(s, LCParams{});
    CHECK(rel_l2_diff(n, -1.0 * stress_div(s.d)) <= 1e-12);
  }

  TEST_CASE("matches a fourth-order finite-difference evaluation") {
    const Grid g = Grid::cube(2, 128);
    Rng rng(21);
    LCParams p;
    p.mu = 0.8;
    p.lambda = 0.3;
    const LCState s = random_small_state(g, rng, 0.05, {0.0, 3.2});
    const VectorField spectral = nonlinear_N(s, p);
    const VectorField fd = fd_nonlinear_N(s, p);
    const double rel = rel_l2_diff(spectral, fd);
    MESSAGE("spectral vs finite-difference relative difference: " << rel);
    CHECK(rel <= 1e-4);
  }

  TEST_CASE("density floor breach raises a breakdown") {
    const Grid g = Grid::cube(2, 16);
    LCState s = Equilibrium{}.state(g);
    s.rho[5] = 0.05;
    CHECK_THROWS_AS(nonlinear_N(s, LCParams{}), SolverBreakdown);
    try {
      nonlinear_N(s, LCParams{});
    } catch (const SolverBreakdown& e) {
      CHECK(e.kind() == SolverBreakdown::Kind::density_floor);
    }
  }

  TEST_CASE("director enters only through its gradient") {
    const Grid g = Grid::cube(3, 16);
    Rng rng(4);
    const LCState s = random_small_state(g, rng, 0.1);
    const std::array<double, 3> d_hat{0.0, 0.0, 1.0};
    RealField a = s.rho - RealField::constant(g, 1.0);
    const auto u = forward_all(s.u.components());
    const auto d = forward_all(s.d.components());
    auto shifted = d;
    for (int k = 0; k < 3; ++k) shifted[k][0] -= d_hat[k];
    const auto n1 = nonlinear_N_spectral(a, u, d, LCParams{});
    const auto n2 = nonlinear_N_spectral(a, u, shifted, LCParams{});
    bool identical = true;
    for (int i = 0; i < 3; ++i)
      for (std::size_t m = 0; m < n1[i].size(); ++m) identical = identical && n1[i][m] == n2[i][m];
    CHECK(identical);
  }
}

TEST_SUITE("rhs") {
  TEST_CASE("equilibrium is a fixed point of both formulations") {
    for (int dim : {2, 3}) {
      const Grid g = Grid::cube(dim, 16);
      Equilibrium e;
      e.d_hat = {0.6, 0.0, 0.8};
      const LCState f = rhs_full(e.state(g), LCParams{});
      CHECK(f.rho.max_abs() == 0.0);
      CHECK(f.u.l2_norm() == 0.0);
      CHECK(f.d.l2_norm() == 0.0);
      const ReformState r = rhs_reformulated(e.reform(g), LCParams{});
      CHECK(r.a.max_abs() == 0.0);
      CHECK(r.h.max_abs() == 0.0);
      CHECK(r.omega.l2_norm() == 0.0);
      CHECK(r.d.l2_norm() == 0.0);
    }
  }

  TEST_CASE("resting unit-density fluid reduces to harmonic map heat flow") {
    const Grid g = Grid::cube(2, 32);
    Rng rng(12);
    LCState s = Equilibrium{}.state(g);
    s.d = perturbed_director(g, rng, 0.3, {0.0, 4.0});
    const LCState f = rhs_full(s, LCParams{});
    for (int k = 0; k < 3; ++k) {
      const Spectrum dk = transform_forward(s.d[k]);
      RealField g2(g);
      for (int m = 0; m < 3; ++m) {
        const VectorField gm = grad(s.d[m]);
        for (const auto& c : gm.components()) g2 += pointwise_product(c, c);
      }
      const RealField expected =
          transform_inverse(laplacian(dk)) + transform_inverse(dealias(transform_forward(pointwise_product(g2, s.d[k]))));
      CHECK(max_abs_diff(f.d[k], expected) <= 1e-12);
    }
    CHECK(f.rho.max_abs() == 0.0);
  }

  TEST_CASE("continuity equation conserves mass") {
    for (int dim : {2, 3}) {
      const Grid g = Grid::cube(dim, 16, 3.0);
      Rng rng(30 + dim);
      for (int t = 0; t < 5; ++t) {
        const LCState s = random_small_state(g, rng, 0.2);
        const LCState f = rhs_full(s, LCParams{});
        CHECK(std::abs(f.rho.mean()) * g.volume() <= 1e-12);
        const ReformState r = rhs_reformulated(state_to_reform(s), LCParams{});
        CHECK(std::abs(r.a.mean()) * g.volume() <= 1e-12);
      }
    }
  }

  TEST_CASE("full and reformulated systems agree") {
    for (int dim : {2, 3}) {
      const Grid g = Grid::cube(dim, dim == 2 ? 32 : 16, 4.0);
      Rng rng(40 + dim);
      LCParams p;
      p.mu = 0.9;
      p.lambda = 0.5;
      double worst = 0.0;
      for (int t = 0; t < 10; ++t) {
        const LCState s = random_small_state(g, rng, 0.05);
        const LCState f = rhs_full(s, p);
        const ReformState rs = state_to_reform(s);
        const ReformSpectra ref = to_spectra(rhs_reformulated(rs, p));
        const auto du = forward_all(f.u.components());
        const Spectrum dh = potential_part(du);
        const auto domega = rotational_part(du);
        const double scale_h = std::max(ref.h.l2_norm(), 1e-300);
        worst = std::max(worst, rel_diff(transform_forward(f.rho), ref.a, std::max(ref.a.l2_norm(), 1e-300)));
        worst = std::max(worst, rel_diff(dh, ref.h, scale_h));
        double om = 0.0, om_ref = 0.0;
        for (std::size_t i = 0; i < domega.size(); ++i) {
          om += std::pow((domega[i] - ref.omega[i]).l2_norm(), 2);
          om_ref += std::pow(ref.omega[i].l2_norm(), 2);
        }
        worst = std::max(worst, std::sqrt(om / om_ref));
        for (int k = 0; k < 3; ++k)
          worst = std::max(worst, rel_diff(transform_forward(f.d[k]), ref.d[k], std::max(ref.d[k].l2_norm(), 1e-300)));
      }
      MESSAGE("dim " << dim << " worst cross-formulation relative difference: " << worst);
      CHECK(worst <= 1e-8);
    }
  }

  TEST_CASE("quiescent undisturbed density: stress drives h, director heat flow") {
    const Grid g = Grid::cube(2, 32);
    Rng rng(13);
    ReformState r = Equilibrium{}.reform(g);
    r.d = perturbed_director(g, rng, 0.2, {0.0, 4.0});
    const ReformState f = rhs_reformulated(r, LCParams{});
    const auto sd = forward_all(stress_div(r.d).components());
    std::vector<Spectrum> minus_sd;
    for (const auto& s : sd) minus_sd.push_back(Complex(-1.0) * s);
    CHECK(rel_l2_diff(f.h, transform_inverse(potential_part(minus_sd))) <= 1e-12);
    CHECK(f.a.max_abs() == 0.0);
  }

  TEST_CASE("sphere constraint is tangent to the relaxation flow") {
    const Grid g = Grid::cube(2, 64);
    Rng rng(14);
    const VectorField d = perturbed_director(g, rng, 0.3, {0.0, 3.0});
    RealField g2(g);
    std::vector<RealField> lap;
    for (int k = 0; k < 3; ++k) {
      const Spectrum dk = transform_forward(d[k]);
      lap.push_back(transform_inverse(laplacian(dk)));
      const VectorField gk = grad(d[k]);
      for (const auto& c : gk.components()) g2 += pointwise_product(c, c);
    }
    double integral = 0.0;
    for (std::size_t x = 0; x < g.point_count(); ++x) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += d[k][x] * (lap[k][x] + g2[x] * d[k][x]);
      integral += dot;
    }
    integral *= g.volume() / g.point_count();
    CHECK(std::abs(integral) <= 1e-8);
  }
}

TEST_SUITE("conversions") {
  TEST_CASE("round trip on random states") {
    for (int dim : {2, 3}) {
      const Grid g = Grid::cube(dim, 16, 5.0);
      Rng rng(50 + dim);
      for (int t = 0; t < 20; ++t) {
        const LCState s = random_small_state(g, rng, 0.1);
        const LCState back = reform_to_state(state_to_reform(s));
        CHECK(max_abs_diff(back.rho, s.rho) <= 1e-14);
        CHECK(rel_l2_diff(back.u, s.u) <= 1e-10);
        CHECK(rel_l2_diff(back.d, s.d) == 0.0);
      }
    }
  }

  TEST_CASE("equilibrium maps to zero reformulated fields") {
    const Grid g = Grid::cube(3, 8);
    const ReformState r = state_to_reform(Equilibrium{}.state(g));
    CHECK(r.a.max_abs() == 0.0);
    CHECK(r.h.max_abs() == 0.0);
    CHECK(r.omega.l2_norm() == 0.0);
    CHECK(r.d[2].min() == 1.0);
  }

  TEST_CASE("gradient velocity has no rotational part") {
    const Grid g = Grid::cube(3, 16);
    Rng rng(6);
    LCState s = Equilibrium{}.state(g);
    s.u = grad(random_field(g, rng));
    CHECK(state_to_reform(s).omega.l2_norm() <= 1e-13);
  }

  TEST_CASE("rejects vacuum") {
    const Grid g = Grid::cube(2, 8);
    ReformState r = Equilibrium{}.reform(g);
    r.a[3] = -1.0;
    CHECK_THROWS_AS(reform_to_state(r), std::invalid_argument);
    LCState s = Equilibrium{}.state(g);
    s.rho[0] = 0.0;
    CHECK_THROWS_AS(state_to_reform(s), std::invalid_argument);
  }
}

TEST_SUITE("energy") {
  TEST_CASE("equilibrium has zero energy") {
    const Grid g = Grid::cube(3, 8);
    CHECK(energy(Equilibrium{}.state(g), LCParams{}) == 0.0);
  }

  TEST_CASE("planar twist") {
    const Grid g = Grid::cube(3, 16);
    const double alpha = 2.0;
    LCState s = Equilibrium{}.state(g);
    s.d[0] = RealField::sample(g, [&](const auto& x) { return std::cos(alpha * x[0]); });
    s.d[1] = RealField::sample(g, [&](const auto& x) { return std::sin(alpha * x[0]); });
    s.d[2] = RealField(g);
    CHECK(energy(s, LCParams{}) == doctest::Approx(0.5 * alpha * alpha * g.volume()).epsilon(1e-12));
  }

  TEST_CASE("quadratic homogeneity at small amplitude") {
    const Grid g = Grid::cube(2, 32);
    Rng rng(15);
    const LCState base = random_small_state(g, rng, 1.0);
    auto scaled = [&](double eps) {
      LCState s = base;
      s.rho = RealField::constant(g, 1.0) + eps * (base.rho - RealField::constant(g, 1.0));
      s.u = eps * base.u;
      VectorField d(g, 3);
      for (std::size_t x = 0; x < g.point_count(); ++x) {
        const double c[3] = {eps * base.u[0][x], eps * base.u[1][x], 1.0};
        const double n = std::sqrt(c[0] * c[0] + c[1] * c[1] + 1.0);
        for (int k = 0; k < 3; ++k) d[k][x] = c[k] / n;
      }
      s.d = d;
      return energy(s, LCParams{});
    };
    const double e1 = scaled(1e-3), e2 = scaled(2e-3);
    CHECK(e1 > 0.0);
    CHECK(e2 / e1 == doctest::Approx(4.0).epsilon(1e-2));
  }
}
