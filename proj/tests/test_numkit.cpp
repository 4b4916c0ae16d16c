#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kgeom/numkit.hpp>

#include <cmath>

using namespace kgeom::num;

TEST_CASE("fd_gradient on simple fields") {
  // f(x) = x1^2 at x = 3: derivative 6
  auto sq = [](const Vec& x) { return x[0] * x[0]; };
  Vec g = fd_gradient(sq, {3.0}, 1e-4);
  CHECK(std::abs(g[0] - 6.0) < 1e-6);

  auto cst = [](const Vec&) { return 4.2; };
  Vec g0 = fd_gradient(cst, {1.0, -2.0, 0.5});
  for (double v : g0) CHECK(std::abs(v) < 1e-9);

  // f(y) = y(ln y - 1): f' = ln y
  auto f = [](const Vec& y) { return y[0] * (std::log(y[0]) - 1.0); };
  Vec g2 = fd_gradient(f, {2.0});
  CHECK(std::abs(g2[0] - std::log(2.0)) < 1e-8);
}

TEST_CASE("fd_gradient exact on degree <= 2 polynomials") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Vec a = rng.vec(3, -2, 2), x = rng.vec(3, -2, 2);
    Mat Q(3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) Q(i, j) = rng.uniform(-1, 1);
    auto poly = [&](const Vec& v) {
      double s = 0;
      for (int i = 0; i < 3; ++i) {
        s += a[i] * v[i];
        for (int j = 0; j < 3; ++j) s += 0.5 * Q(i, j) * v[i] * v[j];
      }
      return s;
    };
    Vec g = fd_gradient(poly, x);
    for (int i = 0; i < 3; ++i) {
      double exact = a[i];
      for (int j = 0; j < 3; ++j) exact += 0.5 * (Q(i, j) + Q(j, i)) * x[j];
      CHECK(std::abs(g[i] - exact) < 1e-9 * (1.0 + std::abs(exact)));
    }
  }
}

TEST_CASE("fd_ddbar basics") {
  // F = |z1|^2 -> [[1]]
  auto f1 = [](const CVec& z) { return std::norm(z[0]); };
  CMat d1m = fd_ddbar(f1, {cplx(0.7, -0.3)});
  CHECK(std::abs(d1m(0, 0) - cplx(1, 0)) < 1e-8);

  // F = |z1|^2 + |z2|^2 -> identity
  auto f2 = [](const CVec& z) { return std::norm(z[0]) + std::norm(z[1]); };
  CMat d2m = fd_ddbar(f2, {cplx(0.2, 0.4), cplx(-1.0, 0.1)});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(d2m(i, j) - (i == j ? cplx(1, 0) : cplx(0, 0))) < 1e-8);

  // F = (|z1|^2+|z2|^2)^(1/2) at (1,0): hand-computed complex Hessian.
  // With r = |z|, F = r: dF/dzi = conj(zi)/(2r),
  // d2F/dzi dzbarj = delta_ij/(2r) - zbar_i z_j/(4 r^3).
  auto f3 = [](const CVec& z) {
    return std::sqrt(std::norm(z[0]) + std::norm(z[1]));
  };
  CVec z0 = {cplx(1, 0), cplx(0, 0)};
  CMat d3m = fd_ddbar(f3, z0);
  CHECK(std::abs(d3m(0, 0) - cplx(0.25, 0)) < 1e-7);
  CHECK(std::abs(d3m(1, 1) - cplx(0.5, 0)) < 1e-7);
  CHECK(std::abs(d3m(0, 1)) < 1e-7);
}

TEST_CASE("fd_ddbar hermitian for smooth fields") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    CVec z = rng.cvec(3, -1.5, 1.5);
    auto f = [](const CVec& w) {
      double u = cnorm2(w);
      return std::log(1.0 + u) + 0.3 * u * u + (w[0] * std::conj(w[1])).real();
    };
    CMat d = fd_ddbar(f, z);
    CHECK(d.hermitian_defect() < 1e-8);
  }
}

TEST_CASE("quad_adaptive analytic integrands") {
  auto inv = [](double t) { return 1.0 / t; };
  CHECK(std::abs(quad_adaptive(inv, 1.0, 2.0, 1e-12) - std::log(2.0)) < 1e-10);

  // int_0^1 y^{n-1}/(y^n + 1) dy = (1/n) ln 2, here n = 2
  auto g = [](double y) { return y / (y * y + 1.0); };
  CHECK(std::abs(quad_adaptive(g, 0.0, 1.0, 1e-12) - 0.5 * std::log(2.0)) < 1e-10);

  auto lg = [](double y) { return std::log(y); };
  CHECK(std::abs(quad_adaptive(lg, 1.0, 2.0, 1e-12) - (2 * std::log(2.0) - 1.0)) < 1e-10);
}

TEST_CASE("quad_adaptive reports failure instead of silent inaccuracy") {
  // needle so sharp the interval budget cannot resolve it at this tolerance
  auto spike = [](double t) { return 1.0 / (1e-14 + (t - 0.318309886) * (t - 0.318309886)); };
  CHECK_THROWS_AS((void)quad_adaptive(spike, 0.0, 1.0, 1e-13, 8), ToleranceError);
}

TEST_CASE("invert_monotone") {
  auto cube = [](double y) { return y * y * y; };
  CHECK(std::abs(invert_monotone(cube, 8.0, 0.0, 3.0) - 2.0) < 1e-10);

  // g(y) = y sqrt(y + 3a/2), a = 1, forward value at y = 1
  double a = 1.0;
  auto g = [&](double y) { return y * std::sqrt(y + 1.5 * a); };
  double target = g(1.0);
  CHECK(std::abs(invert_monotone(g, target, 0.1, 5.0) - 1.0) < 1e-10);

  CHECK_THROWS_AS((void)invert_monotone(cube, 100.0, 0.0, 1.0), BracketError);
}

TEST_CASE("solve_cubic basic roots") {
  // y^3 - 1 = 0: roots 1, exp(+-2 pi i/3)
  auto r = solve_cubic(1, 0, 0, -1);
  int real_found = 0, cplx_found = 0;
  for (const auto& root : r) {
    if (std::abs(root.imag()) < 1e-12) {
      CHECK(std::abs(root.real() - 1.0) < 1e-12);
      ++real_found;
    } else {
      CHECK(std::abs(root.real() + 0.5) < 1e-12);
      CHECK(std::abs(std::abs(root.imag()) - std::sqrt(3.0) / 2) < 1e-12);
      ++cplx_found;
    }
  }
  CHECK(real_found == 1);
  CHECK(cplx_found == 2);
  CHECK(r[1] == std::conj(r[2]));  // exact conjugates

  // a1 = a2 = 0 reduces y^3 + 0 y^2 + 0 y - u^2: real root u^{2/3}
  double u = 2.37;
  double y = positive_cubic_root(1, 0, 0, -u * u);
  CHECK(std::abs(y - std::pow(u, 2.0 / 3.0)) < 1e-12);

  CHECK_THROWS_AS((void)solve_cubic(0, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("solve_cubic residuals over random draws") {
  Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    double c3 = rng.uniform(-5, 5);
    if (std::abs(c3) < 1e-3) c3 = 1.0;
    double c2 = rng.uniform(-5, 5), c1 = rng.uniform(-5, 5), c0 = rng.uniform(-5, 5);
    auto roots = solve_cubic(c3, c2, c1, c0);
    double cmax = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
    for (const auto& x : roots) {
      cplx p = ((c3 * x + c2) * x + c1) * x + c0;
      double bound = 1e-9 * cmax * (1.0 + std::pow(std::abs(x), 3.0));
      CHECK(std::abs(p) <= bound);
    }
    // coefficient reconstruction for a monic normalization
    cplx s1 = roots[0] + roots[1] + roots[2];
    cplx s2 = roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2];
    cplx s3 = roots[0] * roots[1] * roots[2];
    CHECK(std::abs(s1 + c2 / c3) < 1e-9 * (1 + std::abs(s1)) * 10);
    CHECK(std::abs(s2 - c1 / c3) < 1e-8 * (1 + std::abs(s2)) * 10);
    CHECK(std::abs(s3 + c0 / c3) < 1e-8 * (1 + std::abs(s3)) * 10);
  }
}

TEST_CASE("matrix det and inverse") {
  Mat I = Mat::identity(3);
  CHECK((I.inverse() - I).frobenius() < 1e-14);

  Mat D(2);
  D(0, 0) = 2;
  D(1, 1) = 4;
  CHECK(std::abs(D.det() - 8.0) < 1e-12);

  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    // random SPD = A^T A + I
    Mat A(3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) A(i, j) = rng.uniform(-1, 1);
    Mat S = A.transpose() * A + Mat::identity(3);
    Mat P = S * S.inverse();
    CHECK((P - Mat::identity(3)).frobenius() < 1e-10 * (1 + S.frobenius()));
  }

  Mat Z(2);  // singular
  Z(0, 0) = 1;
  Z(0, 1) = 2;
  Z(1, 0) = 2;
  Z(1, 1) = 4;
  CHECK_THROWS_AS((void)Z.inverse(), SingularMatrixError);
}

TEST_CASE("complex matrix inverse and hermitian eigenvalues") {
  Rng rng(9);
  CMat H(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j <= i; ++j) {
      cplx v(rng.uniform(-1, 1), i == j ? 0.0 : rng.uniform(-1, 1));
      H(i, j) = v;
      H(j, i) = std::conj(v);
    }
  // make positive definite
  CMat Hpd = H * H + CMat::identity(3);
  CHECK(Hpd.hermitian(1e-12));
  Vec ev = herm_eigenvalues(Hpd);
  CHECK(ev.front() >= 1.0 - 1e-9);
  CMat P = Hpd * Hpd.inverse();
  CHECK((P - CMat::identity(3)).frobenius() < 1e-10 * (1 + Hpd.frobenius()));
  // det consistency: product of eigenvalues
  double prod = 1;
  for (double e : ev) prod *= e;
  CHECK(std::abs(Hpd.det() - cplx(prod, 0)) < 1e-8 * prod);
}

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(Grid1D::uniform(0, 1, 4), std::invalid_argument);
  CHECK_THROWS_AS(Grid1D({1.0, 1.0, 2.0, 3.0, 4.0}), std::invalid_argument);
  Grid1D g = Grid1D::uniform(0, 1, 9);
  CHECK(g.size() == 9);
  CHECK(std::abs(g.spacing(3) - 0.125) < 1e-15);
}

TEST_CASE("antiderivative cache") {
  // F(y) = int_1^y ln s ds = y ln y - y + 1
  Antiderivative F([](double s) { return std::log(s); }, 1.0, 0.01, 100.0);
  for (double y : {0.02, 0.5, 1.0, 2.0, 37.5, 99.0}) {
    double exact = y * std::log(y) - y + 1.0;
    CHECK(std::abs(F(y) - exact) < 1e-9 * (1 + std::abs(exact)));
  }
  CHECK_THROWS_AS((void)F(1000.0), std::domain_error);
}

TEST_CASE("fd third derivative stencil") {
  auto f = [](double x) { return std::exp(0.7 * x); };
  double d3 = fd_d3(f, 0.4);
  double exact = 0.343 * std::exp(0.28);
  CHECK(std::abs(d3 - exact) < 1e-5 * (1 + std::abs(exact)));
}

TEST_CASE("jacobian and pullback") {
  // map (r, t) -> (r cos t, r sin t); pullback of dx^2 + dy^2 = dr^2 + r^2 dt^2
  auto polar = [](const Vec& x) {
    return Vec{x[0] * std::cos(x[1]), x[0] * std::sin(x[1])};
  };
  Vec p = {1.3, 0.7};
  RectMatrix J = fd_jacobian(polar, p);
  Mat G = Mat::identity(2);
  Mat P = pullback(G, J);
  CHECK(std::abs(P(0, 0) - 1.0) < 1e-8);
  CHECK(std::abs(P(1, 1) - 1.3 * 1.3) < 1e-7);
  CHECK(std::abs(P(0, 1)) < 1e-8);
}
