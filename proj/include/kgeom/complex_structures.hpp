#pragma once

// The hypercomplex structure J1, J2, J3 on K_2, the Levi-Civita 2:1 covering
// and its pullbacks, the conifold <-> Kepler-manifold diffeomorphism, and the
// coordinate charts of the resolved 3-conifold with their norm identities.
//
// This module fixes the covering-map convention
//   x + iy = (xi + i eta)^2,   p - iq = (om - i chi) / (xi + i eta)
// (z2/z1 in the quadric-cone picture, no factor 2 in the denominator),
// which is the one under which the constant pullback matrices below hold.

#include <array>
#include <cmath>
#include <stdexcept>

#include "numkit.hpp"
#include "regularization.hpp"

namespace kgeom {
namespace cxs {

using num::CMat;
using num::CVec;
using num::Mat;
using num::Vec;
using num::cplx;

enum class JLabel { J1, J2, J3 };

// --- J operators in the (x, y, p, q) chart ---------------------------------

// matrix of J on the basis (d/dx, d/dy, d/dp, d/dq); column a = image of e_a
inline Mat j_matrix(JLabel label, const reg::PhaseState2D& s) {
  double rho = std::hypot(s.x, s.y);
  if (rho == 0) throw std::domain_error("j_matrix: (x,y) = 0");
  Mat J(4);
  switch (label) {
    case JLabel::J1: {
      J(1, 0) = 1;
      J(0, 1) = -1;
      J(3, 2) = -1;
      J(2, 3) = 1;
      break;
    }
    case JLabel::J2: {
      double A = (s.p * s.x - s.q * s.y) / rho;
      double B = (s.p * s.y + s.q * s.x) / rho;
      double C = (s.p * s.p + s.q * s.q + 1.0) / (2.0 * rho);
      // J2 dx = A dx + B dy - C dp
      J(0, 0) = A;  J(1, 0) = B;  J(2, 0) = -C;
      // J2 dy = B dx - A dy - C dq
      J(0, 1) = B;  J(1, 1) = -A; J(3, 1) = -C;
      // J2 dp = 2 rho dx - A dp - B dq
      J(0, 2) = 2 * rho; J(2, 2) = -A; J(3, 2) = -B;
      // J2 dq = 2 rho dy - B dp + A dq
      J(1, 3) = 2 * rho; J(2, 3) = -B; J(3, 3) = A;
      break;
    }
    case JLabel::J3: {
      double A = (s.p * s.x - s.q * s.y) / rho;
      double B = (s.p * s.y + s.q * s.x) / rho;
      double C = (s.p * s.p + s.q * s.q + 1.0) / (2.0 * rho);
      // J3 dx = -B dx + A dy + C dq
      J(0, 0) = -B; J(1, 0) = A;  J(3, 0) = C;
      // J3 dy = A dx + B dy - C dp
      J(0, 1) = A;  J(1, 1) = B;  J(2, 1) = -C;
      // J3 dp = 2 rho dy - B dp + A dq
      J(1, 2) = 2 * rho; J(2, 2) = -B; J(3, 2) = A;
      // J3 dq = -2 rho dx + A dp + B dq
      J(0, 3) = -2 * rho; J(2, 3) = A; J(3, 3) = B;
      break;
    }
  }
  return J;
}

// Nijenhuis tensor on coordinate basis pairs, brackets by centered
// differences of the J-field; bilinearity makes basis pairs sufficient.
inline double nijenhuis_residual(JLabel label, const reg::PhaseState2D& s,
                                 double h = 1e-4) {
  auto field = [&](const Vec& v) {
    return j_matrix(label, reg::PhaseState2D{v[0], v[1], v[2], v[3]});
  };
  Vec x0 = {s.x, s.y, s.p, s.q};
  Mat M = field(x0);

  // dM[b] = dJ/dx_b
  std::array<Mat, 4> dM;
  for (int b = 0; b < 4; ++b) {
    Vec xp = x0, xm = x0;
    xp[b] += h;
    xm[b] -= h;
    dM[b] = (field(xp) - field(xm)) * (1.0 / (2 * h));
  }
  auto col = [](const Mat& A, int j) {
    return Vec{A(0, j), A(1, j), A(2, j), A(3, j)};
  };

  double worst = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      Vec va = col(M, a), vb = col(M, b);       // J e_a, J e_b
      Vec da = col(dM[b], a), db = col(dM[a], b);  // d_b(J e_a), d_a(J e_b)
      // N = J (d_a(J e_b) - d_b(J e_a)) - ( D(Je_b) Je_a - D(Je_a) Je_b )
      Vec t(4, 0.0);
      for (int i = 0; i < 4; ++i) t[i] = db[i] - da[i];
      Vec n = M.mul(t);
      for (int i = 0; i < 4; ++i) {
        double lie = 0;
        for (int k = 0; k < 4; ++k)
          lie += dM[k](i, b) * va[k] - dM[k](i, a) * vb[k];
        n[i] -= lie;
      }
      worst = std::max(worst, num::norm(n));
    }
  return worst;
}

// --- Levi-Civita covering (z2/z1 convention) --------------------------------

inline reg::PhaseState2D lc2_map(const std::array<double, 4>& u) {
  double xi = u[0], eta = u[1], om = u[2], chi = u[3];
  double r2 = xi * xi + eta * eta;
  if (r2 == 0) throw std::domain_error("lc2_map: origin");
  return {xi * xi - eta * eta, 2 * xi * eta, (xi * om - eta * chi) / r2,
          (xi * chi + eta * om) / r2};
}

// analytic Jacobian of lc2_map at u, rows = (x,y,p,q), cols = (xi,eta,om,chi)
inline Mat lc2_jacobian(const std::array<double, 4>& u) {
  double xi = u[0], eta = u[1], om = u[2], chi = u[3];
  double r2 = xi * xi + eta * eta;
  if (r2 == 0) throw std::domain_error("lc2_jacobian: origin");
  double Np = xi * om - eta * chi, Nq = xi * chi + eta * om;
  Mat J(4);
  J(0, 0) = 2 * xi;  J(0, 1) = -2 * eta;
  J(1, 0) = 2 * eta; J(1, 1) = 2 * xi;
  J(2, 0) = om / r2 - 2 * xi * Np / (r2 * r2);
  J(2, 1) = -chi / r2 - 2 * eta * Np / (r2 * r2);
  J(2, 2) = xi / r2;
  J(2, 3) = -eta / r2;
  J(3, 0) = chi / r2 - 2 * xi * Nq / (r2 * r2);
  J(3, 1) = om / r2 - 2 * eta * Nq / (r2 * r2);
  J(3, 2) = eta / r2;
  J(3, 3) = xi / r2;
  return J;
}

// pullback of the J operator through the covering: M^{-1} J(phi(u)) M
inline Mat lc_pullback_j(JLabel label, const std::array<double, 4>& u) {
  Mat M = lc2_jacobian(u);
  Mat J = j_matrix(label, lc2_map(u));
  return M.inverse() * J * M;
}

// the constant hypercomplex matrices the pullback should equal
inline Mat lc_j_constant(JLabel label) {
  Mat J(4);
  switch (label) {
    case JLabel::J1:
      J(1, 0) = 1; J(0, 1) = -1; J(3, 2) = -1; J(2, 3) = 1;
      break;
    case JLabel::J2:
      J(2, 0) = -1; J(3, 1) = -1; J(0, 2) = 1; J(1, 3) = 1;
      break;
    case JLabel::J3:
      J(3, 0) = 1; J(2, 1) = -1; J(1, 2) = 1; J(0, 3) = -1;
      break;
  }
  return J;
}

// pullback of dp ^ dx + dq ^ dy; equals 2 dom ^ dxi + 2 dchi ^ deta
inline Mat lc_pullback_symplectic(const std::array<double, 4>& u) {
  Mat Om(4);
  Om(2, 0) = 1; Om(0, 2) = -1;  // dp ^ dx
  Om(3, 1) = 1; Om(1, 3) = -1;  // dq ^ dy
  Mat M = lc2_jacobian(u);
  return M.transpose() * Om * M;
}

inline Mat lc_symplectic_constant() {
  Mat Om(4);
  Om(2, 0) = 2; Om(0, 2) = -2;
  Om(3, 1) = 2; Om(1, 3) = -2;
  return Om;
}

// --- conifold <-> Kepler manifold -------------------------------------------

struct ConifoldPoint {
  CVec w;
  cplx a = 0.0;  // deformation parameter; 0 on the cone

  double equation_residual() const {
    cplx s = 0;
    for (const auto& z : w) s += z * z;
    return std::abs(s - a);
  }
};

inline reg::KeplerPoint conifold_to_kepler(const ConifoldPoint& cp) {
  if (cp.a != cplx(0, 0))
    throw std::invalid_argument("conifold_to_kepler: only the cone maps to K_n");
  const std::size_t m = cp.w.size();
  Vec re(m), im(m);
  for (std::size_t j = 0; j < m; ++j) {
    re[j] = cp.w[j].real();
    im[j] = cp.w[j].imag();
  }
  double nr = num::norm(re);
  if (nr == 0)
    throw std::runtime_error(
        "conifold_to_kepler: Re(w) = 0 cannot occur on the punctured cone");
  for (auto& v : re) v /= nr;
  return {re, im};
}

inline ConifoldPoint kepler_to_conifold(const reg::KeplerPoint& kp) {
  double s = num::norm(kp.xi);
  ConifoldPoint cp;
  cp.w.resize(kp.x.size());
  for (std::size_t j = 0; j < kp.x.size(); ++j)
    cp.w[j] = cplx(s * kp.x[j], kp.xi[j]);
  return cp;
}

// --- resolved-conifold charts ------------------------------------------------

// z-coordinates on the quadric cone: z1 z2 = z3 z4, from w by
//   z1 = w0 + i w1, z2 = w0 - i w1, z3 = i w2 + w3, z4 = i w2 - w3.
inline CVec z_from_w(const CVec& w) {
  if (w.size() != 4) throw std::invalid_argument("z_from_w: expects w in C^4");
  return {w[0] + cplx(0, 1) * w[1], w[0] - cplx(0, 1) * w[1],
          cplx(0, 1) * w[2] + w[3], cplx(0, 1) * w[2] - w[3]};
}

inline CVec w_from_z(const CVec& z) {
  if (z.size() != 4) throw std::invalid_argument("w_from_z: expects z in C^4");
  return {0.5 * (z[0] + z[1]), cplx(0, -0.5) * (z[0] - z[1]),
          cplx(0, -0.5) * (z[2] + z[3]), 0.5 * (z[2] - z[3])};
}

// four patches of O_{P1 x P1}(-1,-1) and the two patches of O(-1) + O(-1)
enum class Chart { P11_1, P11_2, P11_3, P11_4, R3_A, R3_B };

struct ResolvedChartPoint {
  Chart chart;
  // P11_k: (alpha_{k,1}, alpha_{k,2}, beta_k); R3_*: (alpha, beta_1, beta_2)
  cplx c1, c2, c3;
};

struct NotInOverlapError : std::domain_error {
  using std::domain_error::domain_error;
};

inline CVec chart_to_z(const ResolvedChartPoint& p) {
  switch (p.chart) {
    case Chart::P11_1: return {p.c3, p.c1 * p.c2 * p.c3, p.c1 * p.c3, p.c2 * p.c3};
    case Chart::P11_2: return {p.c1 * p.c2 * p.c3, p.c3, p.c2 * p.c3, p.c1 * p.c3};
    case Chart::P11_3: return {p.c1 * p.c3, p.c2 * p.c3, p.c3, p.c1 * p.c2 * p.c3};
    case Chart::P11_4: return {p.c2 * p.c3, p.c1 * p.c3, p.c1 * p.c2 * p.c3, p.c3};
    case Chart::R3_A:  return {p.c2, p.c1 * p.c3, p.c1 * p.c2, p.c3};
    case Chart::R3_B:  return {p.c1 * p.c2, p.c3, p.c2, p.c1 * p.c3};
  }
  throw std::logic_error("chart_to_z: unreachable");
}

inline ResolvedChartPoint chart_from_z(Chart target, const CVec& z) {
  auto need = [](const cplx& d, const char* what) {
    if (d == cplx(0, 0))
      throw NotInOverlapError(std::string("chart_from_z: ") + what + " = 0");
    return d;
  };
  switch (target) {
    case Chart::P11_1: return {target, z[2] / need(z[0], "z1"), z[3] / z[0], z[0]};
    case Chart::P11_2: return {target, z[3] / need(z[1], "z2"), z[2] / z[1], z[1]};
    case Chart::P11_3: return {target, z[0] / need(z[2], "z3"), z[1] / z[2], z[2]};
    case Chart::P11_4: return {target, z[1] / need(z[3], "z4"), z[0] / z[3], z[3]};
    case Chart::R3_A:  return {target, z[2] / need(z[0], "z1"), z[0], z[3]};
    case Chart::R3_B:  return {target, z[3] / need(z[1], "z2"), z[2], z[1]};
  }
  throw std::logic_error("chart_from_z: unreachable");
}

inline ResolvedChartPoint chart_transition(const ResolvedChartPoint& p, Chart target) {
  return chart_from_z(target, chart_to_z(p));
}

// residual of z1 z2 - z3 z4 (preserved by every transition)
inline double cone_equation_residual(const CVec& z) {
  return std::abs(z[0] * z[1] - z[2] * z[3]);
}

// norm identities on K_3: sum |w|^2 = (1/2) sum |z|^2 and, per chart,
// (1+|alpha|^2)(|beta_1|^2 + |beta_2|^2) = sum |z|^2.
inline std::pair<double, double> norm_identities_residual(const ConifoldPoint& cp) {
  if (cp.w.size() != 4 || cp.a != cplx(0, 0))
    throw std::invalid_argument("norm_identities_residual: needs a C_3 cone point");
  CVec z = z_from_w(cp.w);
  double sw = num::cnorm2(cp.w);
  double sz = num::cnorm2(z);
  double r1 = std::abs(sw - 0.5 * sz);
  double r2 = 0;
  for (Chart ch : {Chart::P11_1, Chart::P11_2, Chart::P11_3, Chart::P11_4,
                   Chart::R3_A, Chart::R3_B}) {
    ResolvedChartPoint p;
    try {
      p = chart_from_z(ch, z);
    } catch (const NotInOverlapError&) {
      continue;
    }
    double lhs;
    if (ch == Chart::R3_A || ch == Chart::R3_B)
      lhs = (1.0 + std::norm(p.c1)) * (std::norm(p.c2) + std::norm(p.c3));
    else
      lhs = (1.0 + std::norm(p.c1)) * (1.0 + std::norm(p.c2)) * std::norm(p.c3);
    r2 = std::max(r2, std::abs(lhs - sz));
  }
  return {r1, r2};
}

// random point on the punctured 3-cone: w = s(u + iv) with |u| = |v|, u.v = 0
inline ConifoldPoint random_cone_point(num::Rng& rng, std::size_t n = 3,
                                       double scale = 1.0) {
  Vec u = rng.unit_vec(n + 1);
  Vec v = rng.gauss_vec(n + 1);
  double uv = num::dot(u, v);
  for (std::size_t i = 0; i <= n; ++i) v[i] -= uv * u[i];
  double nv = num::norm(v);
  if (nv < 1e-8) return random_cone_point(rng, n, scale);
  for (auto& x : v) x /= nv;
  ConifoldPoint cp;
  cp.w.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) cp.w[i] = scale * cplx(u[i], v[i]);
  return cp;
}

}  // namespace cxs
}  // namespace kgeom
