#pragma once

// The concrete metric families: the U(n) Ricci-flat b-family and its Z_n
// quotient (Calabi metrics on O(-n)), Eguchi-Hanson via the Calabi ansatz and
// polar coordinates, the Calabi ansatz on O(-1)+O(-1) (Kepler lift, Ricci-flat
// profile, resolved 3-conifold), the Calabi ansatz on O(-1,-1) over P1 x P1
// with its blow-down to O(-2,-2), and the moment polytopes.
//
// Every family is driven by a single radial profile y(u) (u the Hermitian
// norm square of the fiber), and every complex potential is a finite sum
// sum_i c_i l_i (ln l_i - 1) of affine-log terms, which family_psi returns.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "numkit.hpp"
#include "toric.hpp"

namespace kgeom {
namespace fam {

using num::CMat;
using num::CVec;
using num::Mat;
using num::Vec;
using num::cplx;
using toric::AffineForm;
using toric::HessianPotential;
using toric::RadialTerm;

enum class Tag {
  UN_RF,           // u(y) = (y^n - b^n)^{1/n} on C^n
  QUOTIENT_ON,     // the same metric on the O(-n) chart (v, w^2..w^n)
  EH,              // Calabi ansatz on O(-1)/O(-2): y = -a + sqrt(c1 u^2 + c2)
  RESOLVED3,       // O(-1)+O(-1): y^3 + (3a/2) y^2 = u^2
  P1P1,            // O(-1,-1) over P1 x P1: y^3 + 3(a1+a2)/2 y^2 + 3 a1 a2 y = u^2
  O22,             // blow-down of P1P1 to O(-2,-2)
  KEPLER_K3_LIFT,  // a = 0, phi = u^{1/2} (the Kepler metric on K_3)
  KRF_K3           // a = 0, phi = (3/2) u^{2/3} (Ricci-flat cone)
};

struct Family {
  Tag tag = Tag::UN_RF;
  int n = 2;                      // UN_RF / QUOTIENT_ON dimension
  double a = 0, b = 0;            // RESOLVED3 / EH offset, b-family parameter
  double a1 = 0, a2 = 0;          // P1P1 / O22 base-form coefficients
  double c1 = 1, c2 = 0;          // EH integration constants
};

inline std::string family_name(const Family& f) {
  switch (f.tag) {
    case Tag::UN_RF: return "UN_RF";
    case Tag::QUOTIENT_ON: return "QUOTIENT_ON";
    case Tag::EH: return "EH";
    case Tag::RESOLVED3: return "RESOLVED3";
    case Tag::P1P1: return "P1P1";
    case Tag::O22: return "O22";
    case Tag::KEPLER_K3_LIFT: return "KEPLER_K3_LIFT";
    case Tag::KRF_K3: return "KRF_K3";
  }
  return "?";
}

// --- radial profiles y(u) -------------------------------------------------------

// The two nonzero roots of y^3 + 3(a1+a2)/2 y^2 + 3 a1 a2 y (beta_+, beta_-):
// the cubic factors exactly as y (y^2 + 3(a1+a2)/2 y + 3 a1 a2), so after
// peeling the zero root the remaining pair comes from the quadratic; it is a
// conjugate pair when (3a1-a2)(a1-3a2) < 0 (e.g. whenever a1 = a2 > 0), which
// is why the printed closed form with a real radical cannot be used.
inline std::pair<cplx, cplx> beta_roots(double a1, double a2) {
  double B = 1.5 * (a1 + a2), C = 3.0 * a1 * a2;
  double disc = B * B - 4.0 * C;
  if (disc >= 0) {
    double sq = std::sqrt(disc);
    double r1 = 0.5 * (-B - sq);
    double r2 = (r1 == 0.0) ? 0.5 * (-B + sq) : C / r1;  // stable companion
    return {cplx(r1, 0), cplx(r2, 0)};
  }
  double re = -0.5 * B, im = 0.5 * std::sqrt(-disc);
  return {cplx(re, im), cplx(re, -im)};
}

// y(u) and y'(u); phi'(u) = y/u, phi''(u) = (y' u - y)/u^2
struct UProfile {
  std::function<double(double)> y, yprime;
  double phi1(double u) const { return y(u) / u; }
  double phi2(double u) const {
    return (yprime(u) * u - y(u)) / (u * u);
  }
};

inline UProfile family_uprofile(const Family& f) {
  UProfile p;
  switch (f.tag) {
    case Tag::UN_RF:
    case Tag::QUOTIENT_ON: {
      int n = f.n;
      double bn = std::pow(f.b, n);
      p.y = [n, bn](double u) { return std::pow(std::pow(u, n) + bn, 1.0 / n); };
      p.yprime = [n, bn](double u) {
        double yy = std::pow(std::pow(u, n) + bn, 1.0 / n);
        return std::pow(u, n - 1) / std::pow(yy, n - 1);
      };
      break;
    }
    case Tag::EH: {
      double a = f.a, c1 = f.c1, c2 = f.c2;
      p.y = [a, c1, c2](double u) { return -a + std::sqrt(c1 * u * u + c2); };
      p.yprime = [c1, c2](double u) { return c1 * u / std::sqrt(c1 * u * u + c2); };
      break;
    }
    case Tag::RESOLVED3: {
      double a = f.a;
      p.y = [a](double u) {
        return num::positive_cubic_root(1.0, 1.5 * a, 0.0, -u * u);
      };
      p.yprime = [a](double u) {
        double yy = num::positive_cubic_root(1.0, 1.5 * a, 0.0, -u * u);
        return 2.0 * u / (3.0 * yy * (yy + a));  // (a+y) y y' = (2/3) u
      };
      break;
    }
    case Tag::P1P1:
    case Tag::O22: {
      double a1 = f.a1, a2 = f.a2;
      p.y = [a1, a2](double u) {
        return num::positive_cubic_root(1.0, 1.5 * (a1 + a2), 3.0 * a1 * a2,
                                        -u * u);
      };
      p.yprime = [a1, a2](double u) {
        double yy = num::positive_cubic_root(1.0, 1.5 * (a1 + a2), 3.0 * a1 * a2,
                                             -u * u);
        return 2.0 * u / (3.0 * (yy + a1) * (yy + a2));
      };
      break;
    }
    case Tag::KEPLER_K3_LIFT: {
      p.y = [](double u) { return 0.5 * std::sqrt(u); };
      p.yprime = [](double u) { return 0.25 / std::sqrt(u); };
      break;
    }
    case Tag::KRF_K3: {
      p.y = [](double u) { return std::pow(u, 2.0 / 3.0); };
      p.yprime = [](double u) { return 2.0 / 3.0 * std::pow(u, -1.0 / 3.0); };
      break;
    }
  }
  return p;
}

// d ln u / dy as a function of y = y_3 (or y = sum of fiber actions)
inline double family_dlnu_dy(const Family& f, double y) {
  switch (f.tag) {
    case Tag::UN_RF:
    case Tag::QUOTIENT_ON:
      return std::pow(y, f.n - 1) / (std::pow(y, f.n) - std::pow(f.b, f.n));
    case Tag::EH: {
      double s = y + f.a;
      return s / (s * s - f.c2);
    }
    case Tag::RESOLVED3:
      return 1.0 / y + 0.5 / (y + 1.5 * f.a);
    case Tag::P1P1: {
      // u^2 = Q(y) = y^3 + 3(a1+a2)/2 y^2 + 3 a1 a2 y
      double Q = y * (y * y + 1.5 * (f.a1 + f.a2) * y + 3.0 * f.a1 * f.a2);
      double Qp = 3 * y * y + 3.0 * (f.a1 + f.a2) * y + 3.0 * f.a1 * f.a2;
      return 0.5 * Qp / Q;
    }
    case Tag::O22: {
      Family p = f;
      p.tag = Tag::P1P1;
      return 2.0 * family_dlnu_dy(p, 2.0 * y);  // y_3 = 2 yhat_3
    }
    case Tag::KEPLER_K3_LIFT:
      return 2.0 / y;  // u = 4 y^2
    case Tag::KRF_K3:
      return 1.5 / y;  // u = y^{3/2}
  }
  return 0;
}

// --- chart metrics ---------------------------------------------------------------

inline CMat family_metric_o22_limit(const Family& f, const CVec& pt);

// Hermitian matrix of the family's Kaehler form in its chart; throws a
// PositivityError when the point sits on a degenerate locus (the zero
// sections of the un-blown-down families).
inline CMat family_metric(const Family& f, const CVec& pt) {
  UProfile up = family_uprofile(f);
  // fiber norm square; zero exactly on the degenerate zero-section loci
  double usum = 0;
  for (const auto& z : pt) usum += std::norm(z);
  if (f.tag != Tag::UN_RF && f.tag != Tag::QUOTIENT_ON) {
    double fib = std::norm(pt.back());
    if (f.tag == Tag::RESOLVED3 || f.tag == Tag::KEPLER_K3_LIFT ||
        f.tag == Tag::KRF_K3)
      fib = std::norm(pt[1]) + std::norm(pt[2]);
    if (!(fib > 0) && f.tag != Tag::O22)
      throw num::PositivityError(
          family_name(f) + ": degenerate on the zero section (fiber = 0)", 0.0);
  } else if (!(usum > 0)) {
    throw num::PositivityError(family_name(f) + ": degenerate at the origin", 0.0);
  }
  CMat H;
  switch (f.tag) {
    case Tag::UN_RF: {
      if (pt.size() != static_cast<std::size_t>(f.n))
        throw std::invalid_argument("family_metric: UN_RF expects z in C^n");
      double u = num::cnorm2(pt);
      double p1 = up.phi1(u), p2 = up.phi2(u);
      H = CMat(f.n);
      for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j)
          H(i, j) = (i == j ? p1 : 0.0) + p2 * std::conj(pt[i]) * pt[j];
      break;
    }
    case Tag::QUOTIENT_ON: {
      // chart (v, w^2..w^n); omega_hat_b in closed form
      int n = f.n;
      if (pt.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("family_metric: QUOTIENT_ON expects (v, w)");
      cplx v = pt[0];
      double w2 = 0;
      for (int i = 1; i < n; ++i) w2 += std::norm(pt[i]);
      double P = 1.0 + w2;
      double D = std::norm(v) * std::pow(P, n) + std::pow(f.b, n);
      double Dn = std::pow(D, (n - 1.0) / n);
      H = CMat(n);
      H(0, 0) = std::pow(P, n) / (n * n * Dn);
      for (int i = 1; i < n; ++i) {
        H(0, i) = std::conj(v) * pt[i] * std::pow(P, n - 1) / (n * Dn);
        H(i, 0) = std::conj(H(0, i));
        for (int j = 1; j < n; ++j)
          H(i, j) = (i == j ? std::pow(D, 1.0 / n) / P : 0.0) -
                    std::pow(f.b, n) * std::conj(pt[i]) * pt[j] / (P * P * Dn);
      }
      break;
    }
    case Tag::EH: {
      // O(-1) chart (z, w); u = |w|^2 (1 + |z|^2)
      if (pt.size() != 2) throw std::invalid_argument("family_metric: EH expects (z, w)");
      cplx z = pt[0], w = pt[1];
      double zz = std::norm(z), u = std::norm(w) * (1 + zz);
      double y = up.y(u), yp = up.yprime(u);
      H = CMat(2);
      H(0, 0) = (f.a + y + u * zz * yp) / ((1 + zz) * (1 + zz));
      H(0, 1) = yp * std::conj(z) * w;
      H(1, 0) = std::conj(H(0, 1));
      H(1, 1) = yp * (1 + zz);
      break;
    }
    case Tag::RESOLVED3:
    case Tag::KEPLER_K3_LIFT:
    case Tag::KRF_K3: {
      // chart (z, w1, w2); u = (1 + |z|^2)(|w1|^2 + |w2|^2)
      if (pt.size() != 3)
        throw std::invalid_argument("family_metric: expects (z, w1, w2)");
      cplx z = pt[0];
      double zz = std::norm(z);
      double w2 = std::norm(pt[1]) + std::norm(pt[2]);
      double u = (1 + zz) * w2;
      double p1 = up.phi1(u), p2 = up.phi2(u);
      double a = (f.tag == Tag::RESOLVED3) ? f.a : 0.0;
      H = CMat(3);
      H(0, 0) = a / ((1 + zz) * (1 + zz)) + p1 * w2 + p2 * w2 * w2 * zz;
      for (int j = 1; j <= 2; ++j) {
        H(0, j) = (p1 + u * p2) * std::conj(z) * pt[j];
        H(j, 0) = std::conj(H(0, j));
        for (int k = 1; k <= 2; ++k)
          H(j, k) = (j == k ? p1 * (1 + zz) : 0.0) +
                    p2 * (1 + zz) * (1 + zz) * std::conj(pt[j]) * pt[k];
      }
      break;
    }
    case Tag::P1P1: {
      // chart (z1, z2, w); u = |w|^2 (1+|z1|^2)(1+|z2|^2)
      if (pt.size() != 3)
        throw std::invalid_argument("family_metric: P1P1 expects (z1, z2, w)");
      cplx z1 = pt[0], z2 = pt[1], w = pt[2];
      double q1 = 1 + std::norm(z1), q2 = 1 + std::norm(z2);
      double u = std::norm(w) * q1 * q2;
      double y = up.y(u), yp = up.yprime(u);
      H = CMat(3);
      H(0, 0) = (f.a1 + y + std::norm(z1) * u * yp) / (q1 * q1);
      H(1, 1) = (f.a2 + y + std::norm(z2) * u * yp) / (q2 * q2);
      H(0, 1) = std::norm(w) * yp * std::conj(z1) * z2;
      H(1, 0) = std::conj(H(0, 1));
      H(0, 2) = q2 * yp * std::conj(z1) * w;
      H(2, 0) = std::conj(H(0, 2));
      H(1, 2) = q1 * yp * std::conj(z2) * w;
      H(2, 1) = std::conj(H(1, 2));
      H(2, 2) = yp * u / std::norm(w);
      break;
    }
    case Tag::O22: {
      // chart (z1, z2, v), v = w^2: pull the P1P1 matrix through diag(1,1,dw/dv)
      if (pt.size() != 3)
        throw std::invalid_argument("family_metric: O22 expects (z1, z2, v)");
      Family p = f;
      p.tag = Tag::P1P1;
      cplx v = pt[2];
      if (v == cplx(0, 0)) {
        // v -> 0 limit of the blown-down form: finite closed expression
        return family_metric_o22_limit(f, pt);
      }
      cplx w = std::sqrt(v);
      CMat Hp = family_metric(p, CVec{pt[0], pt[1], w});
      cplx dwdv = 1.0 / (2.0 * w);
      CMat J(3);
      J(0, 0) = J(1, 1) = 1.0;
      J(2, 2) = dwdv;
      H = num::herm_pullback(Hp, J);
      break;
    }
  }
  double mineig = num::min_eigenvalue(H);
  if (mineig <= 0)
    throw num::PositivityError(
        family_name(f) + ": metric degenerate at this point", mineig);
  return H;
}

// v -> 0 limit of the O(-2,-2) metric (the zero-section extension): uses the
// leading behavior y ~ u^2/(3 a1 a2), y' ~ 2u/(3 a1 a2)
inline CMat family_metric_o22_limit(const Family& f, const CVec& pt) {
  if (!(f.a1 > 0) || !(f.a2 > 0))
    throw std::invalid_argument("O22 limit needs a1, a2 > 0");
  double q1 = 1 + std::norm(pt[0]), q2 = 1 + std::norm(pt[1]);
  CMat H(3);
  H(0, 0) = f.a1 / (q1 * q1);
  H(1, 1) = f.a2 / (q2 * q2);
  H(2, 2) = q1 * q1 * q2 * q2 / (6.0 * f.a1 * f.a2);
  return H;
}

// --- moment maps -----------------------------------------------------------------

// action coordinates from the chart radii; ordering matches the chart
inline Vec family_moment(const Family& f, const Vec& radii) {
  UProfile up = family_uprofile(f);
  switch (f.tag) {
    case Tag::UN_RF: {
      double u = 0;
      for (double r : radii) u += r * r;
      double p1 = up.phi1(u);
      Vec y(radii.size());
      for (std::size_t i = 0; i < radii.size(); ++i) y[i] = radii[i] * radii[i] * p1;
      return y;
    }
    case Tag::QUOTIENT_ON: {
      // x = (n y_1, y_2 - y_1, ..., y_n - y_1) in the upstairs actions
      Family un = f;
      un.tag = Tag::UN_RF;
      Vec y = family_moment(un, radii);
      Vec x(y.size());
      x[0] = f.n * y[0];
      for (std::size_t j = 1; j < y.size(); ++j) x[j] = y[j] - y[0];
      return x;
    }
    case Tag::EH: {
      double r0 = radii[0], rw = radii[1];
      double u = rw * rw * (1 + r0 * r0);
      double p1 = up.phi1(u);
      return {-f.a / (1 + r0 * r0) + r0 * r0 * rw * rw * p1,
              rw * rw * (1 + r0 * r0) * p1};
    }
    case Tag::RESOLVED3:
    case Tag::KEPLER_K3_LIFT:
    case Tag::KRF_K3: {
      double a = (f.tag == Tag::RESOLVED3) ? f.a : 0.0;
      double r0 = radii[0], r1 = radii[1], r2 = radii[2];
      double fib = r1 * r1 + r2 * r2;
      double u = (1 + r0 * r0) * fib;
      double p1 = up.phi1(u);
      return {-a / (1 + r0 * r0) + r0 * r0 * fib * p1,
              r1 * r1 * (1 + r0 * r0) * p1, r2 * r2 * (1 + r0 * r0) * p1};
    }
    case Tag::P1P1: {
      double r1 = radii[0], r2 = radii[1], r3 = radii[2];
      double q1 = 1 + r1 * r1, q2 = 1 + r2 * r2;
      double u = r3 * r3 * q1 * q2;
      double p1 = up.phi1(u);
      return {-f.a1 / q1 + r1 * r1 * r3 * r3 * q2 * p1,
              -f.a2 / q2 + r2 * r2 * r3 * r3 * q1 * p1, u * p1};
    }
    case Tag::O22: {
      Family p = f;
      p.tag = Tag::P1P1;
      Vec y = family_moment(p, Vec{radii[0], radii[1], std::sqrt(radii[2])});
      return {y[0], y[1], 0.5 * y[2]};
    }
  }
  throw std::logic_error("family_moment: unreachable");
}

// --- complex potentials (the Sigma l_i ln l_i closed forms) -----------------------

namespace detail {

inline AffineForm aform(std::size_t dim, std::initializer_list<double> coeffs,
                        double c0) {
  AffineForm a;
  a.a.assign(coeffs);
  a.a.resize(dim, 0.0);
  a.b = c0;
  return a;
}

// (1/2)[(y - beta+)(ln(y - beta+) - 1) + (y - beta-)(ln(y - beta-) - 1)] as a
// real radial term, valid for real or conjugate beta pairs
inline RadialTerm beta_pair_term(AffineForm arg, cplx bp, cplx bm) {
  double p = bp.real(), q = bp.imag();
  RadialTerm t;
  t.arg = std::move(arg);
  if (std::abs(q) < 1e-14) {
    double b1 = bp.real(), b2 = bm.real();
    t.val = [b1, b2](double y) {
      return 0.5 * ((y - b1) * (std::log(y - b1) - 1.0) +
                    (y - b2) * (std::log(y - b2) - 1.0));
    };
    t.d1 = [b1, b2](double y) {
      return 0.5 * (std::log(y - b1) + std::log(y - b2));
    };
    t.d2 = [b1, b2](double y) { return 0.5 * (1.0 / (y - b1) + 1.0 / (y - b2)); };
  } else {
    t.val = [p, q](double y) {
      double L = 0.5 * std::log((y - p) * (y - p) + q * q);
      double A = std::atan2(-q, y - p);
      return (y - p) * (L - 1.0) + q * A;
    };
    t.d1 = [p, q](double y) {
      return 0.5 * std::log((y - p) * (y - p) + q * q);
    };
    t.d2 = [p, q](double y) { return (y - p) / ((y - p) * (y - p) + q * q); };
  }
  return t;
}

// linear term c * arg(y) (absorbs y ln 4-type constants from int ln u dy)
inline RadialTerm linear_term(AffineForm arg, double c) {
  RadialTerm t;
  t.arg = std::move(arg);
  t.val = [c](double y) { return c * y; };
  t.d1 = [c](double) { return c; };
  t.d2 = [](double) { return 0.0; };
  return t;
}

// roots-of-unity sum (1/n) sum_j (y - b xi^j)(ln(y - b xi^j) - 1), real form
inline RadialTerm roots_of_unity_term(AffineForm arg, int n, double b) {
  RadialTerm t;
  t.arg = std::move(arg);
  t.val = [n, b](double y) {
    double s = 0;
    for (int j = 0; j < n; ++j) {
      double ang = 2.0 * 3.14159265358979323846 * j / n;
      double p = b * std::cos(ang), q = b * std::sin(ang);
      if (j == 0 || 2 * j == n) {
        s += (y - p) * (std::log(y - p) - 1.0);
      } else if (2 * j < n) {
        double L = 0.5 * std::log((y - p) * (y - p) + q * q);
        double A = std::atan2(-q, y - p);
        s += 2.0 * ((y - p) * (L - 1.0) + q * A);
      }
    }
    return s / n;
  };
  t.d1 = [n, b](double y) {
    return std::log(std::pow(y, n) - std::pow(b, n)) / n;
  };
  t.d2 = [n, b](double y) {
    return std::pow(y, n - 1) / (std::pow(y, n) - std::pow(b, n));
  };
  return t;
}

}  // namespace detail

// The printed closed-form complex potential of each family; coordinates match
// family_moment's ordering and Hess(psi) = G_ij.
inline HessianPotential family_psi(const Family& f) {
  using detail::aform;
  HessianPotential psi;
  switch (f.tag) {
    case Tag::UN_RF: {
      std::size_t n = f.n;
      psi.dim = n;
      for (std::size_t i = 0; i < n; ++i)
        psi.terms.push_back({1.0, toric::coordinate_form(n, i)});
      psi.terms.push_back({-1.0, toric::sum_form(n)});
      psi.radial.push_back(
          detail::roots_of_unity_term(toric::sum_form(n), f.n, f.b));
      return psi;
    }
    case Tag::QUOTIENT_ON: {
      // psi in the x coordinates: y_1 = x_1/n, y_j = x_j + x_1/n
      Family un = f;
      un.tag = Tag::UN_RF;
      HessianPotential base = family_psi(un);
      HessianPotential out;
      out.dim = f.n;
      double invn = 1.0 / f.n;
      auto compose = [&](const AffineForm& l) {
        AffineForm r;
        r.a.assign(f.n, 0.0);
        r.b = l.b;
        // x-gradient: a_y1 * (1/n) + sum_{j>=2} a_yj * d y_j/d x
        r.a[0] = 0.0;
        for (int j = 0; j < f.n; ++j) r.a[0] += l.a[j] * invn;
        for (int j = 1; j < f.n; ++j) r.a[j] = l.a[j];
        return r;
      };
      for (const auto& t : base.terms) out.terms.push_back({t.c, compose(t.l)});
      for (const auto& r : base.radial) {
        RadialTerm t = r;
        t.arg = compose(r.arg);
        out.radial.push_back(std::move(t));
      }
      return out;
    }
    case Tag::EH: {
      // (y0, y1), y := y1; l-terms of the n = 2 quotient picture
      psi.dim = 2;
      double b = std::sqrt(f.c2);
      psi.terms.push_back({1.0, aform(2, {-1.0, 1.0}, 0.0)});        // y - y0
      psi.terms.push_back({1.0, aform(2, {1.0, 0.0}, f.a)});         // y0 + a
      psi.terms.push_back({-1.0, aform(2, {0.0, 1.0}, f.a)});        // y + a
      psi.terms.push_back({0.5, aform(2, {0.0, 1.0}, f.a - b)});     // y + a - b
      psi.terms.push_back({0.5, aform(2, {0.0, 1.0}, f.a + b)});     // y + a + b
      if (f.c1 != 1.0)
        psi.radial.push_back(detail::linear_term(aform(2, {0.0, 1.0}, 0.0),
                                                 -0.5 * std::log(f.c1)));
      return psi;
    }
    case Tag::KEPLER_K3_LIFT: {
      psi.dim = 3;
      psi.terms.push_back({1.0, aform(3, {-1.0, 1.0, 1.0}, 0.0)});  // y - y0
      psi.terms.push_back({1.0, aform(3, {1.0, 0.0, 0.0}, 0.0)});   // y0
      psi.terms.push_back({1.0, aform(3, {0.0, 1.0, 0.0}, 0.0)});   // y1
      psi.terms.push_back({1.0, aform(3, {0.0, 0.0, 1.0}, 0.0)});   // y2
      // int ln u dy with u = 4 y^2 contributes the y ln 4 linear piece
      psi.radial.push_back(detail::linear_term(aform(3, {0.0, 1.0, 1.0}, 0.0),
                                               std::log(4.0)));
      return psi;
    }
    case Tag::KRF_K3: {
      psi.dim = 3;
      psi.terms.push_back({1.0, aform(3, {-1.0, 1.0, 1.0}, 0.0)});
      psi.terms.push_back({1.0, aform(3, {1.0, 0.0, 0.0}, 0.0)});
      psi.terms.push_back({1.0, aform(3, {0.0, 1.0, 0.0}, 0.0)});
      psi.terms.push_back({1.0, aform(3, {0.0, 0.0, 1.0}, 0.0)});
      psi.terms.push_back({-0.5, aform(3, {0.0, 1.0, 1.0}, 0.0)});  // -1/2 y ln y
      return psi;
    }
    case Tag::RESOLVED3: {
      psi.dim = 3;
      double a = f.a;
      psi.terms.push_back({1.0, aform(3, {-1.0, 1.0, 1.0}, 0.0)});      // y - y0
      psi.terms.push_back({1.0, aform(3, {1.0, 0.0, 0.0}, a)});         // y0 + a
      psi.terms.push_back({1.0, aform(3, {0.0, 1.0, 0.0}, 0.0)});       // y1
      psi.terms.push_back({1.0, aform(3, {0.0, 0.0, 1.0}, 0.0)});       // y2
      psi.terms.push_back({-1.0, aform(3, {0.0, 1.0, 1.0}, a)});        // y + a
      psi.terms.push_back({0.5, aform(3, {0.0, 1.0, 1.0}, 1.5 * a)});   // y + 3a/2
      return psi;
    }
    case Tag::P1P1: {
      psi.dim = 3;
      psi.terms.push_back({1.0, aform(3, {-1.0, 0.0, 1.0}, 0.0)});   // y - y1
      psi.terms.push_back({1.0, aform(3, {0.0, -1.0, 1.0}, 0.0)});   // y - y2
      psi.terms.push_back({1.0, aform(3, {1.0, 0.0, 0.0}, f.a1)});   // y1 + a1
      psi.terms.push_back({1.0, aform(3, {0.0, 1.0, 0.0}, f.a2)});   // y2 + a2
      psi.terms.push_back({-1.0, aform(3, {0.0, 0.0, 1.0}, f.a1)});  // y + a1
      psi.terms.push_back({-1.0, aform(3, {0.0, 0.0, 1.0}, f.a2)});  // y + a2
      psi.terms.push_back({0.5, aform(3, {0.0, 0.0, 1.0}, 0.0)});    // 1/2 y ln y
      if (f.a1 > 0 || f.a2 > 0) {
        auto [bp, bm] = beta_roots(f.a1, f.a2);
        if (std::abs(bm) < 1e-13 || std::abs(bp) < 1e-13) {
          // degenerate one-parameter case: u^2 = y^2 (y + 3a/2)
          cplx nz = (std::abs(bp) > std::abs(bm)) ? bp : bm;
          psi.terms.push_back({0.5, aform(3, {0.0, 0.0, 1.0}, 0.0)});
          psi.terms.push_back({0.5, aform(3, {0.0, 0.0, 1.0}, -nz.real())});
        } else {
          psi.radial.push_back(
              detail::beta_pair_term(aform(3, {0.0, 0.0, 1.0}, 0.0), bp, bm));
        }
      } else {
        // a1 = a2 = 0: remaining (1/2) y(ln y - 1) + ... totals -1/2 after the
        // explicit +1/2 above and int ln u = (3/2) y(ln y - 1): add y ln y once
        psi.terms.push_back({1.0, aform(3, {0.0, 0.0, 1.0}, 0.0)});
      }
      return psi;
    }
    case Tag::O22: {
      // psi-hat(yhat) = psi_P1P1(yhat1, yhat2, 2 yhat3)
      Family p = f;
      p.tag = Tag::P1P1;
      HessianPotential base = family_psi(p);
      HessianPotential out;
      out.dim = 3;
      auto compose = [](const AffineForm& l) {
        AffineForm r = l;
        r.a[2] = 2.0 * l.a[2];
        return r;
      };
      for (const auto& t : base.terms) out.terms.push_back({t.c, compose(t.l)});
      for (const auto& r : base.radial) {
        RadialTerm t = r;
        t.arg = compose(r.arg);
        out.radial.push_back(std::move(t));
      }
      return out;
    }
  }
  throw std::logic_error("family_psi: unreachable");
}

// --- metric blocks in action coordinates ------------------------------------------

// printed closed forms where available; Hessian of psi otherwise
inline Mat family_G(const Family& f, const Vec& yv) {
  switch (f.tag) {
    case Tag::UN_RF: {
      double y = toric::ysum(yv);
      double s = family_dlnu_dy(f, y);
      Mat G(yv.size());
      for (std::size_t i = 0; i < yv.size(); ++i)
        for (std::size_t j = 0; j < yv.size(); ++j)
          G(i, j) = (i == j ? 1.0 / yv[i] : 0.0) - 1.0 / y + s;
      return G;
    }
    case Tag::RESOLVED3:
    case Tag::KEPLER_K3_LIFT:
    case Tag::KRF_K3: {
      double a = (f.tag == Tag::RESOLVED3) ? f.a : 0.0;
      double y0 = yv[0], y = yv[1] + yv[2];
      double s = family_dlnu_dy(f, y);
      Mat G(3);
      G(0, 0) = (y + a) / ((y0 + a) * (y - y0));
      G(0, 1) = G(1, 0) = G(0, 2) = G(2, 0) = -1.0 / (y - y0);
      double base = s + 1.0 / (y - y0) - 1.0 / y - 1.0 / (y + a);
      for (int j = 1; j <= 2; ++j)
        for (int k = 1; k <= 2; ++k)
          G(j, k) = base + (j == k ? 1.0 / yv[j] : 0.0);
      return G;
    }
    case Tag::P1P1: {
      double y = yv[2];
      double s = family_dlnu_dy(f, y);
      Mat G(3);
      G(0, 0) = 1.0 / (yv[0] + f.a1) + 1.0 / (y - yv[0]);
      G(1, 1) = 1.0 / (yv[1] + f.a2) + 1.0 / (y - yv[1]);
      G(0, 1) = G(1, 0) = 0.0;
      G(0, 2) = G(2, 0) = -1.0 / (y - yv[0]);
      G(1, 2) = G(2, 1) = -1.0 / (y - yv[1]);
      G(2, 2) = s + 1.0 / (y - yv[0]) - 1.0 / (y + f.a1) + 1.0 / (y - yv[1]) -
                1.0 / (y + f.a2);
      return G;
    }
    case Tag::O22: {
      Family p = f;
      p.tag = Tag::P1P1;
      Vec y = {yv[0], yv[1], 2.0 * yv[2]};
      Mat G = family_G(p, y);
      Mat S(3);
      S(0, 0) = S(1, 1) = 1.0;
      S(2, 2) = 2.0;
      return S.transpose() * G * S;
    }
    default:
      return family_psi(f).hess(yv);
  }
}

// --- quotient map C^n -> O(-n) ------------------------------------------------------

struct QuotientPoint {
  cplx v;
  CVec w;  // w^2..w^n
};

inline QuotientPoint quotient_map(const Family& f, const CVec& z) {
  if (f.tag != Tag::UN_RF)
    throw std::invalid_argument("quotient_map: expects a UN_RF family");
  if (z[0] == cplx(0, 0))
    throw std::domain_error("quotient_map: chart requires z_1 != 0");
  QuotientPoint q;
  q.v = std::pow(z[0], f.n);
  q.w.resize(f.n - 1);
  for (int i = 1; i < f.n; ++i) q.w[i - 1] = z[i] / z[0];
  return q;
}

// pushforward of the C^n metric through the quotient chart (oracle for the
// closed form in family_metric(QUOTIENT_ON))
inline CMat quotient_pushforward(const Family& f, const CVec& z) {
  Family un = f;
  un.tag = Tag::UN_RF;
  CMat Hz = family_metric(un, z);
  const int n = f.n;
  // holomorphic Jacobian d(v, w)/dz
  CMat J(n);
  J(0, 0) = static_cast<double>(n) * std::pow(z[0], n - 1);
  for (int i = 1; i < n; ++i) {
    J(i, 0) = -z[i] / (z[0] * z[0]);
    J(i, i) = 1.0 / z[0];
  }
  return num::herm_pullback(Hz, J.inverse());
}

// printed leading form of omega-hat near the zero section (y ~ u^2/(3 a1 a2),
// y' ~ 2u/(3 a1 a2) substituted into the ansatz, pulled down by v = w^2)
inline CMat family_metric_o22_asymptotic(const Family& f, const CVec& pt) {
  if (!(f.a1 > 0) || !(f.a2 > 0))
    throw std::invalid_argument("O22 asymptotic needs a1, a2 > 0");
  double q1 = 1 + std::norm(pt[0]), q2 = 1 + std::norm(pt[1]);
  double vmod2 = std::norm(pt[2]);
  double k = 3.0 * f.a1 * f.a2;
  CMat H(3);
  H(0, 0) = (f.a1 + vmod2 * q1 * q1 * q2 * q2 / k +
             std::norm(pt[0]) * 2.0 * vmod2 * q1 * q1 * q2 * q2 / k) /
            (q1 * q1);
  H(1, 1) = (f.a2 + vmod2 * q1 * q1 * q2 * q2 / k +
             std::norm(pt[1]) * 2.0 * vmod2 * q1 * q1 * q2 * q2 / k) /
            (q2 * q2);
  H(0, 1) = 2.0 * vmod2 * q1 * q2 / k * std::conj(pt[0]) * pt[1];
  H(1, 0) = std::conj(H(0, 1));
  H(0, 2) = q2 * q1 * q2 / k * std::conj(pt[0]) * pt[2];
  H(2, 0) = std::conj(H(0, 2));
  H(1, 2) = q1 * q1 * q2 / k * std::conj(pt[1]) * pt[2];
  H(2, 1) = std::conj(H(1, 2));
  // y' u/(4|v|^2) -> (q1 q2)^2/(6 a1 a2); the display's single product of
  // (1+|z_k|^2) factors here is short one power
  H(2, 2) = q1 * q1 * q2 * q2 / (2.0 * k);
  return H;
}

// --- polar forms --------------------------------------------------------------------

// standard Eguchi-Hanson form on basis (ds, dtheta, dphi, dpsi):
//   (1-b^2/s^4)^{-1} ds^2 + (s^2/4)(1-b^2/s^4)(dpsi + cos th dphi)^2
//   + (s^2/4)(dth^2 + sin^2 th dphi^2)
inline Mat eh_polar_metric(double b, double s, double th) {
  if (!(s * s * s * s > b * b))
    throw std::domain_error("eh_polar_metric: s^4 <= b^2");
  double fac = 1.0 - b * b / (s * s * s * s);
  Mat g(4);
  g(0, 0) = 1.0 / fac;
  g(1, 1) = s * s / 4.0;
  double C = s * s / 4.0 * fac;
  g(2, 2) = s * s / 4.0 * std::sin(th) * std::sin(th) + C * std::cos(th) * std::cos(th);
  g(3, 3) = C;
  g(2, 3) = g(3, 2) = C * std::cos(th);
  return g;
}

// chart point of the (z, w) Calabi ansatz corresponding to polar data; the
// fiber phase is beta = -(psi + phi)/2, which reproduces the +cos(theta)
// convention of the standard form
inline CVec eh_polar_to_chart(double b, double s, double th, double ph, double ps) {
  double r = std::pow(s * s * s * s - b * b, 0.25);
  double beta = -0.5 * (ps + ph);
  cplx z = std::polar(std::tan(0.5 * th), ph);
  cplx w = std::polar(r * std::cos(0.5 * th), beta);
  return {z, w};
}

// ansatz metric pulled back to (s, th, phi, psi) via the fd Jacobian
inline Mat eh_polar_pullback(const Family& f, double s, double th, double ph,
                             double ps) {
  double b = std::sqrt(f.c2);
  auto embed = [&](const Vec& q) {
    CVec zw = eh_polar_to_chart(b, q[0], q[1], q[2], q[3]);
    return Vec{zw[0].real(), zw[0].imag(), zw[1].real(), zw[1].imag()};
  };
  Vec q0 = {s, th, ph, ps};
  num::RectMatrix J = num::fd_jacobian(embed, q0);
  CVec zw = eh_polar_to_chart(b, s, th, ph, ps);
  // the polar displays use the Hermitian normalization g = Re sum h dz dzbar,
  // which is half of the omega-compatible Riemannian form
  Mat Gr = toric::riemannian_real(family_metric(f, zw)) * 0.5;
  // embed is interleaved (Re z, Im z, Re w, Im w); riemannian_real is
  // (Re z, Re w, Im z, Im w)
  Mat Gperm(4);
  auto idx = [](int i) { return (i % 2 == 0) ? i / 2 : 2 + i / 2; };
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) Gperm(i, j) = Gr(idx(i), idx(j));
  return num::pullback(Gperm, J);
}

// P1 x P1 polar form on basis (dr, dth1, dphi1, dth2, dphi2, dpsi):
//   y' dr^2 + sum 1/4 (a_j + y)(dth_j^2 + sin^2 th_j dphi_j^2)
//   + (1/4) u y' (dpsi + cos th1 dphi1 + cos th2 dphi2)^2
inline Mat p1p1_polar_metric(const Family& f, double r, double th1, double th2) {
  UProfile up = family_uprofile(f);
  double u = r * r;
  double y = up.y(u), yp = up.yprime(u);
  Mat g(6);
  g(0, 0) = yp;
  double C = 0.25 * u * yp;
  double B1 = 0.25 * (f.a1 + y), B2 = 0.25 * (f.a2 + y);
  g(1, 1) = B1;
  g(3, 3) = B2;
  g(2, 2) = B1 * std::sin(th1) * std::sin(th1) + C * std::cos(th1) * std::cos(th1);
  g(4, 4) = B2 * std::sin(th2) * std::sin(th2) + C * std::cos(th2) * std::cos(th2);
  g(5, 5) = C;
  g(2, 5) = g(5, 2) = C * std::cos(th1);
  g(4, 5) = g(5, 4) = C * std::cos(th2);
  g(2, 4) = g(4, 2) = C * std::cos(th1) * std::cos(th2);
  return g;
}

inline CVec p1p1_polar_to_chart(double r, double th1, double ph1, double th2,
                                double ph2, double ps) {
  double beta = -0.5 * (ps + ph1 + ph2);
  cplx z1 = std::polar(std::tan(0.5 * th1), ph1);
  cplx z2 = std::polar(std::tan(0.5 * th2), ph2);
  cplx w = std::polar(r * std::cos(0.5 * th1) * std::cos(0.5 * th2), beta);
  return {z1, z2, w};
}

inline Mat p1p1_polar_pullback(const Family& f, double r, double th1, double ph1,
                               double th2, double ph2, double ps) {
  auto embed = [&](const Vec& q) {
    CVec zw = p1p1_polar_to_chart(q[0], q[1], q[2], q[3], q[4], q[5]);
    Vec out(6);
    for (int i = 0; i < 3; ++i) {
      out[2 * i] = zw[i].real();
      out[2 * i + 1] = zw[i].imag();
    }
    return out;
  };
  Vec q0 = {r, th1, ph1, th2, ph2, ps};
  num::RectMatrix J = num::fd_jacobian(embed, q0);
  CVec zw = p1p1_polar_to_chart(r, th1, ph1, th2, ph2, ps);
  CMat H = family_metric(f, zw);
  // Hermitian normalization (see eh_polar_pullback), then reorder from
  // (x1..xn, y1..yn) to the interleaved embedding layout
  Mat Gr = toric::riemannian_real(H) * 0.5;
  Mat Gperm(6);
  auto idx = [](int i) { return (i % 2 == 0) ? i / 2 : 3 + i / 2; };
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) Gperm(i, j) = Gr(idx(i), idx(j));
  return num::pullback(Gperm, J);
}

// --- moment polytopes ------------------------------------------------------------

struct ConvexDomain {
  // a . y + b >= 0 for each inequality
  std::vector<std::pair<Vec, double>> inequalities;
  std::vector<Vec> generators;  // recession-cone generators (if conical part)
  std::vector<Vec> vertices;
  struct Edge {
    Vec base, dir;
    double t_lo, t_hi;  // t_hi < 0 means unbounded ray
  };
  std::vector<Edge> edges;

  double min_slack(const Vec& y) const {
    double m = 1e300;
    for (const auto& [a, b] : inequalities)
      m = std::min(m, num::dot(a, y) + b);
    return m;
  }
};

inline ConvexDomain moment_polytope(const Family& f) {
  ConvexDomain d;
  auto ray = [](Vec base, Vec dir) {
    return ConvexDomain::Edge{std::move(base), std::move(dir), 0.0, -1.0};
  };
  switch (f.tag) {
    case Tag::UN_RF: {
      std::size_t n = f.n;
      for (std::size_t i = 0; i < n; ++i) {
        Vec a(n, 0.0);
        a[i] = 1.0;
        d.inequalities.push_back({a, 0.0});
        d.generators.push_back(a);
        Vec v(n, 0.0);
        v[i] = f.b;
        d.vertices.push_back(v);
      }
      d.inequalities.push_back({Vec(n, 1.0), -f.b});
      break;
    }
    case Tag::QUOTIENT_ON: {
      std::size_t n = f.n;
      Vec e1(n, 0.0);
      e1[0] = 1.0;
      d.inequalities.push_back({e1, 0.0});  // x1 >= 0
      for (std::size_t j = 1; j < n; ++j) {
        Vec a(n, 0.0);
        a[j] = 1.0;
        a[0] = 1.0 / f.n;
        d.inequalities.push_back({a, 0.0});  // x_j + x_1/n >= 0
      }
      d.inequalities.push_back({Vec(n, 1.0), -f.b});  // sum x >= b
      break;
    }
    case Tag::EH: {
      d.inequalities.push_back({{1.0, 0.0}, f.a});    // y0 + a >= 0
      d.inequalities.push_back({{-1.0, 1.0}, 0.0});   // y - y0 >= 0
      d.inequalities.push_back({{0.0, 1.0}, f.a - std::sqrt(f.c2)});
      break;
    }
    case Tag::KEPLER_K3_LIFT:
    case Tag::KRF_K3: {
      d.inequalities.push_back({{1.0, 0.0, 0.0}, 0.0});
      d.inequalities.push_back({{0.0, 1.0, 0.0}, 0.0});
      d.inequalities.push_back({{0.0, 0.0, 1.0}, 0.0});
      d.inequalities.push_back({{-1.0, 1.0, 1.0}, 0.0});
      d.generators = {{1, 1, 0}, {1, 0, 1}, {0, 1, 0}, {0, 0, 1}};
      d.vertices = {{0, 0, 0}};
      for (const auto& g : d.generators) d.edges.push_back(ray({0, 0, 0}, g));
      break;
    }
    case Tag::RESOLVED3: {
      double a = f.a;
      d.inequalities.push_back({{0.0, 1.0, 0.0}, 0.0});   // y1 >= 0
      d.inequalities.push_back({{0.0, 0.0, 1.0}, 0.0});   // y2 >= 0
      d.inequalities.push_back({{1.0, 0.0, 0.0}, a});     // y0 >= -a
      d.inequalities.push_back({{-1.0, 1.0, 1.0}, 0.0});  // y1 + y2 - y0 >= 0
      d.vertices = {{0, 0, 0}, {-a, 0, 0}};
      // the five edges (the printed "1 <= t <= 1" interval is 0 <= t <= 1)
      d.edges.push_back(ray({0, 0, 0}, {1, 1, 0}));
      d.edges.push_back(ray({0, 0, 0}, {1, 0, 1}));
      d.edges.push_back(ray({-a, 0, 0}, {0, 1, 0}));
      d.edges.push_back(ray({-a, 0, 0}, {0, 0, 1}));
      d.edges.push_back({{0, 0, 0}, {-a, 0, 0}, 0.0, 1.0});
      d.generators = {{1, 1, 0}, {1, 0, 1}, {0, 1, 0}, {0, 0, 1}};
      break;
    }
    case Tag::P1P1: {
      d.inequalities.push_back({{1.0, 0.0, 0.0}, f.a1});   // y1 >= -a1
      d.inequalities.push_back({{0.0, 1.0, 0.0}, f.a2});   // y2 >= -a2
      d.inequalities.push_back({{-1.0, 0.0, 1.0}, 0.0});   // y3 >= y1
      d.inequalities.push_back({{0.0, -1.0, 1.0}, 0.0});   // y3 >= y2
      d.inequalities.push_back({{0.0, 0.0, 1.0}, 0.0});    // y3 >= 0
      d.generators = {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
      d.vertices = {{-f.a1, -f.a2, 0}};
      if (f.a1 > 0) d.vertices.push_back({0, -f.a2, 0});
      if (f.a2 > 0) d.vertices.push_back({-f.a1, 0, 0});
      if (f.a1 > 0 && f.a2 > 0) d.vertices.push_back({0, 0, 0});
      break;
    }
    case Tag::O22: {
      d.inequalities.push_back({{1.0, 0.0, 0.0}, f.a1});
      d.inequalities.push_back({{0.0, 1.0, 0.0}, f.a2});
      d.inequalities.push_back({{-0.5, 0.0, 1.0}, 0.0});  // yhat3 >= yhat1/2
      d.inequalities.push_back({{0.0, -0.5, 1.0}, 0.0});  // yhat3 >= yhat2/2
      d.inequalities.push_back({{0.0, 0.0, 1.0}, 0.0});
      break;
    }
  }
  return d;
}

// --- random chart sampling ---------------------------------------------------------

inline Vec random_radii(const Family& f, num::Rng& rng, double lo = 0.1,
                        double hi = 1.6) {
  std::size_t m = 0;
  switch (f.tag) {
    case Tag::UN_RF:
    case Tag::QUOTIENT_ON: m = f.n; break;
    case Tag::EH: m = 2; break;
    default: m = 3; break;
  }
  Vec r(m);
  for (auto& x : r) x = rng.uniform(lo, hi);
  return r;
}

inline CVec random_chart_point(const Family& f, num::Rng& rng, double lo = 0.2,
                               double hi = 1.4) {
  Vec r = random_radii(f, rng, lo, hi);
  CVec z(r.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    z[i] = std::polar(r[i], rng.uniform(0.0, 6.283185307179586));
  return z;
}

}  // namespace fam
}  // namespace kgeom
