#pragma once

// U(n)-symmetric Kaehler metrics on C^n - {0} in symplectic coordinates:
// moment map, the metric blocks G_ij / G^ij, the complex potential psi and
// its Legendre dual, the Ricci form in symplectic coordinates, the scalar
// curvature by three routes (closed form, Abreu double divergence, log-det),
// Einstein / constant-scalar-curvature profiles by quadrature, the SYZ dual
// metric, and generic Hessian-Kaehler evaluation.
//
// A profile is the single degree of freedom u(y): y_i = |z_i|^2 phi'(u) are
// the action coordinates, y = sum y_i = u phi'(u), and every profile here is
// encoded through d(log u)/dy = y^{n-1} / D(y) for a polynomial D.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "numkit.hpp"

namespace kgeom {
namespace toric {

using num::CMat;
using num::CVec;
using num::Mat;
using num::RectMatrix;
using num::Vec;
using num::cplx;

// --- small polynomial --------------------------------------------------------

struct Poly {
  Vec c;  // c[k] y^k

  double operator()(double y) const {
    double s = 0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * y + c[k];
    return s;
  }
  double d1(double y) const {
    double s = 0;
    for (std::size_t k = c.size(); k-- > 1;) s = s * y + k * c[k];
    return s;
  }
  double d2(double y) const {
    double s = 0;
    for (std::size_t k = c.size(); k-- > 2;) s = s * y + k * (k - 1) * c[k];
    return s;
  }
};

struct DomainSplitError : std::domain_error {
  double root;
  DomainSplitError(const std::string& msg, double r)
      : std::domain_error(msg), root(r) {}
};

// --- radial profile u(y) -------------------------------------------------------

class Profile {
 public:
  int n = 2;
  std::string family;
  double y_lo = 1e-3, y_hi = 1e3;

  double u(double y) const {
    check_domain(y);
    if (u_closed_) return u_closed_(y);
    return std::exp(lnu(y));
  }
  double lnu(double y) const {
    check_domain(y);
    if (lnu_closed_) return lnu_closed_(y);
    return lnu0_ + (*lnu_cache_)(y);
  }
  // d ln u / dy = y^{n-1} / D(y)
  double g(double y) const { return std::pow(y, n - 1) / D(y); }
  double g1(double y) const {
    double d = D(y), dp = D.d1(y);
    return (n - 1) * std::pow(y, n - 2) / d - std::pow(y, n - 1) * dp / (d * d);
  }
  double g2(double y) const {
    double d = D(y), dp = D.d1(y), dpp = D.d2(y);
    return (n - 1) * (n - 2) * std::pow(y, n - 3) / d -
           2 * (n - 1) * std::pow(y, n - 2) * dp / (d * d) -
           std::pow(y, n - 1) * dpp / (d * d) +
           2 * std::pow(y, n - 1) * dp * dp / (d * d * d);
  }
  double u1(double y) const { return u(y) * g(y); }
  double u2(double y) const {
    double gg = g(y);
    return u(y) * (gg * gg + g1(y));
  }
  double u3(double y) const {
    double gg = g(y), gp = g1(y);
    return u(y) * (gg * gg * gg + 3 * gg * gp + g2(y));
  }

  double y_of_u(double uu) const {
    if (y_of_u_closed_) return y_of_u_closed_(uu);
    double target = std::log(uu);
    double y = num::invert_monotone([this](double t) { return lnu(t); }, target,
                                    y_lo, y_hi, 1e-10);
    // Newton polish with the analytic derivative g keeps the inverse smooth
    // enough for second differences taken through it
    for (int it = 0; it < 3; ++it) y -= (lnu(y) - target) / g(y);
    return y;
  }

  // F(y) = int ln u dy (family-specific antiderivative; shared by psi and phi)
  double F(double y) const {
    check_domain(y);
    if (F_closed_) return F_closed_(y);
    return (*F_cache_)(y);
  }
  // Kaehler potential as a function of y: phi = y ln u - int ln u dy
  double phi(double y) const { return y * lnu(y) - F(y); }

  Poly D;

  // --- factories --------------------------------------------------------------

  static Profile flat(int n) {
    Profile p;
    p.n = n;
    p.family = "flat";
    p.D.c.assign(n + 1, 0.0);
    p.D.c[n] = 1.0;
    p.u_closed_ = [](double y) { return y; };
    p.lnu_closed_ = [](double y) { return std::log(y); };
    p.y_of_u_closed_ = [](double uu) { return uu; };
    p.F_closed_ = [](double y) { return y * (std::log(y) - 1.0); };
    return p;
  }

  // u = (y^n - b^n)^{1/n} on y > b (the U(n) Ricci-flat family)
  static Profile b_family(int n, double b, double y_hi = 1e3) {
    Profile p;
    p.n = n;
    p.family = "b_family";
    p.y_lo = b + 1e-6 * (1 + b);
    p.y_hi = y_hi;
    p.D.c.assign(n + 1, 0.0);
    p.D.c[n] = 1.0;
    p.D.c[0] = -std::pow(b, n);
    double bn = std::pow(b, n);
    p.u_closed_ = [n, bn](double y) { return std::pow(std::pow(y, n) - bn, 1.0 / n); };
    p.lnu_closed_ = [n, bn](double y) {
      return std::log(std::pow(y, n) - bn) / n;
    };
    p.y_of_u_closed_ = [n, bn](double uu) {
      return std::pow(std::pow(uu, n) + bn, 1.0 / n);
    };
    // (1/n) sum_j (y - b xi^j)(ln(y - b xi^j) - 1) over the n-th roots of
    // unity, conjugate pairs folded into real log/atan2 terms
    p.F_closed_ = [n, b](double y) {
      double s = 0;
      for (int j = 0; j < n; ++j) {
        double ang = 2.0 * 3.14159265358979323846 * j / n;
        double pr = b * std::cos(ang), qi = b * std::sin(ang);
        if (2 * j == n || j == 0) {
          s += (y - pr) * (std::log(y - pr) - 1.0);
        } else if (2 * j < n) {
          // pair (j, n-j)
          double L = 0.5 * std::log((y - pr) * (y - pr) + qi * qi);
          double A = std::atan2(-qi, y - pr);
          s += 2.0 * ((y - pr) * (L - 1.0) + qi * A);
        }
      }
      return s / n;
    };
    return p;
  }

  // Einstein profile: int y^{n-1} dy / (-lambda/(n+1) y^{n+1} + y^n + C1) = ln u
  static Profile einstein(int n, double lambda, double C1, double y_lo = 1e-2,
                          double y_hi = 50.0, double y0 = 1.0, double u0 = 1.0) {
    Profile p;
    p.n = n;
    p.family = "einstein";
    p.D.c.assign(n + 2, 0.0);
    p.D.c[n + 1] = -lambda / (n + 1.0);
    p.D.c[n] = 1.0;
    p.D.c[0] = C1;
    p.init_quadrature(y_lo, y_hi, y0, u0);
    return p;
  }

  // constant scalar curvature R: denominator -R/(n+1) y^{n+1} + y^n + C1 y + C2
  static Profile csc(int n, double R, double C1, double C2, double y_lo = 1e-2,
                     double y_hi = 50.0, double y0 = 1.0, double u0 = 1.0) {
    Profile p;
    p.n = n;
    p.family = "csc";
    p.D.c.assign(n + 2, 0.0);
    p.D.c[n + 1] = -R / (n + 1.0);
    p.D.c[n] = 1.0;
    p.D.c[1] = C1;
    p.D.c[0] = C2;
    p.init_quadrature(y_lo, y_hi, y0, u0);
    return p;
  }

 private:
  void check_domain(double y) const {
    if (y < y_lo * (1 - 1e-12) || y > y_hi * (1 + 1e-12))
      throw std::domain_error(family + ": y outside profile domain");
  }

  void init_quadrature(double lo, double hi, double y0, double u0) {
    y_lo = lo;
    y_hi = hi;
    // the denominator must be positive across the working interval
    const int scan = 512;
    double prev = D(lo);
    for (int k = 1; k <= scan; ++k) {
      double y = lo + (hi - lo) * k / scan;
      double v = D(y);
      if (prev <= 0 || v <= 0) {
        double a = lo + (hi - lo) * (k - 1) / scan;
        double root = num::invert_monotone([this](double t) { return D(t); }, 0.0,
                                           std::min(a, y), std::max(a, y), 1e-12);
        throw DomainSplitError(family + ": denominator root inside interval", root);
      }
      prev = v;
    }
    auto D_ = D;
    int n_ = n;
    // interpolation budget tight enough that second differences taken
    // through the cache stay below the 1e-5 cross-check tolerances
    lnu_cache_ = std::make_shared<num::Antiderivative>(
        [D_, n_](double y) { return std::pow(y, n_ - 1) / D_(y); }, y0, lo, hi,
        1e-12);
    lnu0_ = std::log(u0);
    auto cache = lnu_cache_;
    double base = lnu0_;
    F_cache_ = std::make_shared<num::Antiderivative>(
        [cache, base](double y) { return base + (*cache)(y); }, y0, lo, hi, 1e-12);
  }

  std::function<double(double)> u_closed_, lnu_closed_, y_of_u_closed_, F_closed_;
  std::shared_ptr<num::Antiderivative> lnu_cache_, F_cache_;
  double lnu0_ = 0.0;
};

// --- moment map and metric blocks ---------------------------------------------

// y_i = |z_i|^2 phi'(u), phi'(u) = y(u)/u
inline Vec moment_map(const Profile& p, const CVec& z) {
  double uz = num::cnorm2(z);
  if (uz <= 0) throw std::domain_error("moment_map: z = 0");
  double y = p.y_of_u(uz);
  double phip = y / uz;
  if (!(phip > 0)) throw std::domain_error("moment_map: phi'(u) <= 0");
  Vec out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::norm(z[i]) * phip;
  return out;
}

inline double ysum(const Vec& yv) {
  double s = 0;
  for (double v : yv) s += v;
  return s;
}

struct BoundaryError : std::domain_error {
  using std::domain_error::domain_error;
};

// G_ij = delta_ij / y_i - 1/y + u'/u,  G^ij = y_i delta_ij + (u/(y^2 u') - 1/y) y_i y_j
inline std::pair<Mat, Mat> metric_G(const Profile& p, const Vec& yv) {
  const std::size_t n = yv.size();
  for (double v : yv)
    if (!(v > 0)) throw BoundaryError("metric_G: y_i must be positive");
  double y = ysum(yv);
  double uu = p.u(y), up = p.u1(y);
  double q = up / uu - 1.0 / y;
  double tau = uu / (y * y * up) - 1.0 / y;
  Mat G(n), Gi(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      G(i, j) = (i == j ? 1.0 / yv[i] : 0.0) + q;
      Gi(i, j) = (i == j ? yv[i] : 0.0) + tau * yv[i] * yv[j];
    }
  return {G, Gi};
}

// --- Hessian potentials ---------------------------------------------------------

struct AffineForm {
  Vec a;
  double b = 0.0;
  double eval(const Vec& y) const { return num::dot(a, y) + b; }
};

struct LogTerm {
  double c;
  AffineForm l;  // contributes c * l (ln l - 1)
};

// a term of the form val(arg(y)) with arg affine (e.g. the quadrature part
// int ln u dy, or folded complex-pair logarithms)
struct RadialTerm {
  AffineForm arg;
  std::function<double(double)> val, d1, d2;
};

struct HessianPotential {
  std::size_t dim = 0;
  std::vector<LogTerm> terms;
  std::vector<RadialTerm> radial;

  double value(const Vec& y) const {
    double s = 0;
    for (const auto& t : terms) {
      double l = t.l.eval(y);
      if (!(l > 0)) throw std::domain_error("HessianPotential: l(y) <= 0");
      s += t.c * l * (std::log(l) - 1.0);
    }
    for (const auto& r : radial) s += r.val(r.arg.eval(y));
    return s;
  }

  Vec grad(const Vec& y) const {
    Vec g(dim, 0.0);
    for (const auto& t : terms) {
      double l = t.l.eval(y);
      if (!(l > 0)) throw std::domain_error("HessianPotential: l(y) <= 0");
      double w = t.c * std::log(l);
      for (std::size_t i = 0; i < dim; ++i) g[i] += w * t.l.a[i];
    }
    for (const auto& r : radial) {
      double w = r.d1(r.arg.eval(y));
      for (std::size_t i = 0; i < dim; ++i) g[i] += w * r.arg.a[i];
    }
    return g;
  }

  Mat hess(const Vec& y) const {
    Mat H(dim);
    for (const auto& t : terms) {
      double l = t.l.eval(y);
      if (!(l > 0)) throw std::domain_error("HessianPotential: l(y) <= 0");
      double w = t.c / l;
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) H(i, j) += w * t.l.a[i] * t.l.a[j];
    }
    for (const auto& r : radial) {
      double w = r.d2(r.arg.eval(y));
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) H(i, j) += w * r.arg.a[i] * r.arg.a[j];
    }
    return H;
  }
};

inline AffineForm coordinate_form(std::size_t dim, std::size_t i) {
  AffineForm f;
  f.a.assign(dim, 0.0);
  f.a[i] = 1.0;
  return f;
}

inline AffineForm sum_form(std::size_t dim) {
  AffineForm f;
  f.a.assign(dim, 1.0);
  return f;
}

// psi = sum y_i (ln y_i - 1) - y (ln y - 1) + int ln u dy
inline HessianPotential complex_potential(const Profile& p, std::size_t dim) {
  HessianPotential psi;
  psi.dim = dim;
  for (std::size_t i = 0; i < dim; ++i)
    psi.terms.push_back({1.0, coordinate_form(dim, i)});
  psi.terms.push_back({-1.0, sum_form(dim)});
  RadialTerm quad;
  quad.arg = sum_form(dim);
  quad.val = [p](double y) { return p.F(y); };
  quad.d1 = [p](double y) { return p.lnu(y); };
  quad.d2 = [p](double y) { return p.u1(y) / p.u(y); };
  psi.radial.push_back(quad);
  return psi;
}

// --- Legendre duality ------------------------------------------------------------

// dual coordinates y_i^v = d psi / d y_i; for the U(n) potential these are
// ln(y_i u(y)/y) = 2 ln r_i
inline Vec dual_coords(const HessianPotential& psi, const Vec& y) {
  return psi.grad(y);
}

inline double legendre_value(const HessianPotential& psi, const Vec& y) {
  Vec g = psi.grad(y);
  return num::dot(y, g) - psi.value(y);
}

// invert y^v = grad psi(y) by Newton iteration (Hessian is available)
inline Vec newton_from_dual(const HessianPotential& psi, const Vec& ydual,
                            Vec guess, int max_iter = 80) {
  for (int it = 0; it < max_iter; ++it) {
    Vec g = psi.grad(guess);
    Vec r(g.size());
    double nr = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      r[i] = g[i] - ydual[i];
      nr = std::max(nr, std::abs(r[i]));
    }
    if (nr < 1e-13) return guess;
    Mat H = psi.hess(guess);
    Vec step = H.inverse().mul(r);
    // damped update keeping y in the positive domain
    double lam = 1.0;
    for (int back = 0; back < 40; ++back) {
      bool ok = true;
      Vec trial(guess.size());
      for (std::size_t i = 0; i < guess.size(); ++i) {
        trial[i] = guess[i] - lam * step[i];
      }
      try {
        psi.grad(trial);
      } catch (const std::domain_error&) {
        ok = false;
      }
      if (ok) {
        guess = trial;
        break;
      }
      lam *= 0.5;
    }
  }
  return guess;
}

// closed inverse for the U(n) family: u(y) = sum exp(y_i^v)
inline Vec y_from_dual(const Profile& p, const Vec& ydual) {
  double s = 0;
  for (double v : ydual) s += std::exp(v);
  double y = p.y_of_u(s);
  Vec out(ydual.size());
  for (std::size_t i = 0; i < ydual.size(); ++i)
    out[i] = std::exp(ydual[i]) * y / s;
  return out;
}

// psi^v as a function of y^v (for fd Hessians in the dual variables)
inline double psi_dual_at(const HessianPotential& psi, const Profile& p,
                          const Vec& ydual) {
  Vec y = y_from_dual(p, ydual);
  return legendre_value(psi, y);
}

// --- Ricci form in symplectic coordinates ----------------------------------------

// sigma(y) = u Phi'(u) / y = -u u''/(y u'^2) + (n-1) u/(y^2 u') - (n-1)/y;
// the Ricci form is rho = - sum_i d(sigma y_i) ^ d theta_i and rho = lambda
// omega iff sigma = -lambda.
inline double ricci_coefficient(const Profile& p, double y) {
  double uu = p.u(y), up = p.u1(y), upp = p.u2(y);
  return -uu * upp / (y * up * up) + (p.n - 1) * uu / (y * y * up) -
         (p.n - 1) / y;
}

inline double ricci_coefficient_d1(const Profile& p, double y) {
  double uu = p.u(y), u1 = p.u1(y), u2 = p.u2(y), u3 = p.u3(y);
  double m = p.n - 1.0;
  double t1 = -(u1 * u2 + uu * u3) / (y * u1 * u1) +
              uu * u2 / (y * y * u1 * u1) +
              2 * uu * u2 * u2 / (y * u1 * u1 * u1);
  double t2 = m * (1.0 / (y * y) - 2 * uu / (y * y * y * u1) -
                   uu * u2 / (y * y * u1 * u1));
  double t3 = m / (y * y);
  return t1 + t2 + t3;
}

// matrix M_ij = -d(sigma y_i)/dy_j; rho = sum_ij M_ij dy_j ^ dtheta_i
inline Mat ricci_symplectic_matrix(const Profile& p, const Vec& yv) {
  const std::size_t n = yv.size();
  double y = ysum(yv);
  double sig = ricci_coefficient(p, y);
  double sigp = ricci_coefficient_d1(p, y);
  Mat M(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      M(i, j) = -(sigp * yv[i] + (i == j ? sig : 0.0));
  return M;
}

// --- complex-side helpers ----------------------------------------------------------

// Kaehler matrix h_ij = phi' delta_ij + phi'' zbar_i z_j at z
inline CMat kahler_matrix_z(const Profile& p, const CVec& z) {
  double uz = num::cnorm2(z);
  double y = p.y_of_u(uz);
  double up = p.u1(y);
  double phip = y / uz;
  double phipp = (1.0 / up - y / uz) / uz;
  const std::size_t n = z.size();
  CMat H(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      H(i, j) = (i == j ? phip : 0.0) + phipp * std::conj(z[i]) * z[j];
  return H;
}

// log of the volume density: log det h = log[y'(u) (y/u)^{n-1}]
inline double log_volume_density(const Profile& p, const CVec& z) {
  double uz = num::cnorm2(z);
  double y = p.y_of_u(uz);
  double up = p.u1(y);
  return -std::log(up) + (p.n - 1) * (std::log(y) - std::log(uz));
}

// real antisymmetric matrix of omega = i sum H_jk dz_j ^ dzbar_k on the
// basis (x_1..x_n, y_1..y_n), z = x + iy
inline Mat real_form_matrix(const CMat& H) {
  const std::size_t n = H.size();
  Mat W(2 * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      W(j, k) = -2.0 * H(j, k).imag();
      W(j, k + n) = 2.0 * H(j, k).real();
      W(j + n, k) = -2.0 * H(k, j).real();
      W(j + n, k + n) = -2.0 * H(j, k).imag();
    }
  return W;
}

// real Riemannian matrix of the Hermitian metric (g = omega(., J.))
inline Mat riemannian_real(const CMat& H) {
  const std::size_t n = H.size();
  Mat G(2 * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      G(j, k) = 2.0 * H(j, k).real();
      G(j, k + n) = 2.0 * H(j, k).imag();
      G(j + n, k) = -2.0 * H(j, k).imag();
      G(j + n, k + n) = 2.0 * H(j, k).real();
    }
  return G;
}

// --- scalar curvature, three routes --------------------------------------------

// All three routes report R in the normalization rho ^ omega^{n-1} = R omega^n
// (so the einstein profile has R = lambda). The displayed closed form and the
// double divergence - sum d^2 G^ij/dy_i dy_j evaluate to n R in this
// normalization (the derivation passes through n R = -y sigma' - n sigma),
// hence the 1/n below.
struct ScalarCurvature {
  double closed;  // u(y)-derivative closed form / n
  double abreu;   // -(1/n) sum d^2 G^ij / dy_i dy_j (fd of the closed G^ij)
  double logdet;  // complex-side (1/n) tr(h^{-1} (-ddbar log det h))
};

inline double scalar_closed(const Profile& p, double y) {
  double uu = p.u(y), up = p.u1(y), upp = p.u2(y), uppp = p.u3(y);
  double n = p.n;
  double nr = upp / up + (n - 1) * (n - 2) / y +
              2 * (n - 1) * uu * upp / (up * up * y) -
              (n - 2) * (n - 1) * uu / (y * y * up) + uu * uppp / (up * up) -
              2 * uu * upp * upp / (up * up * up);
  return nr / n;
}

inline double scalar_abreu(const Profile& p, const Vec& yv) {
  const std::size_t n = yv.size();
  double s = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto entry = [&](const Vec& yy) {
        double Y = ysum(yy);
        double tau = p.u(Y) / (Y * Y * p.u1(Y)) - 1.0 / Y;
        return (i == j ? yy[i] : 0.0) + tau * yy[i] * yy[j];
      };
      Mat H = num::fd_hessian(entry, yv, 1e-3 * (1 + num::norm(yv)));
      s += H(i, j);
    }
  return -s / static_cast<double>(n);
}

inline double scalar_logdet(const Profile& p, const Vec& yv) {
  const std::size_t n = yv.size();
  double y = ysum(yv);
  double uz = p.u(y);
  CVec z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = std::sqrt(yv[i] * uz / y);
  auto ld = [&](const CVec& zz) { return log_volume_density(p, zz); };
  CMat P = num::fd_ddbar(ld, z);
  CMat h = kahler_matrix_z(p, z);
  CMat prod = h.inverse() * P;
  cplx tr = 0;
  for (std::size_t i = 0; i < n; ++i) tr += prod(i, i);
  return -tr.real() / static_cast<double>(n);
}

inline ScalarCurvature scalar_curvature(const Profile& p, const Vec& yv) {
  return {scalar_closed(p, ysum(yv)), scalar_abreu(p, yv), scalar_logdet(p, yv)};
}

// --- SYZ dual metric ---------------------------------------------------------------

struct SyzDual {
  Mat metric_block;  // Hess psi at y (both the dy^2 and dtheta^v blocks)
  Mat dual_ricci;    // - d^2 log det Hess psi / dy_i dy_j
};

inline SyzDual syz_dual(const HessianPotential& psi, const Vec& y) {
  SyzDual out;
  out.metric_block = psi.hess(y);
  auto ld = [&](const Vec& yy) {
    return std::log(std::abs(psi.hess(yy).det()));
  };
  Mat H = num::fd_hessian(ld, y, 1e-3 * (1 + num::norm(y)));
  out.dual_ricci = H * (-1.0);
  return out;
}

// --- generic Hessian-Kaehler evaluation ----------------------------------------------

struct HessianKahler {
  Mat omega;      // G^ij = Hess_{y^v} psi^v (the Kaehler matrix in w = y^v/2 + i theta)
  Mat ricci;      // - d^2 log det(G^ij) / dy^v_i dy^v_j
  double scalar;  // -(1/n) sum d^2 G^ij / dy_i dy_j  (= (1/n) tr(G rho))
};

inline HessianKahler hessian_kahler_at_y(const HessianPotential& psi, const Vec& y);

// evaluation at a point in the dual coordinates; `guess` seeds the Newton
// inversion of grad psi
inline HessianKahler hessian_kahler(const HessianPotential& psi, const Vec& ydual,
                                    const Vec& guess) {
  return hessian_kahler_at_y(psi, newton_from_dual(psi, ydual, guess));
}

inline HessianKahler hessian_kahler_at_y(const HessianPotential& psi, const Vec& y) {
  HessianKahler out;
  Mat G = psi.hess(y);
  out.omega = G.inverse();
  // Ricci in the dual variables: move along y^v by re-solving for y
  Vec yd = psi.grad(y);
  auto logdet_dual = [&](const Vec& ydual) {
    Vec yy = newton_from_dual(psi, ydual, y);
    return std::log(std::abs(psi.hess(yy).inverse().det()));
  };
  Mat H = num::fd_hessian(logdet_dual, yd, 1e-4 * (1 + num::norm(yd)));
  out.ricci = H * (-1.0);
  // Abreu route for the scalar
  const std::size_t n = y.size();
  double s = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto entry = [&](const Vec& yy) { return psi.hess(yy).inverse()(i, j); };
      Mat E = num::fd_hessian(entry, y, 1e-3 * (1 + num::norm(y)));
      s += E(i, j);
    }
  out.scalar = -s / static_cast<double>(n);
  return out;
}

}  // namespace toric
}  // namespace kgeom
