#pragma once

// Self-contained numerical kernel: small dense real/complex linear algebra,
// finite-difference oracles, adaptive Gauss-Kronrod quadrature, monotone
// inversion, cubic root finding. Everything here is pure and reentrant.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace kgeom {
namespace num {

using cplx = std::complex<double>;
using Vec = std::vector<double>;
using CVec = std::vector<cplx>;

// ---------------------------------------------------------------------------
// errors
// ---------------------------------------------------------------------------

struct ToleranceError : std::runtime_error {
  double best;  // best estimate when the refinement budget ran out
  ToleranceError(const std::string& msg, double best_estimate)
      : std::runtime_error(msg), best(best_estimate) {}
};

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PositivityError : std::runtime_error {
  double eigenvalue;
  PositivityError(const std::string& msg, double eig)
      : std::runtime_error(msg), eigenvalue(eig) {}
};

// ---------------------------------------------------------------------------
// deterministic RNG (bit-stable across platforms; std distributions avoided)
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next() {
    // xorshift* variant; fixed algorithm, no library dependence
    std::uint64_t x = s_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    s_ = x;
    return x * 0x2545f4914f6cdd1dull;
  }

  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  double gauss() {
    double u1 = u01(), u2 = u01();
    while (u1 <= 1e-300) u1 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  Vec vec(std::size_t n, double a, double b) {
    Vec v(n);
    for (auto& x : v) x = uniform(a, b);
    return v;
  }

  Vec gauss_vec(std::size_t n) {
    Vec v(n);
    for (auto& x : v) x = gauss();
    return v;
  }

  Vec unit_vec(std::size_t n) {
    Vec v = gauss_vec(n);
    double s = 0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    if (s < 1e-12) return unit_vec(n);
    for (auto& x : v) x /= s;
    return v;
  }

  CVec cvec(std::size_t n, double a, double b) {
    CVec v(n);
    for (auto& z : v) z = cplx(uniform(a, b), uniform(a, b));
    return v;
  }

 private:
  std::uint64_t s_;
};

// ---------------------------------------------------------------------------
// small vector helpers
// ---------------------------------------------------------------------------

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec axpy(double a, const Vec& x, const Vec& y) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i] + y[i];
  return r;
}

inline double cnorm2(const CVec& z) {
  double s = 0;
  for (const auto& w : z) s += std::norm(w);
  return s;
}

// ---------------------------------------------------------------------------
// SquareMatrix: small dense, row-major, real or complex
// ---------------------------------------------------------------------------

template <class T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), a_(n * n, T{}) {}

  static SquareMatrix identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t size() const { return n_; }

  T& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  SquareMatrix operator+(const SquareMatrix& o) const {
    SquareMatrix r(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + o.a_[k];
    return r;
  }
  SquareMatrix operator-(const SquareMatrix& o) const {
    SquareMatrix r(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] - o.a_[k];
    return r;
  }
  SquareMatrix operator*(const SquareMatrix& o) const {
    SquareMatrix r(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < n_; ++k) {
        T aik = (*this)(i, k);
        for (std::size_t j = 0; j < n_; ++j) r(i, j) += aik * o(k, j);
      }
    return r;
  }
  SquareMatrix operator*(T s) const {
    SquareMatrix r(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] * s;
    return r;
  }

  std::vector<T> mul(const std::vector<T>& v) const {
    std::vector<T> r(n_, T{});
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  SquareMatrix transpose() const {
    SquareMatrix r(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  SquareMatrix adjoint() const {
    SquareMatrix r(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r(j, i) = conj_of((*this)(i, j));
    return r;
  }

  double frobenius() const {
    double s = 0;
    for (const auto& x : a_) s += std::norm(cplx(x));
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0;
    for (const auto& x : a_) m = std::max(m, std::abs(x));
    return m;
  }

  bool hermitian(double tol = 1e-12) const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (std::abs((*this)(i, j) - conj_of((*this)(j, i))) > tol) return false;
    return true;
  }

  double hermitian_defect() const {
    double m = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        m = std::max(m, std::abs((*this)(i, j) - conj_of((*this)(j, i))));
    return m;
  }

  // LU with partial pivoting; |pivot| <= 1e-14*scale is treated as singular.
  T det() const {
    SquareMatrix lu(*this);
    int sign = 1;
    double scale = std::max(lu.max_abs(), 1e-300);
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t piv = k;
      double best = std::abs(lu(k, k));
      for (std::size_t i = k + 1; i < n_; ++i)
        if (std::abs(lu(i, k)) > best) { best = std::abs(lu(i, k)); piv = i; }
      if (best <= 1e-14 * scale) return T{};
      if (piv != k) {
        for (std::size_t j = 0; j < n_; ++j) std::swap(lu(k, j), lu(piv, j));
        sign = -sign;
      }
      for (std::size_t i = k + 1; i < n_; ++i) {
        T f = lu(i, k) / lu(k, k);
        lu(i, k) = f;
        for (std::size_t j = k + 1; j < n_; ++j) lu(i, j) -= f * lu(k, j);
      }
    }
    T d = (sign > 0) ? T{1} : T{-1};
    for (std::size_t i = 0; i < n_; ++i) d *= lu(i, i);
    return d;
  }

  SquareMatrix inverse() const {
    SquareMatrix lu(*this);
    SquareMatrix inv = identity(n_);
    std::vector<std::size_t> perm(n_);
    double scale = std::max(lu.max_abs(), 1e-300);
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t piv = k;
      double best = std::abs(lu(k, k));
      for (std::size_t i = k + 1; i < n_; ++i)
        if (std::abs(lu(i, k)) > best) { best = std::abs(lu(i, k)); piv = i; }
      if (best <= 1e-14 * scale)
        throw SingularMatrixError("matrix numerically singular in inverse()");
      if (piv != k)
        for (std::size_t j = 0; j < n_; ++j) {
          std::swap(lu(k, j), lu(piv, j));
          std::swap(inv(k, j), inv(piv, j));
        }
      for (std::size_t i = k + 1; i < n_; ++i) {
        T f = lu(i, k) / lu(k, k);
        lu(i, k) = T{};
        for (std::size_t j = k + 1; j < n_; ++j) lu(i, j) -= f * lu(k, j);
        for (std::size_t j = 0; j < n_; ++j) inv(i, j) -= f * inv(k, j);
      }
    }
    for (std::size_t col = 0; col < n_; ++col)
      for (std::size_t i = n_; i-- > 0;) {
        T s = inv(i, col);
        for (std::size_t j = i + 1; j < n_; ++j) s -= lu(i, j) * inv(j, col);
        inv(i, col) = s / lu(i, i);
      }
    return inv;
  }

 private:
  static T conj_of(const T& x) {
    if constexpr (std::is_same_v<T, cplx>) return std::conj(x);
    else return x;
  }

  std::size_t n_ = 0;
  std::vector<T> a_;
};

using Mat = SquareMatrix<double>;
using CMat = SquareMatrix<cplx>;

// Rectangular matrix for Jacobians / pullbacks.
struct RectMatrix {
  std::size_t rows = 0, cols = 0;
  Vec a;
  RectMatrix() = default;
  RectMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Hermitian-matrix pullback through a holomorphic Jacobian:
// h_z(j,k) = sum_{ab} J(a,j) h(a,b) conj(J(b,k)), i.e. J^T h J-bar
inline SquareMatrix<cplx> herm_pullback(const SquareMatrix<cplx>& h,
                                        const SquareMatrix<cplx>& J) {
  const std::size_t n = h.size();
  SquareMatrix<cplx> r(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      cplx s = 0;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          s += J(a, j) * h(a, b) * std::conj(J(b, k));
      r(j, k) = s;
    }
  return r;
}

// J^T G J  (pullback of the quadratic form G through the linear map J)
inline Mat pullback(const Mat& G, const RectMatrix& J) {
  Mat r(J.cols);
  for (std::size_t i = 0; i < J.cols; ++i)
    for (std::size_t j = 0; j < J.cols; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < J.rows; ++k)
        for (std::size_t l = 0; l < J.rows; ++l)
          s += J(k, i) * G(k, l) * J(l, j);
      r(i, j) = s;
    }
  return r;
}

// ---------------------------------------------------------------------------
// symmetric / Hermitian eigenvalues (cyclic Jacobi; matrices here are tiny)
// ---------------------------------------------------------------------------

inline Vec sym_eigenvalues(Mat A) {
  const std::size_t n = A.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off < 1e-26 * (1.0 + A.max_abs() * A.max_abs())) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(A(p, q)) < 1e-300) continue;
        double theta = (A(q, q) - A(p, p)) / (2 * A(p, q));
        double t = ((theta >= 0) ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
  }
  Vec ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = A(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

// eigenvalues of a Hermitian matrix via the real symmetric 2n embedding
// [[Re, -Im], [Im, Re]]; each eigenvalue appears twice.
inline Vec herm_eigenvalues(const CMat& H) {
  const std::size_t n = H.size();
  Mat E(2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      E(i, j) = H(i, j).real();
      E(i, j + n) = -H(i, j).imag();
      E(i + n, j) = H(i, j).imag();
      E(i + n, j + n) = H(i, j).real();
    }
  Vec ev2 = sym_eigenvalues(E);
  Vec ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = 0.5 * (ev2[2 * i] + ev2[2 * i + 1]);
  return ev;
}

inline double min_eigenvalue(const CMat& H) { return herm_eigenvalues(H).front(); }

// ---------------------------------------------------------------------------
// Grid1D
// ---------------------------------------------------------------------------

struct Grid1D {
  Vec nodes;

  explicit Grid1D(Vec n) : nodes(std::move(n)) {
    if (nodes.size() < 5)
      throw std::invalid_argument("Grid1D needs at least 5 nodes");
    for (std::size_t i = 1; i < nodes.size(); ++i)
      if (!(nodes[i] > nodes[i - 1]))
        throw std::invalid_argument("Grid1D nodes must be strictly increasing");
  }

  static Grid1D uniform(double lo, double hi, std::size_t n) {
    if (n < 5) throw std::invalid_argument("Grid1D needs at least 5 nodes");
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return Grid1D(std::move(v));
  }

  std::size_t size() const { return nodes.size(); }
  double spacing(std::size_t i) const { return nodes[i + 1] - nodes[i]; }
};

// ---------------------------------------------------------------------------
// finite differences
//
// Default first-derivative step 1e-5*(1+|x|): balances O(h^2) truncation
// against double-precision roundoff. Second derivatives use a larger base
// step plus one Richardson pass, which keeps the eps/h^2 roundoff term
// below the 1e-7 oracle tolerances used throughout.
// ---------------------------------------------------------------------------

inline double fd_step(double scale = 0.0) { return 1e-5 * (1.0 + std::abs(scale)); }

namespace detail {
inline void check_finite(double v, const char* who) {
  if (!std::isfinite(v))
    throw std::runtime_error(std::string(who) + ": non-finite function value");
}
}  // namespace detail

template <class F>
Vec fd_gradient(F&& f, const Vec& x, double h = 0.0) {
  if (h <= 0) h = fd_step(norm(x));
  Vec g(x.size());
  Vec xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    double fp = f(xp), fm = f(xm);
    detail::check_finite(fp, "fd_gradient");
    detail::check_finite(fm, "fd_gradient");
    g[i] = (fp - fm) / (2 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

template <class F>
double fd_directional(F&& f, const Vec& x, const Vec& v, double h = 0.0) {
  if (h <= 0) h = fd_step(norm(x));
  Vec xp = axpy(h, v, x), xm = axpy(-h, v, x);
  return (f(xp) - f(xm)) / (2 * h);
}

template <class F>
Mat fd_hessian_once(F&& f, const Vec& x, double h) {
  const std::size_t n = x.size();
  Mat H(n);
  Vec xa = x, xb = x;
  double f0 = f(x);
  for (std::size_t i = 0; i < n; ++i) {
    xa[i] = x[i] + h;
    xb[i] = x[i] - h;
    H(i, i) = (f(xa) - 2 * f0 + f(xb)) / (h * h);
    xa[i] = x[i];
    xb[i] = x[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      xa[i] = x[i] + h; xa[j] = x[j] + h;
      double fpp = f(xa);
      xa[j] = x[j] - h;
      double fpm = f(xa);
      xa[i] = x[i] - h; xa[j] = x[j] + h;
      double fmp = f(xa);
      xa[j] = x[j] - h;
      double fmm = f(xa);
      xa[i] = x[i]; xa[j] = x[j];
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4 * h * h);
    }
  }
  return H;
}

template <class F>
Mat fd_hessian(F&& f, const Vec& x, double h = 0.0, bool richardson = true) {
  if (h <= 0) h = 1e-3 * (1.0 + norm(x));
  Mat H1 = fd_hessian_once(f, x, h);
  if (!richardson) return H1;
  Mat H2 = fd_hessian_once(f, x, h / 2);
  // error O(h^2): (4*H(h/2) - H(h)) / 3 cancels the leading term
  return H2 * (4.0 / 3.0) - H1 * (1.0 / 3.0);
}

// d^2 F / dz_i dz_bar_j for a real scalar F on C^n, via the real Hessian:
//   4 d^2F/dz_i dz_bar_j = (F_{x_i x_j} + F_{y_i y_j}) + i (F_{x_i y_j} - F_{y_i x_j})
// Hermitian within fd error for smooth F.
template <class F>
CMat fd_ddbar(F&& f, const CVec& z, double h = 0.0) {
  const std::size_t n = z.size();
  Vec x(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = z[i].real();
    x[i + n] = z[i].imag();
  }
  auto freal = [&](const Vec& v) {
    CVec w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = cplx(v[i], v[i + n]);
    double val = f(w);
    detail::check_finite(val, "fd_ddbar");
    return val;
  };
  Mat H = fd_hessian(freal, x, h);
  CMat D(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double re = H(i, j) + H(i + n, j + n);
      double im = H(i, j + n) - H(i + n, j);
      D(i, j) = 0.25 * cplx(re, im);
    }
  return D;
}

// Jacobian of f: R^k -> R^m (rows = outputs).
template <class F>
RectMatrix fd_jacobian(F&& f, const Vec& x, double h = 0.0) {
  if (h <= 0) h = fd_step(norm(x));
  Vec xp = x, xm = x;
  Vec f0 = f(x);
  RectMatrix J(f0.size(), x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    Vec fp = f(xp), fm = f(xm);
    for (std::size_t i = 0; i < f0.size(); ++i) J(i, j) = (fp[i] - fm[i]) / (2 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return J;
}

// 1d stencils; third derivative uses the 5-point stencil.
template <class F>
double fd_d1(F&& f, double x, double h = 0.0) {
  if (h <= 0) h = fd_step(x);
  return (f(x + h) - f(x - h)) / (2 * h);
}

template <class F>
double fd_d2(F&& f, double x, double h = 0.0) {
  if (h <= 0) h = 1e-4 * (1.0 + std::abs(x));
  return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
}

template <class F>
double fd_d3(F&& f, double x, double h = 0.0) {
  if (h <= 0) h = 5e-3 * (1.0 + std::abs(x));
  return (-0.5 * f(x - 2 * h) + f(x - h) - f(x + h) + 0.5 * f(x + 2 * h)) /
         (h * h * h);
}

// ---------------------------------------------------------------------------
// adaptive quadrature (Gauss-Kronrod 7-15, globally adaptive)
// ---------------------------------------------------------------------------

namespace detail {

// K15 abscissae/weights and embedded G7 weights (QUADPACK values)
inline constexpr std::array<double, 8> kx = {
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993944,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126};
inline constexpr std::array<double, 8> kw = {
    0.2094821410847278,
    0.2044329400752989,
    0.1903505780647854,
    0.1690047266392679,
    0.1406532597155259,
    0.1047900103222502,
    0.06309209262997855,
    0.02293532201052922};
inline constexpr std::array<double, 4> gw = {
    0.4179591836734694,   // x = 0
    0.3818300505051189,   // x = kx[2]
    0.2797053914892767,   // x = kx[4]
    0.1294849661688697};  // x = kx[6]

template <class F>
std::pair<double, double> gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  double k = 0, g = 0;
  double f0 = f(c);
  check_finite(f0, "quad_adaptive");
  k += kw[0] * f0;
  g += gw[0] * f0;
  for (int i = 1; i < 8; ++i) {
    double fp = f(c + hw * kx[i]);
    double fm = f(c - hw * kx[i]);
    check_finite(fp, "quad_adaptive");
    check_finite(fm, "quad_adaptive");
    k += kw[i] * (fp + fm);
    if (i % 2 == 0) g += gw[i / 2] * (fp + fm);
  }
  k *= hw;
  g *= hw;
  double err = std::abs(k - g);
  return {k, err};
}

}  // namespace detail

template <class F>
double quad_adaptive(F&& f, double a, double b, double tol = 1e-10,
                     int max_intervals = 5000) {
  if (!(tol > 0)) throw std::invalid_argument("quad_adaptive: tol must be > 0");
  if (a == b) return 0.0;
  struct Piece {
    double a, b, val, err;
    bool operator<(const Piece& o) const { return err < o.err; }
  };
  auto [v0, e0] = detail::gk15(f, a, b);
  std::priority_queue<Piece> heap;
  heap.push({a, b, v0, e0});
  double total = v0, toterr = e0;
  int used = 1;
  while (toterr > tol && used < max_intervals) {
    Piece p = heap.top();
    heap.pop();
    double m = 0.5 * (p.a + p.b);
    auto [vl, el] = detail::gk15(f, p.a, m);
    auto [vr, er] = detail::gk15(f, m, p.b);
    total += vl + vr - p.val;
    toterr += el + er - p.err;
    heap.push({p.a, m, vl, el});
    heap.push({m, p.b, vr, er});
    ++used;
  }
  if (toterr > tol)
    throw ToleranceError("quad_adaptive: refinement budget exhausted", total);
  return total;
}

// ---------------------------------------------------------------------------
// monotone inversion (bisection safeguarded secant)
// ---------------------------------------------------------------------------

template <class G>
double invert_monotone(G&& g, double target, double lo, double hi,
                       double tol = 1e-12, int max_iter = 200) {
  if (!(lo < hi)) throw std::invalid_argument("invert_monotone: bad bracket");
  double flo = g(lo) - target, fhi = g(hi) - target;
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if (flo * fhi > 0)
    throw BracketError("invert_monotone: target not bracketed");
  double x = 0.5 * (lo + hi), fx;
  for (int it = 0; it < max_iter; ++it) {
    // secant proposal from the bracket ends, clipped into the interval
    double xs = lo - flo * (hi - lo) / (fhi - flo);
    double xb = 0.5 * (lo + hi);
    x = (xs > lo && xs < hi) ? xs : xb;
    // alternate with bisection when the secant stalls near an endpoint
    if (it % 2 == 1) x = xb;
    fx = g(x) - target;
    if (std::abs(fx) <= tol || hi - lo < 1e-15 * (1 + std::abs(x))) return x;
    if (flo * fx <= 0) {
      hi = x;
      fhi = fx;
    } else {
      lo = x;
      flo = fx;
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// cubic roots (real coefficients, complex roots; conjugate pairs exact)
// ---------------------------------------------------------------------------

inline std::array<cplx, 3> solve_cubic(double c3, double c2, double c1, double c0) {
  if (c3 == 0.0) throw std::invalid_argument("solve_cubic: leading coefficient is zero");
  const double a = c2 / c3, b = c1 / c3, c = c0 / c3;
  // depressed cubic t^3 + p t + q, x = t - a/3
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = -a / 3.0;
  std::array<cplx, 3> r;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  if (disc > 0) {
    // one real root + conjugate pair (Cardano, cancellation-safe branch)
    double sq = std::sqrt(disc);
    double u3 = -0.5 * q - ((q >= 0) ? sq : -sq);
    double u = std::cbrt(u3);
    double v = (u == 0.0) ? 0.0 : -p / (3.0 * u);
    double t1 = u + v;
    double re = -0.5 * t1, im = 0.5 * std::sqrt(3.0) * std::abs(u - v);
    r[0] = cplx(t1 + shift, 0.0);
    r[1] = cplx(re + shift, im);
    r[2] = std::conj(r[1]);
  } else {
    // three real roots (trigonometric form): cos(3 theta) = 3q/(2pm)
    double m = std::sqrt(std::max(-p / 3.0, 0.0));
    double arg = (m == 0.0) ? 0.0 : std::clamp(1.5 * q / (p * m), -1.0, 1.0);
    double phi = std::acos(arg);
    for (int k = 0; k < 3; ++k)
      r[k] = cplx(2.0 * m * std::cos((phi + 2.0 * 3.14159265358979323846 * k) / 3.0) + shift, 0.0);
  }
  // one Newton polish per root, in complex arithmetic
  auto poly = [&](cplx x) { return ((c3 * x + c2) * x + c1) * x + c0; };
  auto dpoly = [&](cplx x) { return (3.0 * c3 * x + 2.0 * c2) * x + c1; };
  for (auto& root : r) {
    for (int it = 0; it < 2; ++it) {
      cplx d = dpoly(root);
      if (std::abs(d) < 1e-12 * (std::abs(c3) + std::abs(c2) + std::abs(c1))) break;
      root -= poly(root) / d;
    }
  }
  // re-enforce exact conjugacy of complex pairs
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(r[i].imag()) > 1e-14 &&
          std::abs(r[i] - std::conj(r[j])) <
              1e-6 * (1.0 + std::abs(r[i]))) {
        cplx avg = 0.5 * (r[i] + std::conj(r[j]));
        r[i] = avg;
        r[j] = std::conj(avg);
      }
    }
  // roots with negligible imaginary part snap to the real axis
  for (auto& root : r)
    if (root.imag() != 0.0 && std::abs(root.imag()) < 1e-14 * (1.0 + std::abs(root.real())))
      root = cplx(root.real(), 0.0);
  return r;
}

// unique positive real root; preconditions of the metric cubics guarantee one
inline double positive_cubic_root(double c3, double c2, double c1, double c0) {
  auto poly = [&](double x) { return ((c3 * x + c2) * x + c1) * x + c0; };
  auto roots = solve_cubic(c3, c2, c1, c0);
  double best = -1;
  for (const auto& r : roots)
    if (std::abs(r.imag()) < 1e-9 * (1.0 + std::abs(r.real())) && r.real() > 0)
      best = std::max(best, r.real());
  if (best <= 0) {
    // tiny roots near the origin can be lost to roundoff in the closed-form
    // path; fall back to a monotone bracket when one exists
    double hi = 1.0 + std::abs(c2 / c3) + std::sqrt(std::abs(c1 / c3)) +
                std::cbrt(std::abs(c0 / c3));
    if (poly(0.0) * poly(hi) <= 0)
      best = std::max(invert_monotone(poly, 0.0, 0.0, hi, 1e-300), 1e-300);
    else
      throw std::runtime_error("positive_cubic_root: no positive real root");
  }
  // guarded Newton polish: accept steps that stay positive and shrink |p|
  for (int it = 0; it < 100; ++it) {
    double pv = poly(best);
    double dv = (3 * c3 * best + 2 * c2) * best + c1;
    if (dv == 0) break;
    double cand = best - pv / dv;
    if (!(cand > 0) || std::abs(poly(cand)) >= std::abs(pv)) break;
    best = cand;
  }
  return best;
}

// ---------------------------------------------------------------------------
// cached antiderivative F(y) = int_{y0}^{y} g(s) ds
//
// Segments are refined until the cubic Hermite interpolant of F (with exact
// derivative g at the nodes) reproduces a Gauss-Kronrod midpoint value to
// 1e-10; evaluation is then a segment lookup plus a cubic.
// ---------------------------------------------------------------------------

class Antiderivative {
 public:
  Antiderivative() = default;

  Antiderivative(std::function<double(double)> g, double y0, double lo, double hi,
                 double tol = 1e-10)
      : g_(std::move(g)), y0_(y0), tol_(tol) {
    if (!(lo < hi) || !(y0 >= lo && y0 <= hi))
      throw std::invalid_argument("Antiderivative: anchor must lie in [lo,hi]");
    build(lo, hi);
  }

  double operator()(double y) const {
    if (segs_.empty()) throw std::runtime_error("Antiderivative: empty cache");
    if (y < segs_.front().a || y > segs_.back().b)
      throw std::domain_error("Antiderivative: evaluation outside cached domain");
    std::size_t idx = locate(y);
    const Seg& s = segs_[idx];
    double t = (y - s.a) / (s.b - s.a);
    // cubic Hermite of F on [a,b] from (Fa, ga), (Fb, gb)
    double h = s.b - s.a;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    return h00 * s.Fa + h10 * h * s.ga + h01 * s.Fb + h11 * h * s.gb;
  }

  double deriv(double y) const { return g_(y); }

 private:
  struct Seg {
    double a, b, Fa, Fb, ga, gb;
  };

  void build(double lo, double hi) {
    // integrate outward from the anchor so the constant of integration is 0 at y0
    std::vector<Seg> below, above;
    if (y0_ > lo) build_range(lo, y0_, below);
    if (hi > y0_) build_range(y0_, hi, above);
    // anchor values: F(y0) = 0; accumulate
    segs_.clear();
    double acc = 0;
    for (auto it = above.begin(); it != above.end(); ++it) {
      it->Fa = acc;
      it->Fb = acc + it->Fb;  // Fb holds the segment integral before this pass
      acc = it->Fb;
    }
    acc = 0;
    for (auto it = below.rbegin(); it != below.rend(); ++it) {
      it->Fb = acc;
      it->Fa = acc - it->Fa;  // Fa holds the segment integral before this pass
      acc = it->Fa;
    }
    segs_ = std::move(below);
    segs_.insert(segs_.end(), above.begin(), above.end());
  }

  // fills segs with {a, b, segment integral in Fa and Fb, ga, gb}
  void build_range(double lo, double hi, std::vector<Seg>& out) {
    struct Item {
      double a, b;
    };
    std::vector<Item> stack{{lo, hi}};
    std::vector<Seg> done;
    while (!stack.empty()) {
      Item it = stack.back();
      stack.pop_back();
      double m = 0.5 * (it.a + it.b);
      auto [i1, e1] = detail::gk15(g_, it.a, m);
      auto [i2, e2] = detail::gk15(g_, m, it.b);
      double whole = i1 + i2;
      // Hermite midpoint test against the quadrature value
      double ga = g_(it.a), gb = g_(it.b);
      double h = it.b - it.a;
      double hermite_mid = 0.5 * whole + h * (ga - gb) / 8.0;
      bool ok = std::abs(hermite_mid - i1) <= tol_ * (1.0 + std::abs(whole)) &&
                e1 + e2 <= tol_ * (1.0 + std::abs(whole));
      if (ok || h < 1e-8 * (1 + std::abs(it.a))) {
        done.push_back({it.a, it.b, whole, whole, ga, gb});
      } else {
        stack.push_back({m, it.b});
        stack.push_back({it.a, m});
      }
    }
    std::sort(done.begin(), done.end(),
              [](const Seg& x, const Seg& y) { return x.a < y.a; });
    // store per-segment integral in Fa/Fb; build() accumulates
    for (auto& s : done) {
      double seg_int = s.Fa;
      s.Fa = seg_int;
      s.Fb = seg_int;
    }
    out = std::move(done);
  }

  std::size_t locate(double y) const {
    std::size_t lo = 0, hi = segs_.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (y <= segs_[mid].b) hi = mid;
      else lo = mid + 1;
    }
    return lo;
  }

  std::function<double(double)> g_;
  double y0_ = 0, tol_ = 1e-10;
  std::vector<Seg> segs_;
};

}  // namespace num
}  // namespace kgeom
