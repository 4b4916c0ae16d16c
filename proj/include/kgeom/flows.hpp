#pragma once

// Special Kaehler-Ricci flows in potential space, posed on the radial/profile
// reductions: the conifold profile flow, the U(n)-symmetric profile flow, and
// the Hessian-potential flow restricted to the radial U(n) family (where
// det Hess psi^v reduces through the G^ij determinant).
//
// Spatial derivatives use 4th-order centered stencils on a uniform grid; the
// outermost two nodes on each side are pinned to the initial profile, so
// perturbations are meant to be supported in the interior.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "numkit.hpp"
#include "toric.hpp"

namespace kgeom {
namespace flow {

using num::Grid1D;
using num::Vec;

enum class Kind { CONIFOLD, UN, HESSIAN, HESSIAN_DUAL };

struct MetricDegenerationError : std::runtime_error {
  std::size_t node;
  MetricDegenerationError(const std::string& msg, std::size_t at)
      : std::runtime_error(msg), node(at) {}
};

struct FlowState {
  Kind kind = Kind::CONIFOLD;
  int n = 2;
  double lambda = 0, C1 = 0;
  Grid1D grid;
  Vec values;   // evolving potential at the nodes
  Vec initial;  // boundary pin (the stationary profile)
  double time = 0;

  FlowState(Kind k, int dim, double lam, double c1, Grid1D g, Vec v)
      : kind(k), n(dim), lambda(lam), C1(c1), grid(std::move(g)),
        values(std::move(v)) {
    if (values.size() != grid.size())
      throw std::invalid_argument("FlowState: values/grid size mismatch");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (std::abs(grid.spacing(i - 1) - grid.spacing(0)) > 1e-12 * grid.spacing(0))
        throw std::invalid_argument("FlowState: grid must be uniform");
    initial = values;
  }

  double spacing() const { return grid.spacing(0); }
};

namespace detail {

inline double d1_stencil(const Vec& f, std::size_t i, double h) {
  return (-f[i + 2] + 8 * f[i + 1] - 8 * f[i - 1] + f[i - 2]) / (12 * h);
}

inline double d2_stencil(const Vec& f, std::size_t i, double h) {
  return (-f[i + 2] + 16 * f[i + 1] - 30 * f[i] + 16 * f[i - 1] - f[i - 2]) /
         (12 * h * h);
}

}  // namespace detail

// RHS of the flow at every node (zero on the two pinned nodes per side)
inline Vec flow_rhs(const FlowState& s) {
  const std::size_t m = s.grid.size();
  const double h = s.spacing();
  Vec rhs(m, 0.0);
  for (std::size_t i = 2; i + 2 < m; ++i) {
    double x = s.grid.nodes[i];
    double f = s.values[i];
    double fp = detail::d1_stencil(s.values, i, h);
    double fpp = detail::d2_stencil(s.values, i, h);
    double arg = 0, val = 0;
    switch (s.kind) {
      case Kind::CONIFOLD:
        // d f/ds = -log[t f'^n + t^2 f'^{n-1} f''] + lambda f + C1
        arg = x * std::pow(fp, s.n) + x * x * std::pow(fp, s.n - 1) * fpp;
        if (!(arg > 0))
          throw MetricDegenerationError("conifold flow: volume density <= 0", i);
        val = -std::log(arg) + s.lambda * f + s.C1;
        break;
      case Kind::UN:
        // d phi/dt = -( log[(phi' + u phi'') phi'^{n-1}] + lambda phi + C1 )
        arg = (fp + x * fpp) * std::pow(fp, s.n - 1);
        if (!(arg > 0))
          throw MetricDegenerationError("U(n) flow: volume density <= 0", i);
        val = -(std::log(arg) + s.lambda * f + s.C1);
        break;
      case Kind::HESSIAN:
        // radial reduction of d psi^v/dt = -log det(Hess psi^v) + lambda psi^v
        // + C1 on the diagonal ray y^v = rho (1,..,1):
        //   det = (w'/n)^{n-1} (w''/n)
        arg = std::pow(fp / s.n, s.n - 1) * (fpp / s.n);
        if (!(arg > 0))
          throw MetricDegenerationError("hessian flow: det Hess <= 0", i);
        val = -std::log(arg) + s.lambda * f + s.C1;
        break;
      case Kind::HESSIAN_DUAL:
        // dual flow for psi restricted to the U(n) class, profile P(Y) with
        // Y = sum y_i on the diagonal: det Hess psi = Y P''(Y) (n/Y)^n
        arg = x * fpp * std::pow(s.n / x, s.n);
        if (!(arg > 0))
          throw MetricDegenerationError("dual hessian flow: det Hess <= 0", i);
        val = -std::log(arg) + s.lambda * f + s.C1;
        break;
    }
    rhs[i] = val;
  }
  return rhs;
}

// Explicit Euler (or midpoint RK2) step; boundary nodes re-pinned afterwards.
// The step advances the smoothing orientation d(values)/dtau = -rhs: the
// displayed flows carry d omega/ds = rho + lambda omega, whose potential-level
// linearization has a negative diffusion coefficient, so perturbations decay
// only along the reversed (standard Kaehler-Ricci) orientation. Stationary
// profiles are fixed points of both orientations.
inline FlowState flow_step(FlowState s, double ds, bool rk2 = false) {
  Vec k1 = flow_rhs(s);
  if (rk2) {
    FlowState half = s;
    for (std::size_t i = 0; i < s.values.size(); ++i)
      half.values[i] -= 0.5 * ds * k1[i];
    Vec k2 = flow_rhs(half);
    for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] -= ds * k2[i];
  } else {
    for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] -= ds * k1[i];
  }
  const std::size_t m = s.values.size();
  s.values[0] = s.initial[0];
  s.values[1] = s.initial[1];
  s.values[m - 2] = s.initial[m - 2];
  s.values[m - 1] = s.initial[m - 1];
  s.time += ds;
  return s;
}

// L-infinity of the RHS over interior nodes
inline double flow_residual(const FlowState& s) {
  Vec r = flow_rhs(s);
  double m = 0;
  for (std::size_t i = 2; i + 2 < r.size(); ++i) m = std::max(m, std::abs(r[i]));
  return m;
}

inline double max_perturbation(const FlowState& s) {
  double m = 0;
  for (std::size_t i = 0; i < s.values.size(); ++i)
    m = std::max(m, std::abs(s.values[i] - s.initial[i]));
  return m;
}

// --- fixed-point states ------------------------------------------------------------

namespace detail {
// cumulative node values of int g; per-interval quadrature keeps the values
// smooth enough for the 1/h^2 stencil amplification
inline Vec integrate_nodes(const std::function<double(double)>& g,
                           const Grid1D& grid) {
  Vec vals(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i)
    vals[i] = vals[i - 1] +
              num::quad_adaptive(g, grid.nodes[i - 1], grid.nodes[i], 1e-13);
  return vals;
}
}  // namespace detail

// conifold flow at the Ricci-flat profile: gauge C1 = log c makes it stationary
inline FlowState conifold_fixed_point(int n, double c, double c1, double lambda,
                                      Grid1D grid) {
  auto f1 = [=](double t) {
    return std::pow(n * c / (n - 1.0) * std::pow(t, n - 1) + c1, 1.0 / n) / t;
  };
  Vec vals = detail::integrate_nodes(f1, grid);
  double gauge = std::log(c);  // C1 = log c at lambda = 0
  return FlowState(Kind::CONIFOLD, n, lambda, gauge, std::move(grid),
                   std::move(vals));
}

// U(n) flow at the b-family potential phi(u) = int (u^n+b^n)^{1/n}/u du;
// the volume density is exactly 1, so C1 = 0 is the stationary gauge
inline FlowState un_fixed_point(int n, double b, double lambda, Grid1D grid) {
  auto phi1 = [=](double u) {
    return std::pow(std::pow(u, n) + std::pow(b, n), 1.0 / n) / u;
  };
  Vec vals = detail::integrate_nodes(phi1, grid);
  return FlowState(Kind::UN, n, lambda, 0.0, std::move(grid), std::move(vals));
}

// Hessian flow at the b-family dual potential, on the diagonal ray
// y^v = rho (1,...,1): w(rho) = phi(y) with u(y) = n e^rho
inline FlowState hessian_radial_state(int n, double b, double lambda, double C1,
                                      Grid1D grid) {
  toric::Profile bf = (b > 0) ? toric::Profile::b_family(n, b)
                              : toric::Profile::flat(n);
  Vec vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double srad = n * std::exp(grid.nodes[i]);
    double y = bf.y_of_u(srad);
    vals[i] = bf.phi(y);
  }
  return FlowState(Kind::HESSIAN, n, lambda, C1, std::move(grid), std::move(vals));
}

// dual flow at the U(n) complex potential on the diagonal y_i = Y/n:
// P(Y) = -Y ln n + F(Y), F = int ln u dy
inline FlowState hessian_dual_radial_state(int n, double b, double lambda,
                                           double C1, Grid1D grid) {
  toric::Profile bf = (b > 0) ? toric::Profile::b_family(n, b)
                              : toric::Profile::flat(n);
  Vec vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double Y = grid.nodes[i];
    vals[i] = -Y * std::log(static_cast<double>(n)) + bf.F(Y);
  }
  return FlowState(Kind::HESSIAN_DUAL, n, lambda, C1, std::move(grid),
                   std::move(vals));
}

// smooth compactly supported bump for perturbation experiments
inline void add_interior_bump(FlowState& s, double rel_amplitude) {
  const std::size_t m = s.values.size();
  double scale = 0;
  for (double v : s.values) scale = std::max(scale, std::abs(v));
  double amp = rel_amplitude * (scale > 0 ? scale : 1.0);
  double lo = s.grid.nodes[2], hi = s.grid.nodes[m - 3];
  double mid = 0.5 * (lo + hi), width = 0.18 * (hi - lo);
  for (std::size_t i = 2; i + 2 < m; ++i) {
    double x = (s.grid.nodes[i] - mid) / width;
    if (std::abs(x) < 1.0)
      s.values[i] += amp * std::exp(-1.0 / (1.0 - x * x)) * std::exp(1.0);
  }
}

struct TraceRow {
  long step;
  double time, residual, max_perturbation;
};

inline std::vector<TraceRow> run_flow(FlowState& s, double ds, long steps,
                                      bool rk2 = false, long record_every = 1) {
  std::vector<TraceRow> trace;
  trace.push_back({0, s.time, flow_residual(s), max_perturbation(s)});
  for (long k = 1; k <= steps; ++k) {
    s = flow_step(std::move(s), ds, rk2);
    if (k % record_every == 0 || k == steps)
      trace.push_back({k, s.time, flow_residual(s), max_perturbation(s)});
  }
  return trace;
}

}  // namespace flow
}  // namespace kgeom
