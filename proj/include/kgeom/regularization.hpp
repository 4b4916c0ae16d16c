#pragma once

// Planar Kepler dynamics, Levi-Civita regularization of the negative-energy
// system, the Moser map into T*S^n, and Lie scaling.
//
// Conventions here follow the regularized change of variables
//   x + iy = (xi + i eta)^2,   p - iq = (om - i chi) / (2 (xi + i eta)),
// so on the energy surface H = E one has |om + i chi|^2 = 8 (1 + E |xi + i eta|^2)
// and the regularized system is linear:
//   d(xi + i eta)/dtau = (om + i chi)/4,   d(om + i chi)/dtau = 2E (xi + i eta).

#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "numkit.hpp"

namespace kgeom {
namespace reg {

using num::CVec;
using num::Vec;
using num::cplx;

struct PhaseState2D {
  double x, y, p, q;
};

struct LCState {
  double xi, eta, om, chi;
};

// point of K_n = { |x| = 1, x.xi = 0, xi != 0 } in R^{n+1} x R^{n+1}
struct KeplerPoint {
  Vec x, xi;
};

struct FlatCotangentPoint {
  Vec y, eta;
};

struct CollisionError : std::domain_error {
  using std::domain_error::domain_error;
};

// --- Kepler vector field -----------------------------------------------------

inline double hamiltonian(const PhaseState2D& s) {
  double rho = std::hypot(s.x, s.y);
  if (rho == 0) throw CollisionError("hamiltonian: collision (x,y) = 0");
  return 0.5 * (s.p * s.p + s.q * s.q) - 1.0 / rho;
}

// (dx, dy, dp, dq) = (p, q, -x/rho^3, -y/rho^3)
inline std::array<double, 4> kepler_vector_field(const PhaseState2D& s) {
  double rho = std::hypot(s.x, s.y);
  if (rho == 0) throw CollisionError("kepler_vector_field: collision");
  double r3 = rho * rho * rho;
  return {s.p, s.q, -s.x / r3, -s.y / r3};
}

// --- Levi-Civita regularization ----------------------------------------------

inline PhaseState2D lc_forward(const LCState& s) {
  cplx Z(s.xi, s.eta);
  if (Z == cplx(0, 0))
    throw std::domain_error("lc_forward: (xi,eta) = (0,0) is outside the chart");
  cplx Wbar(s.om, -s.chi);
  cplx pos = Z * Z;
  cplx pmiq = Wbar / (2.0 * Z);
  return {pos.real(), pos.imag(), pmiq.real(), -pmiq.imag()};
}

inline LCState lc_inverse(const PhaseState2D& s, int branch = 0) {
  cplx pos(s.x, s.y);
  if (pos == cplx(0, 0)) throw std::domain_error("lc_inverse: collision point");
  // principal square root; branch = 1 picks the antipodal preimage
  double r = std::sqrt(std::abs(pos));
  double th = 0.5 * std::atan2(s.y, s.x);
  cplx Z = cplx(r * std::cos(th), r * std::sin(th));
  if (branch) Z = -Z;
  cplx W = 2.0 * std::conj(Z) * cplx(s.p, s.q);
  return {Z.real(), Z.imag(), W.real(), W.imag()};
}

// |om + i chi|^2 - 8 (1 + E |xi + i eta|^2)
inline double lc_energy_residual(const LCState& s, double E) {
  double W2 = s.om * s.om + s.chi * s.chi;
  double Z2 = s.xi * s.xi + s.eta * s.eta;
  return W2 - 8.0 * (1.0 + E * Z2);
}

struct Trajectory {
  std::vector<double> tau;
  std::vector<LCState> states;
};

// Fixed-step RK4 on the linear regularized system. The default step divides
// the period 2*pi/sqrt(-E/2) into 512 pieces, which keeps the energy drift
// below 1e-8 per period.
inline Trajectory integrate_regularized(double E, const LCState& init,
                                        double tau_span, double dt = 0.0) {
  if (!(E < 0))
    throw std::invalid_argument("integrate_regularized: requires E < 0");
  if (std::abs(lc_energy_residual(init, E)) >= 1e-8)
    throw std::invalid_argument(
        "integrate_regularized: initial state off the energy surface");
  double omega0 = std::sqrt(-E / 2.0);
  if (dt <= 0) dt = (2.0 * 3.14159265358979323846 / omega0) / 512.0;

  auto rhs = [E](const std::array<double, 4>& u) {
    // u = (xi, eta, om, chi)
    return std::array<double, 4>{0.25 * u[2], 0.25 * u[3], 2.0 * E * u[0],
                                 2.0 * E * u[1]};
  };
  std::array<double, 4> u = {init.xi, init.eta, init.om, init.chi};
  Trajectory tr;
  double tau = 0;
  tr.tau.push_back(0);
  tr.states.push_back(init);
  long nsteps = static_cast<long>(std::ceil(tau_span / dt));
  for (long k = 0; k < nsteps; ++k) {
    double h = std::min(dt, tau_span - tau);
    auto k1 = rhs(u);
    std::array<double, 4> u2, u3, u4;
    for (int i = 0; i < 4; ++i) u2[i] = u[i] + 0.5 * h * k1[i];
    auto k2 = rhs(u2);
    for (int i = 0; i < 4; ++i) u3[i] = u[i] + 0.5 * h * k2[i];
    auto k3 = rhs(u3);
    for (int i = 0; i < 4; ++i) u4[i] = u[i] + h * k3[i];
    auto k4 = rhs(u4);
    for (int i = 0; i < 4; ++i)
      u[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    tau += h;
    tr.tau.push_back(tau);
    tr.states.push_back({u[0], u[1], u[2], u[3]});
  }
  return tr;
}

// closed-form solution of the linear system (oracle for the integrator)
inline LCState regularized_exact(double E, const LCState& init, double tau) {
  double w0 = std::sqrt(-E / 2.0);
  double c = std::cos(w0 * tau), s = std::sin(w0 * tau) / w0;
  // Z'' = -w0^2 Z with Z' = W/4;  W' = 2E Z
  double xi = init.xi * c + 0.25 * init.om * s;
  double eta = init.eta * c + 0.25 * init.chi * s;
  double om = init.om * c + 2.0 * E * init.xi * s;
  double chi = init.chi * c + 2.0 * E * init.eta * s;
  return {xi, eta, om, chi};
}

// --- Moser map -----------------------------------------------------------

struct MoserResult {
  KeplerPoint point;
  bool on_kepler_manifold;  // false iff eta = 0 (image hits the zero section)
};

inline MoserResult moser_forward(const FlatCotangentPoint& pt) {
  const std::size_t n = pt.y.size();
  if (pt.eta.size() != n)
    throw std::invalid_argument("moser_forward: dimension mismatch");
  double y2 = num::dot(pt.y, pt.y);
  double ey = num::dot(pt.eta, pt.y);
  KeplerPoint kp;
  kp.x.assign(n + 1, 0.0);
  kp.xi.assign(n + 1, 0.0);
  kp.x[0] = (y2 - 1.0) / (y2 + 1.0);
  kp.xi[0] = ey;
  for (std::size_t j = 0; j < n; ++j) {
    kp.x[j + 1] = 2.0 * pt.y[j] / (y2 + 1.0);
    kp.xi[j + 1] = 0.5 * (y2 + 1.0) * pt.eta[j] - ey * pt.y[j];
  }
  bool ok = num::norm(pt.eta) > 0;
  return {kp, ok};
}

// residuals of |x|^2 - 1, x.xi, eta-reconstruction, and the tautological-form
// pullback xi.dx - eta.dy probed along random tangent directions
inline std::array<double, 4> moser_identity_residuals(const FlatCotangentPoint& pt,
                                                      num::Rng& rng,
                                                      int directions = 10) {
  const std::size_t n = pt.y.size();
  MoserResult mr = moser_forward(pt);
  const KeplerPoint& kp = mr.point;
  double r1 = std::abs(num::dot(kp.x, kp.x) - 1.0);
  double r2 = std::abs(num::dot(kp.x, kp.xi));
  // eta_j = (1 - x0) xi_j + xi0 x_j
  double r3 = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double rec = (1.0 - kp.x[0]) * kp.xi[j + 1] + kp.xi[0] * kp.x[j + 1];
    r3 = std::max(r3, std::abs(rec - pt.eta[j]));
  }
  // <xi, Dx> = <eta, Dy> along random directions (fd derivative of the map)
  Vec state(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    state[i] = pt.y[i];
    state[i + n] = pt.eta[i];
  }
  double r4 = 0;
  for (int d = 0; d < directions; ++d) {
    Vec v = rng.unit_vec(2 * n);
    auto xmap = [&](const Vec& s) {
      FlatCotangentPoint q{Vec(s.begin(), s.begin() + n),
                           Vec(s.begin() + n, s.end())};
      return moser_forward(q).point.x;
    };
    double h = num::fd_step(num::norm(state));
    Vec xp = xmap(num::axpy(h, v, state));
    Vec xm = xmap(num::axpy(-h, v, state));
    double lhs = 0;
    for (std::size_t j = 0; j <= n; ++j)
      lhs += kp.xi[j] * (xp[j] - xm[j]) / (2 * h);
    double rhs = 0;
    for (std::size_t j = 0; j < n; ++j) rhs += pt.eta[j] * v[j];
    r4 = std::max(r4, std::abs(lhs - rhs));
  }
  return {r1, r2, r3, r4};
}

// Phi = |xi|^2 |x|^2 / 2; generates the geodesic flow on T*S^n
inline double geodesic_hamiltonian(const KeplerPoint& kp) {
  return 0.5 * num::dot(kp.xi, kp.xi) * num::dot(kp.x, kp.x);
}

// (x, y, p, q) -> (l^2 x, l^2 y, p/l, q/l); H scales by 1/l^2
inline PhaseState2D lie_scale(const PhaseState2D& s, double lambda) {
  if (!(lambda > 0)) throw std::domain_error("lie_scale: lambda must be > 0");
  return {lambda * lambda * s.x, lambda * lambda * s.y, s.p / lambda,
          s.q / lambda};
}

// --- CSV export ------------------------------------------------------------

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, double E) {
  os << "tau,xi,eta,omega,chi,x,y,p,q,H_residual\n";
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const LCState& s = tr.states[i];
    PhaseState2D ph = lc_forward(s);
    os << tr.tau[i] << ',' << s.xi << ',' << s.eta << ',' << s.om << ',' << s.chi
       << ',' << ph.x << ',' << ph.y << ',' << ph.p << ',' << ph.q << ','
       << lc_energy_residual(s, E) << '\n';
  }
}

}  // namespace reg
}  // namespace kgeom
