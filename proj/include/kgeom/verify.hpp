#pragma once

// Seeded, reproducible verification suites: one check per module invariant,
// each reporting the worst observed residual against its pinned tolerance.
// The same machinery backs the CLI `verify` command and the acceptance run.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "complex_structures.hpp"
#include "families.hpp"
#include "flows.hpp"
#include "kepler_metrics.hpp"
#include "numkit.hpp"
#include "regularization.hpp"
#include "toric.hpp"

namespace kgeom {
namespace verify {

using num::CMat;
using num::CVec;
using num::Mat;
using num::Rng;
using num::Vec;
using num::cplx;

struct Check {
  std::string id;
  std::string fact;  // what identity is being verified
  double residual = 0;
  double tolerance = 0;
  int samples = 0;
  bool pass = false;
};

struct Report {
  std::string suite;
  std::uint64_t seed = 0;
  int samples = 0;
  double tol_scale = 1.0;
  std::vector<Check> checks;
  double wall_ms = 0;
  bool pass = true;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline Check make(const std::string& id, const std::string& fact, double residual,
                  double tol, int samples, double tol_scale) {
  Check c{id, fact, residual, tol * tol_scale, samples, false};
  c.pass = c.residual <= c.tolerance;
  return c;
}

inline reg::PhaseState2D random_state(Rng& rng) {
  double r = rng.uniform(0.5, 2.0), th = rng.uniform(0, 6.2831853);
  return {r * std::cos(th), r * std::sin(th), rng.uniform(-1.5, 1.5),
          rng.uniform(-1.5, 1.5)};
}

inline std::vector<fam::Family> family_roster() {
  using fam::Family;
  using fam::Tag;
  return {Family{Tag::UN_RF, 2, 0, 0.8, 0, 0, 1, 0},
          Family{Tag::UN_RF, 3, 0, 0.6, 0, 0, 1, 0},
          Family{Tag::EH, 2, 0, 0, 0, 0, 1.0, 0.49},
          Family{Tag::RESOLVED3, 2, 0.7, 0, 0, 0, 1, 0},
          Family{Tag::KEPLER_K3_LIFT, 2, 0, 0, 0, 0, 1, 0},
          Family{Tag::KRF_K3, 2, 0, 0, 0, 0, 1, 0},
          Family{Tag::P1P1, 2, 0, 0, 0.6, 0.9, 1, 0},
          Family{Tag::P1P1, 2, 0, 0, 0.0, 0.0, 1, 0},
          Family{Tag::P1P1, 2, 0, 0, 0.8, 0.0, 1, 0},
          Family{Tag::O22, 2, 0, 0, 0.6, 0.9, 1, 0}};
}

}  // namespace detail

// --- numkit ---------------------------------------------------------------------

inline Check check_nk_gradient(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < samples; ++t) {
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
    Vec g = num::fd_gradient(poly, x);
    for (int i = 0; i < 3; ++i) {
      double exact = a[i];
      for (int j = 0; j < 3; ++j) exact += 0.5 * (Q(i, j) + Q(j, i)) * x[j];
      worst = std::max(worst, std::abs(g[i] - exact) / (1 + std::abs(exact)));
    }
  }
  return detail::make("NK1", "centered gradients exact on quadratics", worst,
                      1e-9, samples, ts);
}

inline Check check_nk_ddbar(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < samples; ++t) {
    CVec z = rng.cvec(3, -1.5, 1.5);
    auto f = [](const CVec& w) {
      double u = num::cnorm2(w);
      return std::log(1.0 + u) + 0.3 * u * u + (w[0] * std::conj(w[1])).real();
    };
    worst = std::max(worst, num::fd_ddbar(f, z).hermitian_defect());
  }
  return detail::make("NK2", "complex Hessians of real fields are Hermitian",
                      worst, 1e-8, samples, ts);
}

inline Check check_nk_quad(std::uint64_t seed, int samples, double ts) {
  (void)seed;
  double worst = 0;
  worst = std::max(worst, std::abs(num::quad_adaptive(
                              [](double t) { return 1.0 / t; }, 1, 2, 1e-12) -
                          std::log(2.0)));
  worst = std::max(worst,
                   std::abs(num::quad_adaptive(
                                [](double y) { return y / (y * y + 1); }, 0, 1,
                                1e-12) -
                            0.5 * std::log(2.0)));
  worst = std::max(
      worst, std::abs(num::quad_adaptive([](double y) { return std::log(y); }, 1,
                                         2, 1e-12) -
                      (2 * std::log(2.0) - 1)));
  return detail::make("NK3", "adaptive quadrature meets requested tolerance",
                      worst, 1e-10, samples, ts);
}

inline Check check_nk_cubic(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  int draws = std::max(samples, 1000);
  for (int t = 0; t < draws; ++t) {
    double c3 = rng.uniform(-5, 5);
    if (std::abs(c3) < 1e-3) c3 = 1.0;
    double c2 = rng.uniform(-5, 5), c1 = rng.uniform(-5, 5), c0 = rng.uniform(-5, 5);
    auto roots = num::solve_cubic(c3, c2, c1, c0);
    double cmax = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
    for (const auto& x : roots) {
      cplx p = ((c3 * x + c2) * x + c1) * x + c0;
      double bound = 1e-9 * cmax * (1.0 + std::pow(std::abs(x), 3.0));
      worst = std::max(worst, std::abs(p) / bound);
    }
  }
  return detail::make("NK4", "cubic roots have bounded back-substitution residual",
                      worst, 1.0, draws, ts);
}

// --- regularization -----------------------------------------------------------------

inline Check check_rg_moser(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  int draws = std::max(samples, 1000);
  for (int t = 0; t < draws; ++t) {
    std::size_t n = (t % 3 == 0) ? 2 : ((t % 3 == 1) ? 3 : 5);
    reg::FlatCotangentPoint pt{rng.vec(n, -2, 2), rng.vec(n, -2, 2)};
    reg::MoserResult mr = reg::moser_forward(pt);
    worst = std::max(worst, std::abs(num::dot(mr.point.x, mr.point.x) - 1.0));
    worst = std::max(worst, std::abs(num::dot(mr.point.x, mr.point.xi)));
    for (std::size_t j = 0; j < n; ++j) {
      double rec = (1.0 - mr.point.x[0]) * mr.point.xi[j + 1] +
                   mr.point.xi[0] * mr.point.x[j + 1];
      worst = std::max(worst, std::abs(rec - pt.eta[j]));
    }
    double lhs = num::norm(mr.point.xi);
    double rhs = 0.5 * (num::dot(pt.y, pt.y) + 1.0) * num::norm(pt.eta);
    worst = std::max(worst, std::abs(lhs - rhs) / (1 + rhs));
  }
  return detail::make("RG1", "sphere, orthogonality, reconstruction and norm relations of the cotangent lift",
                      worst, 1e-10, draws, ts);
}

inline Check check_rg_tautological(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < std::max(samples / 10, 10); ++t) {
    std::size_t n = (t % 2) ? 2 : 3;
    reg::FlatCotangentPoint pt{rng.vec(n, -1.5, 1.5), rng.vec(n, -1.5, 1.5)};
    auto r = reg::moser_identity_residuals(pt, rng);
    worst = std::max(worst, r[3]);
  }
  return detail::make("RG2", "tautological one-form pulls back across the lift",
                      worst, 1e-7, samples, ts);
}

inline Check check_rg_invariants(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < std::max(samples / 20, 3); ++t) {
    double E = rng.uniform(-0.9, -0.2);
    // build an on-surface state
    reg::LCState s{rng.uniform(-1, 1), rng.uniform(-1, 1), 0, 0};
    double z2 = s.xi * s.xi + s.eta * s.eta;
    double wmod = std::sqrt(std::max(8.0 * (1 + E * z2), 0.1));
    double ang = rng.uniform(0, 6.28);
    s.om = wmod * std::cos(ang);
    s.chi = wmod * std::sin(ang);
    double w0 = std::sqrt(-E / 2);
    reg::Trajectory tr = reg::integrate_regularized(E, s, 2 * 3.14159265 / w0);
    auto quad = [&](const reg::LCState& q) {
      return q.om * q.om + q.chi * q.chi -
             8 * E * (q.xi * q.xi + q.eta * q.eta);
    };
    double q0 = quad(s);
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
      worst = std::max(worst, std::abs(quad(tr.states[i]) - q0) / (1 + q0));
      reg::LCState ex = reg::regularized_exact(E, s, tr.tau[i]);
      worst = std::max(worst, std::abs(tr.states[i].xi - ex.xi));
      worst = std::max(worst, std::abs(tr.states[i].om - ex.om));
    }
  }
  return detail::make("RG3", "regularized trajectories conserve the quadratic invariant and match the sinusoid",
                      worst, 1e-8, samples, ts);
}

inline Check check_rg_lie(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < samples; ++t) {
    reg::PhaseState2D s = detail::random_state(rng);
    double l = rng.uniform(0.5, 3.0);
    worst = std::max(worst, std::abs(reg::hamiltonian(reg::lie_scale(s, l)) * l * l -
                                     reg::hamiltonian(s)));
  }
  return detail::make("RG4", "energy rescales by 1/lambda^2 under the scaling symmetry",
                      worst, 1e-12, samples, ts);
}

// --- complex structures ----------------------------------------------------------------

inline Check check_st_quaternion(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  int draws = std::max(samples, 1000);
  for (int t = 0; t < draws; ++t) {
    reg::PhaseState2D s = detail::random_state(rng);
    Mat J1 = cxs::j_matrix(cxs::JLabel::J1, s);
    Mat J2 = cxs::j_matrix(cxs::JLabel::J2, s);
    Mat J3 = cxs::j_matrix(cxs::JLabel::J3, s);
    Mat I = Mat::identity(4);
    worst = std::max({worst, (J1 * J1 + I).max_abs(), (J2 * J2 + I).max_abs(),
                      (J3 * J3 + I).max_abs(), (J3 - J1 * J2).max_abs(),
                      (J3 + J2 * J1).max_abs()});
  }
  return detail::make("ST1", "the three complex structures satisfy the quaternion relations",
                      worst, 1e-9, draws, ts);
}

inline Check check_st_nijenhuis(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < std::max(samples / 20, 4); ++t) {
    reg::PhaseState2D s = detail::random_state(rng);
    for (auto l : {cxs::JLabel::J2, cxs::JLabel::J3}) {
      double ra = cxs::nijenhuis_residual(l, s, 1e-3);
      double rb = cxs::nijenhuis_residual(l, s, 1e-4);
      worst = std::max(worst, rb / 1e-5);
      if (rb > 1e-12) {
        double slope = std::log10(ra / rb);
        worst = std::max(worst, std::abs(slope - 2.0) / 0.5);
      }
    }
  }
  return detail::make("ST2", "integrability obstructions vanish to second order in the bracket step",
                      worst, 1.0, samples, ts);
}

inline Check check_st_conifold(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < samples; ++t) {
    cxs::ConifoldPoint w = cxs::random_cone_point(rng, 3, rng.uniform(0.2, 3.0));
    reg::KeplerPoint kp = cxs::conifold_to_kepler(w);
    cxs::ConifoldPoint back = cxs::kepler_to_conifold(kp);
    for (int j = 0; j < 4; ++j)
      worst = std::max(worst,
                       std::abs(back.w[j] - w.w[j]) / (1 + std::abs(w.w[j])));
    auto [r1, r2] = cxs::norm_identities_residual(w);
    worst = std::max({worst, r1, r2});
  }
  return detail::make("ST3", "cone points and cotangent-sphere points round trip; norm identities hold",
                      worst, 1e-10, samples, ts);
}

inline Check check_st_cocycle(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  int done = 0;
  while (done < samples) {
    cxs::ConifoldPoint cp = cxs::random_cone_point(rng, 3, rng.uniform(0.3, 2.0));
    CVec z = cxs::z_from_w(cp.w);
    bool ok = true;
    for (int j = 0; j < 4; ++j)
      if (std::abs(z[j]) < 0.05) ok = false;
    if (!ok) continue;
    ++done;
    cxs::ResolvedChartPoint a = cxs::chart_from_z(cxs::Chart::P11_1, z);
    auto via = cxs::chart_transition(cxs::chart_transition(a, cxs::Chart::P11_2),
                                     cxs::Chart::P11_3);
    auto direct = cxs::chart_transition(a, cxs::Chart::P11_3);
    worst = std::max(worst, std::abs(via.c1 - direct.c1) / (1 + std::abs(direct.c1)));
    worst = std::max(worst, std::abs(via.c2 - direct.c2) / (1 + std::abs(direct.c2)));
    worst = std::max(worst, std::abs(via.c3 - direct.c3) / (1 + std::abs(direct.c3)));
  }
  return detail::make("ST4", "chart transitions compose consistently on triple overlaps",
                      worst, 1e-10, samples, ts);
}

// --- metrics -------------------------------------------------------------------------

inline Check check_mt_oracle(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < std::max(samples / 5, 6); ++t) {
    std::size_t n = 2 + (t % 3);
    CVec w = met::random_chart_point(rng, n);
    CMat H = met::kepler_hermitian(w);
    CMat O = num::fd_ddbar(met::kepler_potential, w);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        worst = std::max(worst, std::abs(H(i, j) - O(i, j)));
    double det = std::abs(H.det());
    worst = std::max(worst, std::abs(det - met::kepler_det_closed(w)) / det * 1e-1);
  }
  return detail::make("MT1", "closed-form cotangent metric equals its potential's complex Hessian",
                      worst, 1e-7, samples, ts);
}

inline Check check_mt_ricci(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < std::max(samples / 10, 4); ++t) {
    for (std::size_t n : {2u, 3u, 4u}) {
      CVec w = met::random_chart_point(rng, n);
      CMat R = met::kepler_ricci(w);
      if (n == 2) {
        worst = std::max(worst, R.max_abs());
      } else {
        CMat C = met::kepler_ricci_closed(w);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(R(i, j) - C(i, j)));
      }
    }
  }
  return detail::make("MT2", "log-determinant Ricci matches its closed form; flat in complex dimension two",
                      worst, 1e-6, samples, ts);
}

inline Check check_mt_profiles(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  int per = std::max(samples / 16, 3);
  for (int n : {2, 3, 4}) {
    met::RadialProfile rp = met::conifold_rf_profile(n, 2.0, 0.3);
    for (int t = 0; t < per; ++t) {
      CVec w = met::random_chart_point(rng, n);
      auto logdet = [&](const CVec& z) {
        return std::log(std::abs(met::metric_from_profile(rp, z).det()));
      };
      worst = std::max(worst, num::fd_ddbar(logdet, w).max_abs());
    }
  }
  for (int n : {2, 3}) {
    cplx a(0.4, 0.2);
    met::RadialProfile rp = met::deformed_rf_profile(n, std::abs(a), 2.0, 50.0);
    for (int t = 0; t < per; ++t) {
      CVec w = met::random_chart_point(rng, n, a, 0.8, 1.5);
      auto logdet = [&](const CVec& z) {
        return std::log(std::abs(met::metric_from_profile(rp, z, a).det()));
      };
      worst = std::max(worst, num::fd_ddbar(logdet, w).max_abs());
    }
  }
  return detail::make("MT3", "radial profiles solving the volume ODE give Ricci-flat metrics",
                      worst, 1e-5, samples, ts);
}

inline Check check_mt_sasaki(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < std::max(samples / 10, 5); ++t) {
    std::size_t n = (t % 2) ? 2 : 3;
    Vec y = rng.vec(n, -1.2, 1.2), eta = rng.vec(n, -1.2, 1.2);
    if (num::norm(eta) < 0.3) continue;
    Mat A = met::sasaki_sphere(y, eta);
    Mat B = met::sasaki_general(y, eta);
    worst = std::max(worst, 1e3 * (A - B).max_abs());  // 1e-10 target -> 1e-7 scale
    double tloc = rng.uniform(0.5, 2.0);
    met::ConeSplit cs = met::kepler_cone_split(tloc, y, eta);
    worst = std::max(worst, cs.residual);
    worst =
        std::max(worst, std::abs(cs.link_coeff_r - 1 / std::sqrt(2.0)) * 1e-1);
  }
  return detail::make("MT4", "bundle metric closed form matches the covariant construction; cone split is exact",
                      worst, 1e-7, samples, ts);
}

inline Check check_mt_deformed_limit(std::uint64_t seed, int samples, double ts) {
  (void)seed;
  double worst = 0;
  for (int n : {2, 3}) {
    met::RadialProfile cone = met::conifold_rf_profile(n, 2.0, 0.0);
    double t0 = 2.0;
    double d1 = std::abs(met::deformed_rf_profile(n, 0.1, 2.0, 50.0).f1(t0) -
                         cone.f1(t0));
    double d2 = std::abs(met::deformed_rf_profile(n, 0.05, 2.0, 50.0).f1(t0) -
                         cone.f1(t0));
    double order = std::log(d1 / d2) / std::log(2.0);
    worst = std::max(worst, 0.9 - order);  // pass when observed order >= 0.9
  }
  return detail::make("MT5", "deformed profiles converge to the cone profile as the deformation shrinks",
                      worst, 0.0, samples, ts);
}

// --- toric ---------------------------------------------------------------------------

inline Check check_to_legendre(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < std::max(samples / 5, 10); ++t) {
    int n = (t % 2) ? 2 : 3;
    toric::Profile bf = toric::Profile::b_family(n, 0.8);
    toric::HessianPotential psi = toric::complex_potential(bf, n);
    Vec y(n);
    for (auto& v : y) v = rng.uniform(0.7, 2.0);
    auto [G, Gi] = toric::metric_G(bf, y);
    worst = std::max(worst, (psi.hess(y) * Gi - Mat::identity(n)).max_abs());
    Vec yd = psi.grad(y);
    double psidual = num::dot(y, yd) - psi.value(y);
    double psi_back = num::dot(y, yd) - psidual;
    worst = std::max(worst, std::abs(psi_back - psi.value(y)));
    Vec yy = toric::y_from_dual(bf, yd);
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(yy[i] - y[i]));
  }
  return detail::make("TO1", "Hessians of the potential pair are mutually inverse; double transform is the identity",
                      worst, 1e-9, samples, ts);
}

inline Check check_to_oneform(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < std::max(samples / 10, 5); ++t) {
    int n = (t % 2) ? 2 : 3;
    toric::Profile bf = toric::Profile::b_family(n, 0.6);
    toric::HessianPotential psi = toric::complex_potential(bf, n);
    CVec z(n);
    for (int i = 0; i < n; ++i)
      z[i] = cplx(rng.uniform(0.5, 1.4), rng.uniform(-0.3, 0.3));
    Vec zr(2 * n);
    for (int i = 0; i < n; ++i) {
      zr[i] = z[i].real();
      zr[i + n] = z[i].imag();
    }
    auto chart = [&](const Vec& v) {
      CVec zz(n);
      for (int i = 0; i < n; ++i) zz[i] = cplx(v[i], v[i + n]);
      Vec y = toric::moment_map(bf, zz);
      Vec out(2 * n);
      for (int i = 0; i < n; ++i) {
        out[i] = y[i];
        out[i + n] = std::atan2(zz[i].imag(), zz[i].real());
      }
      return out;
    };
    num::RectMatrix J = num::fd_jacobian(chart, zr);
    Vec y = toric::moment_map(bf, z);
    Mat G = psi.hess(y);
    for (int dir = 0; dir < 2 * n; ++dir)
      for (int i = 0; i < n; ++i) {
        cplx lhs = 0;
        for (int j = 0; j < n; ++j) lhs += 0.5 * G(i, j) * J(j, dir);
        lhs += cplx(0, 1) * J(n + i, dir);
        cplx dzi = cplx(dir == i ? 1.0 : 0.0, dir == i + n ? 1.0 : 0.0);
        worst = std::max(worst, std::abs(lhs - dzi / z[i]));
      }
  }
  return detail::make("TO2", "half-Hessian plus angle differentials assemble the logarithmic (1,0)-forms",
                      worst, 1e-6, samples, ts);
}

inline Check check_to_scalar(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  auto sweep = [&](const toric::Profile& p, int n, double lo, double hi,
                   double target, bool has_target) {
    for (int t = 0; t < std::max(samples / 16, 3); ++t) {
      Vec y(n);
      for (auto& v : y) v = rng.uniform(lo, hi);
      toric::ScalarCurvature s = toric::scalar_curvature(p, y);
      worst = std::max(worst, std::abs(s.closed - s.abreu));
      worst = std::max(worst, std::abs(s.closed - s.logdet));
      if (has_target) worst = std::max(worst, std::abs(s.closed - target));
    }
  };
  sweep(toric::Profile::flat(2), 2, 0.4, 1.5, 0.0, true);
  sweep(toric::Profile::b_family(2, 0.7), 2, 0.8, 2.0, 0.0, true);
  sweep(toric::Profile::b_family(3, 0.7), 3, 0.8, 2.0, 0.0, true);
  sweep(toric::Profile::einstein(2, 0.5, 0.3, 0.05, 4.0), 2, 0.3, 0.8, 0.5, true);
  sweep(toric::Profile::csc(2, 0.3, 0.2, 0.5, 0.05, 3.0), 2, 0.2, 0.9, 0.3, true);
  return detail::make("TO3", "scalar curvature agrees across closed-form, divergence and log-det routes",
                      worst, 1e-4, samples, ts);
}

inline Check check_to_volume(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < std::max(samples / 5, 10); ++t) {
    int n = (t % 2) ? 2 : 3;
    toric::Profile bf = toric::Profile::b_family(n, 0.6);
    CVec z = rng.cvec(n, -1.2, 1.2);
    if (num::cnorm2(z) < 0.2) continue;
    CMat h = toric::kahler_matrix_z(bf, z);
    worst = std::max(worst, std::abs(std::abs(h.det()) -
                                     std::exp(toric::log_volume_density(bf, z))) /
                                std::abs(h.det()));
  }
  return detail::make("TO4", "volume density matches the radial closed form",
                      worst, 1e-7, samples, ts);
}

inline Check check_to_ricci_closed(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  toric::Profile gen = toric::Profile::csc(2, 0.3, 0.2, 0.5, 0.05, 3.0);
  for (int t = 0; t < std::max(samples / 20, 3); ++t) {
    Vec yp = {rng.uniform(0.3, 0.8), rng.uniform(0.3, 0.8)};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          auto e1 = [&](const Vec& yy) {
            return toric::ricci_symplectic_matrix(gen, yy)(i, j);
          };
          auto e2 = [&](const Vec& yy) {
            return toric::ricci_symplectic_matrix(gen, yy)(i, k);
          };
          Vec g1 = num::fd_gradient(e1, yp);
          Vec g2 = num::fd_gradient(e2, yp);
          worst = std::max(worst, std::abs(g1[k] - g2[j]));
        }
  }
  return detail::make("TO5", "the symplectic Ricci form is closed (coefficients are exact gradients)",
                      worst, 1e-7, samples, ts);
}

// --- families --------------------------------------------------------------------------

inline Check check_fa_ricci_flat(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (const auto& f : detail::family_roster()) {
    if (f.tag == fam::Tag::KEPLER_K3_LIFT) continue;
    for (int t = 0; t < std::max(samples / 32, 2); ++t) {
      CVec pt = fam::random_chart_point(f, rng, 0.45, 1.1);
      auto logdet = [&](const CVec& q) {
        return std::log(std::abs(fam::family_metric(f, q).det()));
      };
      worst = std::max(worst, num::fd_ddbar(logdet, pt).max_abs());
    }
  }
  return detail::make("FA1", "every constructed family is Ricci-flat in its chart",
                      worst, 1e-5, samples, ts);
}

inline Check check_fa_structure(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  for (const auto& f : detail::family_roster()) {
    fam::HessianPotential psi = fam::family_psi(f);
    for (int t = 0; t < std::max(samples / 20, 3); ++t) {
      Vec r = fam::random_radii(f, rng, 0.4, 1.3);
      Vec y = fam::family_moment(f, r);
      Mat G = fam::family_G(f, y);
      worst = std::max(worst, 10.0 * (G * G.inverse() - Mat::identity(G.size())).max_abs());
      worst = std::max(worst, (psi.hess(y) - G).max_abs() / (1 + G.max_abs()));
    }
  }
  return detail::make("FA2", "affine-log potentials reproduce the metric blocks; blocks invert exactly",
                      worst, 1e-8, samples, ts);
}

inline Check check_fa_polytope(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  int per = std::max(samples, 100);
  for (const auto& f : detail::family_roster()) {
    fam::ConvexDomain dom = fam::moment_polytope(f);
    for (int t = 0; t < per; ++t) {
      Vec r = fam::random_radii(f, rng, 0.02, 2.5);
      Vec y = fam::family_moment(f, r);
      worst = std::max(worst, -dom.min_slack(y));
    }
  }
  return detail::make("FA3", "moment images satisfy every polytope inequality",
                      worst, 1e-9, per, ts);
}

inline Check check_fa_edges(std::uint64_t seed, int samples, double ts) {
  (void)seed;
  double worst = 0;
  auto dir_fit = [](const Vec& y, const Vec& gen) {
    double c = num::dot(y, gen) / (num::norm(y) * num::norm(gen));
    return std::sqrt(std::max(0.0, 1.0 - c * c));
  };
  fam::Family kl{fam::Tag::KEPLER_K3_LIFT};
  worst = std::max(worst, dir_fit(fam::family_moment(kl, {1e3, 0.7, 1e-9}), {1, 1, 0}));
  worst = std::max(worst, dir_fit(fam::family_moment(kl, {1e3, 1e-9, 0.7}), {1, 0, 1}));
  worst = std::max(worst, dir_fit(fam::family_moment(kl, {1e-9, 0.7, 1e-9}), {0, 1, 0}));
  worst = std::max(worst, dir_fit(fam::family_moment(kl, {1e-9, 1e-9, 0.7}), {0, 0, 1}));
  double a = 0.8;
  fam::Family r3{fam::Tag::RESOLVED3, 2, a, 0, 0, 0, 1, 0};
  worst = std::max(worst, dir_fit(fam::family_moment(r3, {1e3, 1e-3, 1e-12}), {1, 1, 0}));
  worst = std::max(worst, dir_fit(fam::family_moment(r3, {1e3, 1e-12, 1e-3}), {1, 0, 1}));
  {
    Vec y = fam::family_moment(r3, {1e-6, 0.9, 1e-9});
    worst = std::max(worst, std::abs(y[0] + a));
    Vec y2 = fam::family_moment(r3, {1e-6, 1e-9, 0.9});
    worst = std::max(worst, std::abs(y2[0] + a));
    for (double r0 : {0.3, 1.0, 2.5}) {
      Vec yi = fam::family_moment(r3, {r0, 1e-9, 1e-9});
      worst = std::max(worst, std::abs(yi[0] + a / (1 + r0 * r0)));
      worst = std::max(worst, std::abs(yi[1]) + std::abs(yi[2]));
    }
  }
  return detail::make("FA4", "cone generators and boundary edges are attained in chart limits",
                      worst, 1e-4, samples, ts);
}

inline Check check_fa_polar(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  double b = 0.7;
  fam::Family eh{fam::Tag::EH, 2, 0, 0, 0, 0, 1.0, b * b};
  fam::Family pp{fam::Tag::P1P1, 2, 0, 0, 0.6, 0.9, 1, 0};
  for (int t = 0; t < std::max(samples / 10, 5); ++t) {
    double s = rng.uniform(std::sqrt(b) * 1.15, 2.0);
    double th = rng.uniform(0.3, 2.8);
    Mat standard = fam::eh_polar_metric(b, s, th);
    Mat pulled = fam::eh_polar_pullback(eh, s, th, rng.uniform(0, 6.2),
                                        rng.uniform(0, 6.2));
    worst = std::max(worst, (standard - pulled).max_abs() / (1 + standard.max_abs()));
    double r = rng.uniform(0.4, 1.5);
    double t1 = rng.uniform(0.3, 2.8), t2 = rng.uniform(0.3, 2.8);
    Mat polar = fam::p1p1_polar_metric(pp, r, t1, t2);
    Mat ppulled = fam::p1p1_polar_pullback(pp, r, t1, rng.uniform(0, 6.2), t2,
                                           rng.uniform(0, 6.2), rng.uniform(0, 6.2));
    worst = std::max(worst, (polar - ppulled).max_abs() / (1 + polar.max_abs()));
  }
  return detail::make("FA5", "polar closed forms agree with the ansatz metrics under the angle maps",
                      worst, 1e-6, samples, ts);
}

inline Check check_fa_cubic(std::uint64_t seed, int samples, double ts) {
  Rng rng(seed);
  double worst = 0;
  fam::Family r3{fam::Tag::RESOLVED3, 2, 0.8, 0, 0, 0, 1, 0};
  fam::Family pp{fam::Tag::P1P1, 2, 0, 0, 0.6, 0.9, 1, 0};
  fam::UProfile u3 = fam::family_uprofile(r3);
  fam::UProfile up = fam::family_uprofile(pp);
  for (int t = 0; t < std::max(samples, 50); ++t) {
    double u = std::pow(10.0, rng.uniform(-2, 2));
    double y = u3.y(u), yp = u3.yprime(u);
    worst = std::max(worst, std::abs((0.8 + y) * y * yp - 2.0 / 3.0 * u) / (1 + u));
    double y2 = up.y(u), yp2 = up.yprime(u);
    worst = std::max(worst,
                     std::abs((0.6 + y2) * (0.9 + y2) * yp2 - 2.0 / 3.0 * u) / (1 + u));
  }
  return detail::make("FA6", "cubic profiles satisfy their first-order ODEs",
                      worst, 1e-9, samples, ts);
}

// --- flows -----------------------------------------------------------------------------

inline Check check_fl_fixed_points(std::uint64_t seed, int samples, double ts) {
  (void)seed;
  (void)samples;
  double worst = 0;
  for (int n : {2, 3, 4})
    for (double c1 : {0.0, 0.5})
      worst = std::max(worst,
                       flow::flow_residual(flow::conifold_fixed_point(
                           n, 2.0, c1, 0.0, num::Grid1D::uniform(0.5, 2.0, 256))));
  for (int n : {2, 3})
    worst = std::max(worst, flow::flow_residual(flow::un_fixed_point(
                                n, 1.0, 0.0, num::Grid1D::uniform(0.5, 2.0, 256))));
  return detail::make("FL1", "stationary profiles are gauged fixed points on 256-node grids",
                      worst, 1e-6, 256, ts);
}

inline Check check_fl_decay(std::uint64_t seed, int samples, double ts) {
  (void)seed;
  (void)samples;
  double worst = -1.0;  // most positive residual increase observed
  for (int n : {2, 3}) {
    flow::FlowState s = flow::conifold_fixed_point(
        n, 2.0, 0.0, 0.0, num::Grid1D::uniform(0.5, 2.0, 256));
    flow::add_interior_bump(s, 1e-3);
    double h = s.spacing();
    double prev = flow::flow_residual(s);
    for (int k = 0; k < 100; ++k) {
      s = flow::flow_step(std::move(s), 0.1 * h * h);
      double cur = flow::flow_residual(s);
      worst = std::max(worst, (cur - prev) / (1 + prev));
      prev = cur;
    }
  }
  return detail::make("FL2", "interior residuals are non-increasing for perturbed fixed points",
                      worst, 1e-12, 100, ts);
}

inline Check check_fl_gauge(std::uint64_t seed, int samples, double ts) {
  (void)seed;
  (void)samples;
  flow::FlowState s = flow::conifold_fixed_point(
      2, 2.0, 0.0, 0.0, num::Grid1D::uniform(0.5, 2.0, 64));
  Vec base = flow::flow_rhs(s);
  flow::FlowState shifted = s;
  for (auto& v : shifted.values) v += 0.37;
  Vec r2 = flow::flow_rhs(shifted);
  double worst = 0;
  for (std::size_t i = 2; i + 2 < base.size(); ++i)
    worst = std::max(worst, std::abs(r2[i] - base[i]));
  return detail::make("FL3", "adding a constant to the potential leaves the flow invariant at zero coupling",
                      worst, 1e-10, 64, ts);
}

// --- suite registry ----------------------------------------------------------------------

using CheckFn = std::function<Check(std::uint64_t, int, double)>;

inline const std::map<std::string, std::vector<CheckFn>>& suite_registry() {
  static const std::map<std::string, std::vector<CheckFn>> reg = {
      {"numkit",
       {check_nk_gradient, check_nk_ddbar, check_nk_quad, check_nk_cubic}},
      {"regularization",
       {check_rg_moser, check_rg_tautological, check_rg_invariants, check_rg_lie}},
      {"structures",
       {check_st_quaternion, check_st_nijenhuis, check_st_conifold,
        check_st_cocycle}},
      {"metrics",
       {check_mt_oracle, check_mt_ricci, check_mt_profiles, check_mt_sasaki,
        check_mt_deformed_limit}},
      {"toric",
       {check_to_legendre, check_to_oneform, check_to_scalar, check_to_volume,
        check_to_ricci_closed}},
      {"families",
       {check_fa_ricci_flat, check_fa_structure, check_fa_polytope,
        check_fa_edges, check_fa_polar, check_fa_cubic}},
      {"flows", {check_fl_fixed_points, check_fl_decay, check_fl_gauge}}};
  return reg;
}

inline std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : suite_registry()) names.push_back(k);
  return names;
}

inline Report run_suite(const std::string& suite, std::uint64_t seed, int samples,
                        double tol_scale) {
  Report rep;
  rep.suite = suite;
  rep.seed = seed;
  rep.samples = samples;
  rep.tol_scale = tol_scale;
  auto t0 = std::chrono::steady_clock::now();
  auto run = [&](const std::string& name, const std::vector<CheckFn>& fns) {
    for (std::size_t k = 0; k < fns.size(); ++k) {
      // per-check seed so ordering and parallel execution cannot matter
      Check c = fns[k](seed ^ detail::fnv1a(name + "#" + std::to_string(k)),
                       samples, tol_scale);
      rep.pass = rep.pass && c.pass;
      rep.checks.push_back(std::move(c));
    }
  };
  if (suite == "all") {
    for (const auto& [name, fns] : suite_registry()) run(name, fns);
  } else {
    auto it = suite_registry().find(suite);
    if (it == suite_registry().end())
      throw std::invalid_argument("unknown suite: " + suite);
    run(it->first, it->second);
  }
  rep.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rep;
}

}  // namespace verify
}  // namespace kgeom
