// kgeom: command-line front door for the numerical geometry library.
//
// Subcommands: verify, eval-metric, orbit, polytope, flow, curvature.
// JSON for structured output, CSV for sequences. Exit codes: 0 pass,
// 1 check failure, 2 usage/config error, 3 domain error.

#include <CLI11.hpp>
#include <json.hpp>

#include <kgeom/families.hpp>
#include <kgeom/flows.hpp>
#include <kgeom/regularization.hpp>
#include <kgeom/toric.hpp>
#include <kgeom/verify.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using json = nlohmann::json;
using namespace kgeom;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

void write_output(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  os << payload;
}

json report_to_json(const verify::Report& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"id", c.id},
                      {"fact", c.fact},
                      {"residual", c.residual},
                      {"tolerance", c.tolerance},
                      {"samples", c.samples},
                      {"pass", c.pass}});
  return json{{"suite", rep.suite},       {"seed", rep.seed},
              {"samples", rep.samples},   {"tol_scale", rep.tol_scale},
              {"checks", checks},         {"pass", rep.pass},
              {"wall_ms", rep.wall_ms}};
}

json family_to_json(const fam::Family& f) {
  return json{{"family", fam::family_name(f)}, {"n", f.n}, {"a", f.a},
              {"b", f.b},                      {"a1", f.a1}, {"a2", f.a2},
              {"c1", f.c1},                    {"c2", f.c2}};
}

fam::Family family_from_json(const json& j) {
  fam::Family f;
  std::string name = j.at("family").get<std::string>();
  if (name == "UN_RF") f.tag = fam::Tag::UN_RF;
  else if (name == "QUOTIENT_ON") f.tag = fam::Tag::QUOTIENT_ON;
  else if (name == "EH") f.tag = fam::Tag::EH;
  else if (name == "RESOLVED3") f.tag = fam::Tag::RESOLVED3;
  else if (name == "P1P1") f.tag = fam::Tag::P1P1;
  else if (name == "O22") f.tag = fam::Tag::O22;
  else if (name == "KEPLER_K3_LIFT") f.tag = fam::Tag::KEPLER_K3_LIFT;
  else if (name == "KRF_K3") f.tag = fam::Tag::KRF_K3;
  else throw std::invalid_argument("unknown family: " + name);
  f.n = j.value("n", 2);
  f.a = j.value("a", 0.0);
  f.b = j.value("b", 0.0);
  f.a1 = j.value("a1", 0.0);
  f.a2 = j.value("a2", 0.0);
  f.c1 = j.value("c1", 1.0);
  f.c2 = j.value("c2", 0.0);
  return f;
}

json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  is >> j;
  return j;
}

// "re,im;re,im;..." -> CVec
num::CVec parse_point(const std::string& s) {
  num::CVec out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ';')) {
    double re = 0, im = 0;
    if (std::sscanf(part.c_str(), "%lf,%lf", &re, &im) < 1)
      throw std::invalid_argument("bad point component: " + part);
    out.emplace_back(re, im);
  }
  if (out.empty()) throw std::invalid_argument("empty point");
  return out;
}

json matrix_to_json(const num::CMat& H) {
  json rows = json::array();
  for (std::size_t i = 0; i < H.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < H.size(); ++j)
      row.push_back({H(i, j).real(), H(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

std::string report_to_csv(const verify::Report& rep) {
  std::ostringstream os;
  os << "id,fact,residual,tolerance,samples,pass\n";
  for (const auto& c : rep.checks)
    os << c.id << ",\"" << c.fact << "\"," << c.residual << ',' << c.tolerance
       << ',' << c.samples << ',' << (c.pass ? 1 : 0) << '\n';
  return os.str();
}

int cmd_verify(const std::string& suite, std::uint64_t seed, int samples,
               double tol_scale, const std::string& out,
               const std::string& format) {
  if (format != "json" && format != "csv") {
    std::cerr << "error: --format must be json or csv\n";
    return kExitUsage;
  }
  verify::Report rep;
  try {
    rep = verify::run_suite(suite, seed, samples, tol_scale);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  for (const auto& c : rep.checks)
    std::cerr << (c.pass ? "[PASS] " : "[FAIL] ") << c.id << "  residual "
              << c.residual << "  tol " << c.tolerance << "  (" << c.fact
              << ")\n";
  std::cerr << (rep.pass ? "all checks passed" : "CHECK FAILURES PRESENT")
            << " in " << rep.wall_ms << " ms\n";
  write_output(out, format == "csv" ? report_to_csv(rep)
                                    : report_to_json(rep).dump(2));
  return rep.pass ? kExitPass : kExitCheckFailure;
}

int cmd_eval_metric(const std::string& config, const std::string& point,
                    const std::string& out) {
  json cfg = load_config(config);
  fam::Family f = family_from_json(cfg);
  num::CVec pt = parse_point(point);
  num::CMat H = fam::family_metric(f, pt);
  num::Vec ev = num::herm_eigenvalues(H);
  json j{{"config", family_to_json(f)},
         {"matrix", matrix_to_json(H)},
         {"eigenvalues", ev},
         {"hermitian", H.hermitian(1e-10)},
         {"positive_definite", ev.front() > 0}};
  write_output(out, j.dump(2));
  return kExitPass;
}

int cmd_orbit(double E, const std::string& init, long steps, double tau_span,
              const std::string& out) {
  if (!(E < 0)) {
    std::cerr << "error: the regularized path needs E < 0\n";
    return kExitDomain;
  }
  reg::LCState s;
  if (init.empty()) {
    s = reg::lc_inverse(reg::PhaseState2D{1, 0, 0, 1});  // circular orbit
    // rescale the momenta onto the requested energy surface
    double z2 = s.xi * s.xi + s.eta * s.eta;
    double wmod = std::sqrt(8.0 * (1 + E * z2));
    double cur = std::hypot(s.om, s.chi);
    s.om *= wmod / cur;
    s.chi *= wmod / cur;
  } else {
    num::CVec v = parse_point(init);
    if (v.size() != 2)
      throw std::invalid_argument("init wants xi,eta;omega,chi");
    s = reg::LCState{v[0].real(), v[0].imag(), v[1].real(), v[1].imag()};
  }
  if (std::abs(reg::lc_energy_residual(s, E)) >= 1e-8) {
    std::cerr << "error: initial state off the energy surface (residual "
              << reg::lc_energy_residual(s, E) << ")\n";
    return kExitDomain;
  }
  double w0 = std::sqrt(-E / 2.0);
  if (tau_span <= 0) tau_span = 2 * 3.14159265358979323846 / w0;
  double dt = tau_span / static_cast<double>(steps);
  reg::Trajectory tr = reg::integrate_regularized(E, s, tau_span, dt);
  std::ostringstream os;
  reg::write_trajectory_csv(os, tr, E);
  write_output(out, os.str());
  return kExitPass;
}

int cmd_polytope(const std::string& config, const std::string& out) {
  json cfg = load_config(config);
  fam::Family f = family_from_json(cfg);
  fam::ConvexDomain d = fam::moment_polytope(f);
  // each inequality a.y + b >= 0 serializes as the pair [coeffs, const]
  json ineqs = json::array();
  for (const auto& [a, b] : d.inequalities) ineqs.push_back(json::array({a, b}));
  json edges = json::array();
  for (const auto& e : d.edges)
    edges.push_back({{"base", e.base},
                     {"dir", e.dir},
                     {"t_lo", e.t_lo},
                     {"t_hi", e.t_hi},
                     {"ray", e.t_hi < 0}});
  json j{{"config", family_to_json(f)},
         {"inequalities", ineqs},
         {"generators", d.generators},
         {"vertices", d.vertices},
         {"edges", edges}};
  write_output(out, j.dump(2));
  return kExitPass;
}

int cmd_flow(const std::string& config, const std::string& out,
             const std::string& profile_out) {
  json cfg = load_config(config);
  std::string kind = cfg.value("kind", "CONIFOLD");
  int n = cfg.value("n", 2);
  double lambda = cfg.value("lambda", 0.0);
  std::size_t nodes = cfg.value("nodes", 256);
  double lo = cfg.value("lo", 0.5), hi = cfg.value("hi", 2.0);
  long steps = cfg.value("steps", 100);
  double ds_factor = cfg.value("ds_factor", 0.1);
  double perturb = cfg.value("perturb", 0.0);
  num::Grid1D grid = num::Grid1D::uniform(lo, hi, nodes);
  std::optional<flow::FlowState> state;
  if (kind == "CONIFOLD")
    state = flow::conifold_fixed_point(n, cfg.value("c", 2.0), cfg.value("c1", 0.0),
                                       lambda, std::move(grid));
  else if (kind == "UN")
    state = flow::un_fixed_point(n, cfg.value("b", 1.0), lambda, std::move(grid));
  else if (kind == "HESSIAN")
    state = flow::hessian_radial_state(n, cfg.value("b", 0.0), lambda,
                                       cfg.value("gauge", 0.0), std::move(grid));
  else if (kind == "HESSIAN_DUAL")
    state = flow::hessian_dual_radial_state(n, cfg.value("b", 0.0), lambda,
                                            cfg.value("gauge", 0.0), std::move(grid));
  else
    throw std::invalid_argument("unknown flow kind: " + kind);
  if (perturb > 0) flow::add_interior_bump(*state, perturb);
  double h = state->spacing();
  auto trace = flow::run_flow(*state, ds_factor * h * h, steps);
  std::ostringstream os;
  os << "step,time,residual,max_perturbation\n";
  for (const auto& row : trace)
    os << row.step << ',' << row.time << ',' << row.residual << ','
       << row.max_perturbation << '\n';
  write_output(out, os.str());
  json prof{{"kind", kind},
            {"n", n},
            {"lambda", lambda},
            {"nodes", state->grid.nodes},
            {"values", state->values},
            {"time", state->time}};
  if (!profile_out.empty()) write_output(profile_out, prof.dump(2));
  return kExitPass;
}

int cmd_curvature(const std::string& config, int count, std::uint64_t seed,
                  const std::string& out) {
  json cfg = load_config(config);
  std::string name = cfg.value("profile", "b_family");
  int n = cfg.value("n", 2);
  std::optional<toric::Profile> p;
  if (name == "flat") p = toric::Profile::flat(n);
  else if (name == "b_family") p = toric::Profile::b_family(n, cfg.value("b", 1.0));
  else if (name == "einstein")
    p = toric::Profile::einstein(n, cfg.value("lambda", 0.5), cfg.value("C1", 0.3),
                                 cfg.value("y_lo", 0.05), cfg.value("y_hi", 4.0));
  else if (name == "csc")
    p = toric::Profile::csc(n, cfg.value("R", 0.3), cfg.value("C1", 0.2),
                            cfg.value("C2", 0.5), cfg.value("y_lo", 0.05),
                            cfg.value("y_hi", 3.0));
  else
    throw std::invalid_argument("unknown profile: " + name);
  double lo = cfg.value("sample_lo", 0.3), hi = cfg.value("sample_hi", 0.9);
  num::Rng rng(seed);
  std::ostringstream os;
  for (int i = 0; i < n; ++i) os << 'y' << (i + 1) << ',';
  os << "R_closed,R_abreu,R_logdet\n";
  for (int k = 0; k < count; ++k) {
    num::Vec y(n);
    for (auto& v : y) v = rng.uniform(lo, hi);
    toric::ScalarCurvature s = toric::scalar_curvature(*p, y);
    for (double v : y) os << v << ',';
    os << s.closed << ',' << s.abreu << ',' << s.logdet << '\n';
  }
  write_output(out, os.str());
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical geometry of regularized two-body phase spaces, "
               "cone metrics and their toric potentials"};
  app.require_subcommand(1);

  std::uint64_t seed = 7;
  int samples = 200;
  double tol_scale = 1.0;
  std::string out, format = "json";

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
  std::string suite = "all";
  verify_cmd->add_option("suite", suite,
                         "suite: regularization|structures|metrics|toric|"
                         "families|flows|numkit|all");
  verify_cmd->add_option("--seed", seed, "RNG seed");
  verify_cmd->add_option("--samples", samples, "sample count per check");
  verify_cmd->add_option("--tol-scale", tol_scale, "tolerance multiplier");
  verify_cmd->add_option("--out", out, "write the JSON report here");
  verify_cmd->add_option("--format", format, "json (report) output format");

  // eval-metric
  auto* eval_cmd = app.add_subcommand("eval-metric", "evaluate a family metric");
  std::string config, point = "1,0;0,0";
  eval_cmd->add_option("--config", config, "family config JSON")->required();
  eval_cmd->add_option("--point", point, "chart point \"re,im;re,im;...\"");
  eval_cmd->add_option("--out", out, "output path");

  // orbit
  auto* orbit_cmd = app.add_subcommand("orbit", "integrate a regularized orbit");
  double energy = -0.5, tau_span = 0;
  long steps = 512;
  std::string init;
  orbit_cmd->add_option("--energy", energy, "orbit energy (must be < 0)");
  orbit_cmd->add_option("--init", init, "initial state \"xi,eta;omega,chi\"");
  orbit_cmd->add_option("--steps", steps, "number of time steps");
  orbit_cmd->add_option("--tau-span", tau_span, "fictitious-time span (default one period)");
  orbit_cmd->add_option("--out", out, "CSV output path");

  // polytope
  auto* poly_cmd = app.add_subcommand("polytope", "emit a moment polytope");
  poly_cmd->add_option("--config", config, "family config JSON")->required();
  poly_cmd->add_option("--out", out, "output path");

  // flow
  auto* flow_cmd = app.add_subcommand("flow", "run a potential-space flow");
  std::string profile_out;
  flow_cmd->add_option("--config", config, "flow config JSON")->required();
  flow_cmd->add_option("--out", out, "CSV trace output path");
  flow_cmd->add_option("--profile-out", profile_out, "final profile JSON path");

  // curvature
  auto* curv_cmd = app.add_subcommand("curvature", "scalar curvature three ways");
  int count = 20;
  curv_cmd->add_option("--config", config, "profile config JSON")->required();
  curv_cmd->add_option("--count", count, "number of sample points");
  curv_cmd->add_option("--seed", seed, "RNG seed");
  curv_cmd->add_option("--out", out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify_cmd->parsed())
      return cmd_verify(suite, seed, samples, tol_scale, out, format);
    if (eval_cmd->parsed()) return cmd_eval_metric(config, point, out);
    if (orbit_cmd->parsed()) return cmd_orbit(energy, init, steps, tau_span, out);
    if (poly_cmd->parsed()) return cmd_polytope(config, out);
    if (flow_cmd->parsed()) return cmd_flow(config, out, profile_out);
    if (curv_cmd->parsed()) return cmd_curvature(config, count, seed, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const num::PositivityError& e) {
    std::cerr << "domain error: " << e.what() << " (eigenvalue " << e.eigenvalue
              << ")\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
