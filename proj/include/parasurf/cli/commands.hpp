#ifndef PARASURF_CLI_COMMANDS_HPP
#define PARASURF_CLI_COMMANDS_HPP

#include <atomic>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <thread>

#include "parasurf/cli/config.hpp"
#include "parasurf/cli/io.hpp"
#include "parasurf/solver.hpp"

namespace parasurf::cli {

using io::json;
namespace fs = std::filesystem;

struct RunContext {
  fs::path out;
  int workers = 1;
  bool verbose = false;
  std::ostream* log = &std::cerr;
};

/// 4.5e-13, 0.0e0
inline std::string sci(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1e", x);
  std::string s(buf);
  auto e = s.find('e');
  std::string mant = s.substr(0, e), ex = s.substr(e + 1);
  const bool neg = ex[0] == '-';
  ex = ex.substr(1);
  while (ex.size() > 1 && ex[0] == '0') ex.erase(0, 1);
  return mant + "e" + (neg ? "-" : "") + ex;
}

inline DiscPtr discretization(const ExperimentConfig& c, int N = 0, int n_modes = -1) {
  return make_discretization(c.surface(), N > 0 ? N : c.N, n_modes >= 0 ? n_modes : c.n_modes);
}

inline SolverOptions solver_options(const ExperimentConfig& c) {
  SolverOptions o;
  o.s = c.s;
  o.t = c.t;
  o.tol = c.tol;
  o.increment_tol = c.increment_tol;
  o.obstruction_tol = c.obstruction_tol;
  o.max_iter = c.max_iter;
  return o;
}

inline std::vector<std::string> term_strings(const std::vector<HamiltonianTerm>& terms) {
  std::vector<std::string> out;
  for (const auto& t : terms) out.push_back(t.to_string());
  return out;
}

// ---------------------------------------------------------------- solve

struct SolveOutcome {
  SolveResult result;
  Hamiltonian H;
  Vec correction;
  int newton_steps = 0;
};

inline SolveOutcome solve_once(const ExperimentConfig& c, const Hamiltonian& H, const SolverContext& ctx) {
  SolveOutcome out;
  const SolverOptions opt = solver_options(c);
  if (c.correct) {
    auto corr = correct_hamiltonian(H, ctx, parse_terms(c.corrections), opt);
    out.result = std::move(corr.solve);
    out.H = corr.H;
    out.correction = corr.d;
    out.newton_steps = corr.newton_steps;
  } else {
    out.result = fixed_point_solve(H, ctx, opt);
    out.H = H;
  }
  return out;
}

inline json trace_json(const SolveResult& r) {
  json t = json::array();
  for (const auto& row : r.trace)
    t.push_back({{"iter", row.iter}, {"residual", row.residual}, {"increment", row.increment},
                 {"contraction", row.contraction}});
  return t;
}

inline json base_json(const ExperimentConfig& c, const std::string& command) {
  return {{"command", command},
          {"surface", c.surface()->name()},
          {"squares", c.surface()->n_squares()},
          {"N", c.N},
          {"direction", {c.xi1, c.xi2}},
          {"terms", term_strings(parse_terms(c.terms))},
          {"seed", c.seed},
          {"s", c.s},
          {"t", c.t}};
}

inline int cmd_solve(const ExperimentConfig& c, const RunContext& rc) {
  auto disc = discretization(c);
  const Direction d = c.direction();
  auto ctx = SolverContext::make(disc, d, solver_options(c));
  const Hamiltonian H = c.hamiltonian(disc->surface_ptr());
  SolveOutcome o = solve_once(c, H, ctx);
  const SolveResult& r = o.result;
  if (rc.verbose)
    for (const auto& row : r.trace)
      *rc.log << "iter " << row.iter << " residual " << sci(row.residual) << " increment " << sci(row.increment)
              << " contraction " << sci(row.contraction) << "\n";
  const auto conj = verify_conjugacy(o.H, r.u, c.t_max, c.n_points, c.seed);
  const LinAlgebra la = linearization(o.H, r.u);

  json j = base_json(c, "solve");
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["converged"] = r.converged;
  j["P"] = io::mat_to_json(r.P);
  j["P_norm"] = r.P_norm();
  j["contraction_factor"] = r.contraction_factor;
  j["conjugacy_deviation"] = conj.max_deviation;
  j["conjugacy_t_max"] = c.t_max;
  j["lagrangian_L2"] = la.L.l2();
  j["trace"] = trace_json(r);
  j["tolerances"] = {{"residual", c.tol}, {"increment", c.increment_tol}, {"obstruction", c.obstruction_tol}};
  json corr = {{"applied", c.correct}};
  if (c.correct) {
    corr["directions"] = term_strings(parse_terms(c.corrections));
    corr["coefficients"] = std::vector<double>(o.correction.data(), o.correction.data() + o.correction.size());
    corr["newton_steps"] = o.newton_steps;
  }
  j["correction"] = corr;

  io::write_json(rc.out / "result.json", j);
  std::vector<std::vector<double>> rows;
  for (const auto& row : r.trace) rows.push_back({double(row.iter), row.residual, row.increment, row.contraction});
  io::write_csv(rc.out / "trace.csv", {"iter", "residual", "increment", "contraction"}, rows);
  std::vector<std::vector<double>> res_plot, conj_plot;
  for (const auto& row : r.trace) res_plot.push_back({double(row.iter), row.residual});
  for (const auto& [t, dev] : conj.deviation_vs_time) conj_plot.push_back({t, dev});
  io::write_csv(rc.out / "plots" / "residual.csv", {"iter", "residual"}, res_plot);
  io::write_csv(rc.out / "plots" / "conjugacy.csv", {"t", "deviation"}, conj_plot);
  io::write_field(rc.out / "fields" / "w", r.u.w, "u - u0");
  io::write_field(rc.out / "fields" / "residual", invariance_residual(o.H, r.u), "F(H, u)");
  return 0;
}

// ---------------------------------------------------------------- check-identities

struct CheckRow {
  std::string name;
  double value;
  double tolerance;
  bool pass() const { return value <= tolerance; }
};

inline Vec cone_cutoff(const DiscPtr& d) {
  const auto& S = d->surface();
  return d->sample([&](const SurfacePoint& p) {
    return S.cone_points().empty() ? 1.0 : dyadic::smoothstep5((S.distance_to_cone_points(p) - 0.15) / 0.2);
  });
}

inline Embedding random_embedding(const DiscPtr& d, const Direction& xi, double amp, Rng& rng) {
  Field w = random_field(d, 4, 1, 3, rng, true);
  const Vec cut = cone_cutoff(d);
  for (int q = 0; q < 4; ++q) w.data().row(q).array() *= cut.transpose().array();
  w = (amp / w.sup()) * w;
  return {w, xi};
}

inline std::vector<CheckRow> identity_checks(const ExperimentConfig& c) {
  std::vector<CheckRow> rows;
  Rng rng(c.seed);
  const Direction xi = c.direction();
  auto surf = c.surface();
  // a default perturbation when the config has none
  std::vector<HamiltonianTerm> terms = parse_terms(c.terms);
  if (terms.empty()) terms = {cos_base(1, 0, 1e-3)};
  const Hamiltonian H(surf, terms, c.mask_radius, c.mask_width);
  const Hamiltonian H0(surf, {}, c.mask_radius, c.mask_width);

  {
    auto d = discretization(c, 16);
    auto la = linearization(H0, Embedding::trivial(d, xi));
    Mat A = Mat::Zero(4, 4), M = Mat::Identity(4, 4);
    A.block(0, 2, 2, 2) = identity(2);
    M.block(2, 2, 2, 2) = -identity(2);
    double dev = std::max({(la.A - Field::constant(d, A)).sup(), la.L.sup(),
                           (la.S + Field::constant(d, identity(2))).sup(), (la.M - Field::constant(d, M)).sup()});
    rows.push_back({"trivial_section_algebra", dev, 1e-14});
    rows.push_back({"B_vanishes_at_trivial_section", assemble_B(la, xi).matrix().sup(), 0.0});
  }
  {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const Mat4 J = symplectic_J();
    double sym = 0, energy = 0;
    for (int q = 0; q < 1000; ++q) {
      SurfacePoint p{static_cast<int>(U(rng) * surf->n_squares()) % surf->n_squares(), U(rng), U(rng)};
      const double e1 = xi.xi1 + 0.1 * (2 * U(rng) - 1), e2 = xi.xi2 + 0.1 * (2 * U(rng) - 1);
      const Jet jet = H.jet(p, e1, e2);
      const Mat4 A = J * jet.hess;
      sym = std::max(sym, (A.transpose() * J + J * A).cwiseAbs().maxCoeff());
      energy = std::max(energy, std::abs(jet.grad.dot(H.vector_field(p, e1, e2))));
    }
    rows.push_back({"symplectic_AtJ_plus_JA", sym, 1e-12});
    rows.push_back({"energy_conservation", energy, 1e-12});
  }
  {
    auto d = discretization(c, c.check_N);
    double worst = 0, minv = 0, lmean = 0;
    for (int k = 0; k < c.samples; ++k) {
      Embedding u = random_embedding(d, xi, 0.01, rng);
      Field v = random_field(d, 4, 1, 3, rng, true);
      worst = std::max(worst, check_linearization_identity(H, u, v, c.fd_step));
      auto la = linearization(H, u);
      minv = std::max(minv, (matmul(la.M, la.M_inv) - Field::constant(d, identity(4))).sup());
      if (surf->is_torus()) lmean = std::max(lmean, la.L.mean().cwiseAbs().maxCoeff());
    }
    rows.push_back({"linearization_identity_rel_error", worst, surf->is_torus() ? 1e-5 : 5e-3});
    rows.push_back({"M_times_M_inv", minv, 1e-10});
    if (surf->is_torus()) rows.push_back({"L_mean", lmean, 1e-10});
  }
  {
    auto d = discretization(c, c.lagrangian_N);
    rows.push_back({"lagrangian_identity_trivial", lagrangian_identity_residual(H0, Embedding::trivial(d, xi)), 1e-14});
    Embedding u = random_embedding(d, xi, 0.01, rng);
    rows.push_back({"lagrangian_identity", lagrangian_identity_residual(H, u), surf->is_torus() ? 1e-8 : 1e-1});
  }
  return rows;
}

inline int cmd_check_identities(const ExperimentConfig& c, const RunContext& rc) {
  auto rows = identity_checks(c);
  json j = base_json(c, "check-identities");
  json arr = json::array();
  bool all = true;
  std::vector<std::vector<double>> csv;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    arr.push_back({{"name", r.name}, {"value", r.value}, {"tolerance", r.tolerance}, {"status", r.pass() ? "pass" : "fail"}});
    all = all && r.pass();
    csv.push_back({double(i), r.value});
    if (rc.verbose) *rc.log << r.name << " " << sci(r.value) << " (tol " << sci(r.tolerance) << ") " << (r.pass() ? "pass" : "fail") << "\n";
  }
  j["checks"] = arr;
  j["all_pass"] = all;
  io::write_json(rc.out / "result.json", j);
  io::write_csv(rc.out / "plots" / "checks.csv", {"index", "value"}, csv);
  if (!all) {
    std::string failed;
    for (const auto& r : rows)
      if (!r.pass()) failed += " " + r.name;
    throw Error(ErrorCode::SolverFailure, "identity checks failed:" + failed);
  }
  return 0;
}

// ---------------------------------------------------------------- ce

inline Field scalar_from_terms(const DiscPtr& d, const std::vector<HamiltonianTerm>& terms) {
  for (const auto& t : terms)
    if (t.i != 0 || t.j != 0) throw Error(ErrorCode::ConfigError, "ce.f must not contain fiber_poly factors");
  return Field::scalar(d, d->sample([&](const SurfacePoint& p) {
    double v = 0;
    for (const auto& t : terms) {
      const double ph = 2 * M_PI * (t.m * p.x + t.n * p.y);
      v += t.coeff * (t.base == BaseKind::One ? 1.0 : t.base == BaseKind::Cos ? std::cos(ph) : std::sin(ph));
    }
    return v;
  }));
}

inline int cmd_ce(const ExperimentConfig& c, const RunContext& rc) {
  auto d = discretization(c);
  const Field f = scalar_from_terms(d, parse_terms(c.f));
  CohomOptions opt;
  opt.s = c.s;
  opt.t = c.t;
  opt.n_candidates = c.n_candidates;
  auto sol = solve_ce(d, c.direction(), f, opt);
  json j = base_json(c, "ce");
  j["f"] = term_strings(parse_terms(c.f));
  j["residual"] = sol.residual;
  j["counterterms"] = io::mat_to_json(sol.counterterms);
  j["u_L2"] = sol.u.l2();
  j["u_sup"] = sol.u.sup();
  io::write_json(rc.out / "result.json", j);
  io::write_field(rc.out / "fields" / "u", sol.u, "solution of X_xi u = f - counterterms");
  std::vector<std::vector<double>> diag;
  for (int i = 0; i < d->N(); ++i) diag.push_back({(i + 0.5) / d->N(), sol.u.data()(0, d->node(0, i, i))});
  io::write_csv(rc.out / "plots" / "u_diagonal.csv", {"x", "u"}, diag);
  return 0;
}

// ---------------------------------------------------------------- obstructions

inline int cmd_obstructions(const ExperimentConfig& c, const RunContext& rc) {
  const int n_cand = c.n_candidates > 0 ? c.n_candidates : 200;
  const int n_modes = c.n_modes > 0 ? c.n_modes : 2 * n_cand;
  auto d = discretization(c, 0, n_modes);
  json j = base_json(c, "obstructions");
  j["n_candidates"] = n_cand;
  j["n_modes"] = n_modes;
  json rows = json::array();
  std::vector<std::vector<double>> trend;
  int prev = -1;
  bool nondecreasing = true;
  for (double s : c.s_values) {
    auto basis = invariant_distributions(*d, c.direction(), s, n_cand, -1.0, c.min_gap_ratio);
    rows.push_back({{"s", s},
                    {"h", basis.count()},
                    {"gap_ratio", basis.gap_ratio},
                    {"threshold", basis.threshold},
                    {"smallest_singular_values",
                     std::vector<double>(basis.spectrum.data(),
                                         basis.spectrum.data() + std::min<Eigen::Index>(6, basis.spectrum.size()))}});
    nondecreasing = nondecreasing && basis.count() >= prev;
    prev = basis.count();
    trend.push_back({s, double(basis.count())});
    std::vector<std::vector<double>> spec;
    for (int i = 0; i < basis.spectrum.size(); ++i) spec.push_back({double(i), basis.spectrum(i)});
    io::write_csv(rc.out / "plots" / ("singular_values_s" + io::fmt(s) + ".csv"), {"index", "sigma"}, spec);
    if (rc.verbose) *rc.log << "s " << s << " h " << basis.count() << " gap " << sci(basis.gap_ratio) << "\n";
  }
  j["rows"] = rows;
  j["nondecreasing"] = nondecreasing;
  io::write_json(rc.out / "result.json", j);
  io::write_csv(rc.out / "plots" / "h_vs_s.csv", {"s", "h"}, trend);
  return 0;
}

// ---------------------------------------------------------------- sweep

inline int cmd_sweep(const ExperimentConfig& c, const RunContext& rc) {
  if (c.epsilons.empty()) throw Error(ErrorCode::ConfigError, "sweep.epsilon must list at least one value");
  auto disc = discretization(c);
  auto ctx = SolverContext::make(disc, c.direction(), solver_options(c));
  const Hamiltonian H = c.hamiltonian(disc->surface_ptr());
  std::vector<json> rows(c.epsilons.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < c.epsilons.size(); i = next++) {
      const double eps = c.epsilons[i];
      json row{{"epsilon", eps}};
      try {
        SolveOutcome o = solve_once(c, H.scaled_perturbation(eps), ctx);
        row["iterations"] = o.result.iterations;
        row["residual"] = o.result.residual;
        row["converged"] = o.result.converged;
        row["P"] = io::mat_to_json(o.result.P);
        row["P_norm"] = o.result.P_norm();
        row["contraction_factor"] = o.result.contraction_factor;
      } catch (const Error& e) {
        row["error"] = std::string(e.name());
        row["message"] = e.what();
      }
      rows[i] = row;
    }
  };
  const int nw = std::max(1, std::min<int>(rc.workers, static_cast<int>(c.epsilons.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < nw; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  json j = base_json(c, "sweep");
  j["rows"] = rows;
  io::write_json(rc.out / "result.json", j);
  std::vector<std::vector<double>> pn, res;
  for (const auto& r : rows)
    if (!r.contains("error")) {
      pn.push_back({r["epsilon"].get<double>(), r["P_norm"].get<double>()});
      res.push_back({r["epsilon"].get<double>(), r["residual"].get<double>()});
    }
  io::write_csv(rc.out / "plots" / "P_norm_vs_epsilon.csv", {"epsilon", "P_norm"}, pn);
  io::write_csv(rc.out / "plots" / "residual_vs_epsilon.csv", {"epsilon", "residual"}, res);
  return 0;
}

// ---------------------------------------------------------------- report

inline std::string report(const fs::path& run_dir) {
  if (!fs::exists(run_dir / "result.json"))
    throw Error(ErrorCode::MissingArtifacts, "no result.json in " + run_dir.string());
  const json j = json::parse(io::read_text(run_dir / "result.json"));
  std::ostringstream os;
  const std::string cmd = j.value("command", "");
  os << "command      " << cmd << "\n";
  os << "surface      " << j.value("surface", "?") << " (N=" << j.value("N", 0) << ")\n";
  if (cmd == "solve") {
    const double res = j.at("residual").get<double>(), tol = j.at("tolerances").at("residual").get<double>();
    const double pn = j.at("P_norm").get<double>(), ptol = j.at("tolerances").at("obstruction").get<double>();
    const bool ok = res <= tol && pn <= ptol;
    os << "iterations   " << j.at("iterations").get<int>() << "\n";
    os << "residual     " << sci(res) << " (tol " << sci(tol) << ")\n";
    os << "obstruction  ";
    for (const auto& row : j.at("P"))
      for (const auto& v : row) os << sci(v.get<double>()) << " ";
    os << "(tol " << sci(ptol) << ")\n";
    os << "conjugacy    " << sci(j.at("conjugacy_deviation").get<double>()) << " over t <= "
       << j.at("conjugacy_t_max").get<double>() << "\n";
    os << "contraction  " << sci(j.at("contraction_factor").get<double>()) << "\n";
    os << "lagrangian   " << sci(j.at("lagrangian_L2").get<double>()) << "\n";
    os << "status       " << (ok ? "PASS" : "FAIL") << "\n";
  } else if (cmd == "check-identities") {
    for (const auto& r : j.at("checks"))
      os << r.at("name").get<std::string>() << "  " << sci(r.at("value").get<double>()) << " (tol "
         << sci(r.at("tolerance").get<double>()) << ") " << r.at("status").get<std::string>() << "\n";
    os << "status       " << (j.at("all_pass").get<bool>() ? "PASS" : "FAIL") << "\n";
  } else if (cmd == "ce") {
    os << "residual     " << sci(j.at("residual").get<double>()) << "\n";
    os << "|u|_L2       " << sci(j.at("u_L2").get<double>()) << "\n";
  } else if (cmd == "obstructions") {
    for (const auto& r : j.at("rows"))
      os << "s=" << r.at("s").get<double>() << "  h=" << r.at("h").get<int>() << "  gap "
         << sci(r.at("gap_ratio").get<double>()) << "\n";
    os << "status       " << (j.at("nondecreasing").get<bool>() ? "PASS" : "FAIL") << "\n";
  } else if (cmd == "sweep") {
    for (const auto& r : j.at("rows")) {
      os << "eps=" << sci(r.at("epsilon").get<double>()) << "  ";
      if (r.contains("error"))
        os << r.at("error").get<std::string>() << "\n";
      else
        os << "residual " << sci(r.at("residual").get<double>()) << "  |P| " << sci(r.at("P_norm").get<double>())
           << "\n";
    }
  }
  return os.str();
}

}  // namespace parasurf::cli

#endif  // PARASURF_CLI_COMMANDS_HPP
