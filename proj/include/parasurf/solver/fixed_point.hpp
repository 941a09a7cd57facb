#ifndef PARASURF_SOLVER_FIXED_POINT_HPP
#define PARASURF_SOLVER_FIXED_POINT_HPP

#include <vector>

#include "parasurf/solver/para_cohomological.hpp"

namespace parasurf {

struct SolverOptions {
  double s = 3.0;                 // Sobolev order of the distributions
  double t = 1.0;                 // norm used for increments and the contraction probe
  double tol = 1e-9;              // L2 residual
  double increment_tol = 1e-10;   // H^t
  double obstruction_tol = 1e-10;
  int max_iter = 200;
  double rho1 = 0.25;             // C^1 bound on F(H, u0)
  double rho2 = 0.25;             // C^1 bound on u - u0
  double u_bound = 1.0;           // H^t bound on u - u0
  double contraction_gate = 0.5;
  int gate_iteration = 3;
  double regime_bound = 0.5;
  double cond_bound = 1e6;
  int n_candidates = 0;
};

struct TraceRow {
  int iter = 0;
  double residual = 0.0;   // ||F(H, u_k)||_L2 at the iterate entering step k
  double increment = 0.0;  // ||u_{k+1} - u_k||_{H^t}
  double contraction = 0.0;
};

struct SolveResult {
  Embedding u;
  std::vector<TraceRow> trace;
  Mat P;  // counterterm fields x 4
  bool converged = false;
  double residual = 0.0;           // final ||F(H, u)||_L2
  double contraction_factor = 0.0;  // max over the trace
  int iterations = 0;
  double P_norm() const { return P.size() ? P.cwiseAbs().maxCoeff() : 0.0; }
};

/// Everything a solve needs besides H: grid, direction and the shared
/// cohomological solver.
struct SolverContext {
  DiscPtr disc;
  Direction xi;
  std::shared_ptr<const CohomologySolver> ce;

  static SolverContext make(const DiscPtr& disc, const Direction& xi, const SolverOptions& opt = {}) {
    CohomOptions co;
    co.s = opt.s;
    co.t = opt.t;
    co.n_candidates = opt.n_candidates;
    return {disc, xi, make_ce_solver(disc, xi, co)};
  }
};

inline double ht_norm(const Field& f, double t) { return sobolev_norm(f, t, NormFlavor::Friedrichs); }

/// ||B M^{-1} w||_{H^t} / ||F(H, u)||_{H^t}, with 0 when F vanishes.
inline double contraction_probe(const LinAlgebra& la, const Embedding& u, double t = 1.0) {
  const double en = ht_norm(la.E, t);
  if (en == 0.0) return 0.0;
  const BOperator B = assemble_B(la, u.xi);
  return ht_norm(matmul(B.matrix(), matmul(la.M_inv, u.w)), t) / en;
}

inline double contraction_probe(const Hamiltonian& H, const Embedding& u, double t = 1.0) {
  return contraction_probe(linearization(H, u), u, t);
}

/// Pieces of one application of the fixed-point map at u = u0 + w.
struct FixedPointStep {
  Field R_PL, R_CM, rhs;
  ParaCohomSolution sol;
};

inline FixedPointStep fixed_point_step(const LinAlgebra& la, const Field& E0, const Embedding& u,
                                       const ParaCohomSystem& sys) {
  const Field& w = u.w;
  FixedPointStep st;
  st.R_PL = la.E - E0 - (matmul(la.A, w) - w.lie(u.xi));
  const Field Minv_w = matmul(la.M_inv, w);
  Field Z(w.disc(), 4, 4);
  Z.set_block(0, 2, la.S);
  st.R_CM = matmul(la.M, matmul(Z, Minv_w)) - matmul(la.M, Minv_w.lie(u.xi)) - sys.apply_K(w);
  st.rhs = (E0 + st.R_PL + st.R_CM).dealias();
  st.sol = sys.solve(st.rhs);
  return st;
}

inline SolveResult fixed_point_solve(const Hamiltonian& H, const SolverContext& ctx, const SolverOptions& opt = {}) {
  SolveResult res;
  res.u = Embedding::trivial(ctx.disc, ctx.xi);
  const Field E0 = invariance_residual(H, res.u);
  const double e0 = c1_norm(E0);
  if (e0 > opt.rho1)
    throw Error(ErrorCode::SmallnessGateFailed,
                "||F(H, u0)||_C1 = " + std::to_string(e0) + " exceeds " + std::to_string(opt.rho1));
  bool fixed = false;
  for (int it = 1; it <= opt.max_iter; ++it) {
    const LinAlgebra la = linearization(H, res.u, opt.cond_bound);
    const ParaCohomSystem sys(la, ctx.xi, ctx.ce, opt.regime_bound);
    const FixedPointStep st = fixed_point_step(la, E0, res.u, sys);
    TraceRow row;
    row.iter = it;
    row.residual = la.E.l2();
    row.contraction = contraction_probe(la, res.u, opt.t);
    const Field w_new = -st.sol.v;
    row.increment = ht_norm(w_new - res.u.w, opt.t);
    res.trace.push_back(row);
    res.contraction_factor = std::max(res.contraction_factor, row.contraction);
    res.P = st.sol.c;
    res.iterations = it;
    if (it == opt.gate_iteration && row.contraction >= opt.contraction_gate)
      throw Error(ErrorCode::SmallnessGateFailed,
                  "contraction factor " + std::to_string(row.contraction) + " at iteration " + std::to_string(it));
    const double c1 = c1_norm(w_new), hn = ht_norm(w_new, opt.t);
    if (c1 > opt.rho2 || hn > opt.u_bound || !std::isfinite(hn))
      throw Error(ErrorCode::SmallnessGateFailed, "iterate left the small ball: ||u - u0||_C1 = " +
                                                      std::to_string(c1) + ", ||u - u0||_Ht = " + std::to_string(hn));
    res.u.w = w_new;
    if (row.increment <= opt.increment_tol) {
      fixed = true;
      break;
    }
  }
  if (!fixed)
    throw Error(ErrorCode::NoConvergence, "no fixed point after " + std::to_string(opt.max_iter) + " iterations");
  res.residual = invariance_residual(H, res.u).l2();
  res.converged = res.residual <= opt.tol && res.P_norm() <= opt.obstruction_tol;
  return res;
}

inline SolveResult fixed_point_solve(const Hamiltonian& H, const DiscPtr& disc, const Direction& d,
                                     const SolverOptions& opt = {}) {
  return fixed_point_solve(H, SolverContext::make(disc, d, opt), opt);
}

}  // namespace parasurf

#endif  // PARASURF_SOLVER_FIXED_POINT_HPP
