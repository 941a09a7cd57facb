#ifndef PARASURF_SOLVER_OBSTRUCTION_HPP
#define PARASURF_SOLVER_OBSTRUCTION_HPP

#include "parasurf/solver/fixed_point.hpp"

namespace parasurf {

/// P[u(H)] flattened: one block of 4 reals per counterterm field.
inline Vec flatten_obstruction(const Mat& P) {
  Vec out(P.size());
  for (int i = 0; i < P.rows(); ++i)
    for (int q = 0; q < 4; ++q) out(4 * i + q) = P(i, q);
  return out;
}

inline Vec obstruction_map(const Hamiltonian& H, const SolverContext& ctx, const SolverOptions& opt = {}) {
  return flatten_obstruction(fixed_point_solve(H, ctx, opt).P);
}

inline Vec obstruction_map(const Hamiltonian& H, const DiscPtr& disc, const Direction& d,
                           const SolverOptions& opt = {}) {
  return obstruction_map(H, SolverContext::make(disc, d, opt), opt);
}

/// Correction terms used when none are given: shifts of the fiber momentum.
inline std::vector<HamiltonianTerm> default_correction_directions() { return {fiber_poly(1, 0), fiber_poly(0, 1)}; }

struct Correction {
  Hamiltonian H;
  Vec d;              // coefficients of the directions
  Mat jacobian;       // dP/dd at the start
  SolveResult solve;  // fixed-point solve at the corrected Hamiltonian
  int newton_steps = 0;
};

/// Gauss-Newton on the coefficients of H + sum_i d_i h_i until |P| <= obstruction_tol.
/// The Jacobian is a central finite difference at d = 0 and is kept fixed.
inline Correction correct_hamiltonian(const Hamiltonian& H, const SolverContext& ctx,
                                      std::vector<HamiltonianTerm> directions = {}, const SolverOptions& opt = {},
                                      double fd_step = 1e-6, int max_steps = 20) {
  if (directions.empty()) directions = default_correction_directions();
  const int m = static_cast<int>(directions.size());
  auto corrected = [&](const Vec& d) {
    std::vector<HamiltonianTerm> extra;
    for (int i = 0; i < m; ++i) extra.push_back(d(i) * directions[i]);
    return H.plus(extra);
  };
  Correction out;
  out.d = Vec::Zero(m);
  out.solve = fixed_point_solve(H, ctx, opt);
  Vec P = flatten_obstruction(out.solve.P);
  out.jacobian = Mat::Zero(P.size(), m);
  for (int i = 0; i < m; ++i) {
    Vec e = Vec::Zero(m);
    e(i) = fd_step;
    out.jacobian.col(i) = (obstruction_map(corrected(e), ctx, opt) - obstruction_map(corrected(-e), ctx, opt)) /
                          (2.0 * fd_step);
  }
  Eigen::JacobiSVD<Mat> svd(out.jacobian, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) < 1e-6)
    throw Error(ErrorCode::RankDeficient, "correction directions do not span the obstruction: smallest singular value " +
                                              std::to_string(sv.size() ? sv(sv.size() - 1) : 0.0));
  out.H = H;
  while (P.cwiseAbs().maxCoeff() > opt.obstruction_tol) {
    if (out.newton_steps >= max_steps)
      throw Error(ErrorCode::NoConvergence,
                  "Hamiltonian correction: |P| = " + std::to_string(P.cwiseAbs().maxCoeff()) + " after " +
                      std::to_string(max_steps) + " steps");
    out.d -= svd.solve(P);
    ++out.newton_steps;
    out.H = corrected(out.d);
    out.solve = fixed_point_solve(out.H, ctx, opt);
    P = flatten_obstruction(out.solve.P);
  }
  return out;
}

}  // namespace parasurf

#endif  // PARASURF_SOLVER_OBSTRUCTION_HPP
