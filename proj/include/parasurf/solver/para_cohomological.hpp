#ifndef PARASURF_SOLVER_PARA_COHOMOLOGICAL_HPP
#define PARASURF_SOLVER_PARA_COHOMOLOGICAL_HPP

#include <memory>

#include "parasurf/cohomology.hpp"
#include "parasurf/dynamics.hpp"
#include "parasurf/spectral.hpp"

namespace parasurf {

/// Cohomological solver shared by every iteration of a solve.
inline std::shared_ptr<const CohomologySolver> make_ce_solver(const DiscPtr& disc, const Direction& d,
                                                              CohomOptions opt = {}) {
  if (!disc->surface().cone_points().empty() && opt.vanishing_order < 0) opt.vanishing_order = 0;
  return std::make_shared<const CohomologySolver>(disc, d, opt);
}

/// sup over nodes of the max-row-sum norm of <M>^{-1} M - I.
inline double regime_deviation(const Field& M) {
  const Mat inv = M.mean().inverse();
  double worst = 0.0;
  for (int k = 0; k < M.n_nodes(); ++k) {
    const Mat D = inv * M.at(k) - identity(static_cast<int>(M.rows()));
    worst = std::max(worst, D.cwiseAbs().rowwise().sum().maxCoeff());
  }
  return worst;
}

struct ParaCohomSolution {
  Field v;   // 4x1
  Mat c;     // counterterm fields x 4 components
  double residual = 0.0;
  int inverse_terms = 0;
};

/// T_M [ (T_Z - X_xi) v^ + sum_i c_i chi_i ] = f with v^ = T_{M^{-1}} v,
/// Z = [[0, S], [0, 0]]. All para-products use the completed convention.
class ParaCohomSystem {
 public:
  ParaCohomSystem(const LinAlgebra& la, Direction d, std::shared_ptr<const CohomologySolver> ce,
                  double regime_bound = 0.5)
      : Tm(la.M, LowFrequency::Completed),
        Tm_inv(la.M_inv, LowFrequency::Completed),
        Ts(la.S, LowFrequency::Completed),
        dir_(d),
        ce_(std::move(ce)) {
    const double dev = regime_deviation(la.M);
    if (dev > regime_bound)
      throw Error(ErrorCode::ContractionRegimeViolated,
                  "sup |<M>^-1 M - I| = " + std::to_string(dev) + " exceeds " + std::to_string(regime_bound));
  }

  Paraproduct Tm, Tm_inv, Ts;

  const CohomologySolver& ce() const { return *ce_; }
  const Direction& direction() const { return dir_; }

  /// (T_Z - X_xi) applied to v^
  Field inner(const Field& vh) const {
    Field out = -vh.lie(dir_);
    Field top = out.block(0, 0, 2, 1) + Ts.apply(vh.block(2, 0, 2, 1));
    out.set_block(0, 0, top);
    return out;
  }

  /// K v = T_M (T_Z - X_xi) T_{M^{-1}} v
  Field apply_K(const Field& v) const { return Tm.apply(inner(Tm_inv.apply(v))); }

  /// sum_i c_i chi_i as a 4x1 field, c is (fields x 4).
  Field counterterm_field(const Mat& c) const {
    Field out(Tm.symbol().disc(), 4, 1);
    for (int q = 0; q < 4; ++q) out.set_comp(q, 0, ce_->counterterm_field(c.col(q)));
    return out;
  }

  Field lhs(const Field& v, const Mat& c) const { return Tm.apply(inner(Tm_inv.apply(v)) + counterterm_field(c)); }

  ParaCohomSolution solve(const Field& f) const {
    if (f.rows() != 4 || f.cols() != 1) throw Error(ErrorCode::ShapeMismatch, "rhs must be 4x1");
    if (!f.data().allFinite()) throw Error(ErrorCode::PreconditionViolated, "rhs is not finite");
    ParaCohomSolution out;
    const int nf = static_cast<int>(ce_->chi().size());
    out.c = Mat::Zero(nf, 4);
    const double scale = f.l2();
    if (scale == 0.0) {
      out.v = Field(f.disc(), 4, 1);
      return out;
    }
    const double tol = 1e-13 * scale;
    auto fh = paraproduct_inverse(Tm, f, tol);
    // second block: -X v2 + c2 chi = fh2
    auto s2 = ce_->solve(fh.v.block(2, 0, 2, 1));
    Field v2 = -s2.u;
    // first block: T_S v2 - X v1 + c1 chi = fh1
    auto s1 = ce_->solve(fh.v.block(0, 0, 2, 1) - Ts.apply(v2));
    Field v1 = -s1.u;
    out.c.leftCols(2) = s1.counterterms;
    out.c.rightCols(2) = s2.counterterms;
    auto vv = paraproduct_inverse(Tm_inv, Field::vstack(v1, v2), tol);
    out.v = vv.v;
    out.inverse_terms = fh.terms + vv.terms;
    out.residual = (lhs(out.v, out.c) - f).l2();
    return out;
  }

 private:
  Direction dir_;
  std::shared_ptr<const CohomologySolver> ce_;
};

inline ParaCohomSolution solve_para_cohomological(const Hamiltonian& H, const Embedding& u, const Field& f,
                                                  std::shared_ptr<const CohomologySolver> ce = nullptr) {
  if (!ce) ce = make_ce_solver(u.disc(), u.xi);
  return ParaCohomSystem(linearization(H, u), u.xi, std::move(ce)).solve(f);
}

}  // namespace parasurf

#endif  // PARASURF_SOLVER_PARA_COHOMOLOGICAL_HPP
