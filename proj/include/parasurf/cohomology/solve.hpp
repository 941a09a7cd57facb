#ifndef PARASURF_COHOMOLOGY_SOLVE_HPP
#define PARASURF_COHOMOLOGY_SOLVE_HPP

#include <optional>

#include "parasurf/cohomology/distributions.hpp"

namespace parasurf {

struct CohomOptions {
  double s = 3.0;  // Sobolev order of the distributions
  double t = 1.0;  // order used when reporting solution norms
  int n_candidates = 0;  // origami: 0 means half of the basis
  double gap_threshold = -1.0;  // < 0: 1e-6 x largest singular value
  double min_gap_ratio = 10.0;
  double svd_cutoff = 1e-10;  // relative cutoff of the Galerkin pseudo-inverse
  bool counterterms = true;
  int vanishing_order = -1;  // >= 0: also vanish to this order at the cone points
  double s0 = 1.0;           // vanishing to order k needs s > s0 + k + 1
  double bump_radius = 0.2;
};

/// X_xi u + sum_i c_i chi_i = f with zero-average u. counterterms has one row
/// per counterterm field (distributions first, then vanishing functionals) and
/// one column per component of f.
struct CohomSolution {
  Field u;
  Mat counterterms;
  double residual = 0.0;
};

class CohomologySolver {
 public:
  CohomologySolver(DiscPtr disc, Direction d, CohomOptions opt = {})
      : disc_(std::move(disc)), dir_(d), opt_(opt) {
    dir_.validate();
    if (disc_->is_fourier()) {
      chi_.push_back(Vec::Ones(disc_->n_nodes()));
      n_dist_ = 1;
    } else {
      build_galerkin();
    }
    if (opt_.vanishing_order >= 0 && !disc_->surface().cone_points().empty()) build_vanishing();
  }

  const DiscPtr& disc() const { return disc_; }
  const Direction& direction() const { return dir_; }
  const CohomOptions& options() const { return opt_; }
  int n_distributions() const { return n_dist_; }
  /// Counterterm fields: duals of the distributions, then vanishing duals.
  const std::vector<Vec>& chi() const { return chi_; }
  const std::optional<DistributionBasis>& distributions() const { return dist_; }

  /// Counterterm values D_i(g) (the mean on the torus).
  Vec obstructions(const Vec& g) const {
    if (disc_->is_fourier()) return Vec::Constant(1, disc_->mean(g));
    return dist_->apply(*disc_, g);
  }

  CohomSolution solve(const Field& f) const {
    CohomSolution out;
    out.u = Field(f.disc(), f.rows(), f.cols());
    out.counterterms = Mat::Zero(static_cast<int>(chi_.size()), f.n_components());
    double res2 = 0.0;
    for (int q = 0; q < f.n_components(); ++q) {
      const Vec g = f.data().row(q).transpose();
      Vec c;
      Vec u = solve_vanishing(g, c);
      out.u.data().row(q) = u.transpose();
      out.counterterms.col(q) = c;
      Vec r = disc_->lie(u, dir_) - g;
      for (std::size_t i = 0; i < chi_.size(); ++i) r += c[i] * chi_[i];
      res2 += disc_->inner(r, r);
    }
    out.residual = std::sqrt(res2);
    return out;
  }

  /// Sum_i c_i chi_i for one component's counterterm column.
  Vec counterterm_field(const Vec& c) const {
    Vec out = Vec::Zero(disc_->n_nodes());
    for (std::size_t i = 0; i < chi_.size(); ++i) out += c[i] * chi_[i];
    return out;
  }

 private:
  // Base solve: counterterms for the distributions only.
  Vec solve_base(const Vec& g, Vec& c) const {
    if (disc_->is_fourier()) return solve_fourier(g, c);
    c = opt_.counterterms ? dist_->apply(*disc_, g) : Vec::Zero(n_dist_);
    const auto& b = disc_->basis();
    Vec coef = disc_->cell_area() * (b.fields.transpose() * g);
    for (int i = 0; i < n_dist_; ++i) coef.head(dist_->n_candidates) -= c[i] * dist_->chi.col(i);
    Vec uc = Vec::Zero(b.n_modes());
    uc.segment(1, pinv_.rows()) = pinv_ * coef;
    return b.fields * uc;
  }

  Vec solve_fourier(const Vec& g, Vec& c) const {
    const auto& grid = static_cast<const TorusGrid&>(*disc_);
    auto hat = grid.transform(g);
    const int N = grid.N();
    double gmax = 0.0;
    for (const auto& z : hat) gmax = std::max(gmax, std::abs(z));
    c = Vec::Constant(1, opt_.counterterms ? hat[0].real() : 0.0);
    hat[0] = 0.0;
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        const int kx = fft::wavenumber(i, N), ky = fft::wavenumber(j, N);
        auto& z = hat[j * N + i];
        if (kx == 0 && ky == 0) continue;
        if (kx == -N / 2 || ky == -N / 2) {
          z = 0.0;
          continue;
        }
        const double div = dir_.divisor(kx, ky);
        if (std::abs(div) < dir_.diophantine_floor) {
          if (std::abs(z) > 1e-13 * gmax && std::abs(z) > 0.0)
            throw Error(ErrorCode::SmallDivisor, "mode (" + std::to_string(kx) + "," + std::to_string(ky) +
                                                     ") has |m xi1 + n xi2| = " + std::to_string(std::abs(div)));
          z = 0.0;
          continue;
        }
        z /= fft::cplx(0.0, 2.0 * M_PI * div);
      }
    return grid.inverse(std::move(hat));
  }

  Vec solve_vanishing(const Vec& g, Vec& c) const {
    Vec cb;
    Vec u = solve_base(g, cb);
    c = Vec::Zero(static_cast<int>(chi_.size()));
    c.head(n_dist_) = cb;
    if (psi_u_.empty()) return u;
    Vec phi = functionals(u);
    Vec beta = phi_lu_.solve(phi);
    for (std::size_t p = 0; p < psi_u_.size(); ++p) {
      u -= beta[p] * psi_u_[p];
      c.head(n_dist_) -= beta[p] * psi_c_[p];
    }
    c.tail(psi_u_.size()) = beta;
    return u;
  }

  void build_galerkin() {
    const auto& b = disc_->basis();
    const int M = b.n_modes();
    const int n_cand = opt_.n_candidates > 0 ? opt_.n_candidates : std::max(1, M / 2);
    dist_ = invariant_distributions(*disc_, dir_, opt_.s, n_cand, opt_.gap_threshold, opt_.min_gap_ratio);
    n_dist_ = dist_->count();
    chi_ = dist_->chi_fields;
    // Unknowns exclude the constant and the top mode: a square truncation of
    // the skew operator would have a forced null vector whenever M - 1 is odd.
    Mat X = lie_galerkin(*disc_, dir_, M, M).middleCols(1, M - 2);
    Eigen::BDCSVD<Mat> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& sv = svd.singularValues();
    Vec inv = Vec::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > opt_.svd_cutoff * sv[0]) inv[i] = 1.0 / sv[i];
    pinv_ = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  }

  // Value (and first derivatives for k = 1) at each cone point, read as the
  // average over the cells touching the vertex.
  Vec functionals(const Vec& u) const {
    Vec out(static_cast<int>(cone_cells_.size()) * per_cone_);
    Vec ux, uy;
    if (per_cone_ > 1) {
      ux = disc_->dx(u);
      uy = disc_->dy(u);
    }
    for (std::size_t p = 0; p < cone_cells_.size(); ++p) {
      double v = 0, vx = 0, vy = 0;
      for (int cell : cone_cells_[p]) {
        v += u[cell];
        if (per_cone_ > 1) {
          vx += ux[cell];
          vy += uy[cell];
        }
      }
      const double n = static_cast<double>(cone_cells_[p].size());
      out[p * per_cone_] = v / n;
      if (per_cone_ > 1) {
        out[p * per_cone_ + 1] = vx / n;
        out[p * per_cone_ + 2] = vy / n;
      }
    }
    return out;
  }

  void build_vanishing() {
    const int k = opt_.vanishing_order;
    if (k > 1)
      throw Error(ErrorCode::InsufficientRegularity,
                  "cone-point derivatives are resolved only up to order 1, requested " + std::to_string(k));
    if (!(opt_.s > opt_.s0 + k + 1))
      throw Error(ErrorCode::InsufficientRegularity, "vanishing to order " + std::to_string(k) + " needs s > " +
                                                         std::to_string(opt_.s0 + k + 1));
    const auto* grid = dynamic_cast<const OrigamiGrid*>(disc_.get());
    const auto& S = disc_->surface();
    per_cone_ = k == 0 ? 1 : 3;
    for (const auto& cone : S.cone_points()) {
      std::vector<int> cells;
      for (auto [sq, corner] : S.corners_of_vertex(cone.vertex)) cells.push_back(grid->corner_cell(sq, corner));
      cone_cells_.push_back(cells);
      // bump times 1, x - c_x, y - c_y in the flat coordinates of the nearest corner
      for (int q = 0; q < per_cone_; ++q) {
        Vec bump = disc_->sample([&](const SurfacePoint& p) {
          double best = 1e9, rx = 0, ry = 0;
          for (Corner c : {Corner::BottomLeft, Corner::BottomRight, Corner::TopLeft, Corner::TopRight}) {
            if (S.vertex_of(p.square, c) != cone.vertex) continue;
            auto o = corner_offset(c);
            const double r = std::hypot(p.x - o[0], p.y - o[1]);
            if (r < best) {
              best = r;
              rx = p.x - o[0];
              ry = p.y - o[1];
            }
          }
          const double rad = opt_.bump_radius;
          const double w = 1.0 - dyadic::smoothstep5((best - 0.25 * rad) / (0.75 * rad));
          return q == 0 ? w : (q == 1 ? w * rx : w * ry);
        });
        Vec psi = disc_->lie(bump, dir_);
        Vec c;
        Vec u = solve_base(psi, c);
        chi_.push_back(psi);
        psi_u_.push_back(u);
        psi_c_.push_back(c);
      }
    }
    const int m = static_cast<int>(psi_u_.size());
    Mat Phi(m, m);
    for (int b = 0; b < m; ++b) Phi.col(b) = functionals(psi_u_[b]);
    phi_lu_ = Eigen::FullPivLU<Mat>(Phi);
    if (phi_lu_.rank() < m)
      throw Error(ErrorCode::InsufficientRegularity, "cone-point functionals are degenerate at this resolution");
  }

  DiscPtr disc_;
  Direction dir_;
  CohomOptions opt_;
  int n_dist_ = 0;
  std::vector<Vec> chi_;
  std::optional<DistributionBasis> dist_;
  Mat pinv_;
  // vanishing data
  int per_cone_ = 1;
  std::vector<std::vector<int>> cone_cells_;
  std::vector<Vec> psi_u_, psi_c_;
  Eigen::FullPivLU<Mat> phi_lu_;
};

inline CohomSolution solve_ce(const DiscPtr& disc, const Direction& d, const Field& f, CohomOptions opt = {}) {
  return CohomologySolver(disc, d, opt).solve(f);
}

/// Solve whose solution also vanishes to order k at the cone points.
inline CohomSolution solve_ce_vanishing(const DiscPtr& disc, const Direction& d, const Field& f, int k,
                                        CohomOptions opt = {}) {
  opt.vanishing_order = k;
  return CohomologySolver(disc, d, opt).solve(f);
}

/// max over samples of |v|_{H^t} / |X_xi v|_{H^s}; samples must have zero mean.
inline double apriori_probe(const Direction& d, double s, double t, const std::vector<Field>& samples) {
  double best = 0.0;
  for (const auto& v : samples) {
    const double scale = std::max(v.sup(), 1e-300);
    if (v.mean().cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw Error(ErrorCode::PreconditionViolated, "a priori probe needs zero-average samples");
    const double den = sobolev_norm(v.lie(d), s);
    if (den > 0) best = std::max(best, sobolev_norm(v, t) / den);
  }
  return best;
}

}  // namespace parasurf

#endif  // PARASURF_COHOMOLOGY_SOLVE_HPP
