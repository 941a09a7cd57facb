#ifndef PARASURF_COHOMOLOGY_DISTRIBUTIONS_HPP
#define PARASURF_COHOMOLOGY_DISTRIBUTIONS_HPP

#include <algorithm>
#include <limits>
#include <numeric>

#include "parasurf/spectral.hpp"

namespace parasurf {

/// Galerkin matrix X_ij = <e_i, X_xi e_j> of the Lie derivative, i < rows, j < cols.
inline Mat lie_galerkin(const Discretization& disc, const Direction& d, int rows, int cols) {
  const auto& b = disc.basis();
  Mat XE(disc.n_nodes(), cols);
  for (int j = 0; j < cols; ++j) XE.col(j) = disc.lie(b.fields.col(j), d);
  return disc.cell_area() * (b.fields.leftCols(rows).transpose() * XE);
}

/// Numerically invariant distributions: near-null left singular vectors of
/// W = Lambda^{s/2} X Lambda^{-(s+1)/2}, with the distribution space spanned by
/// the first n_candidates eigenfields and test fields by the whole basis.
struct DistributionBasis {
  double s = 0.0;
  double threshold = 0.0;
  double gap_ratio = std::numeric_limits<double>::infinity();
  Vec spectrum;          // all singular values, ascending
  Vec singular_values;   // the kept ones
  Mat D;                 // n_candidates x h: D_i(f) = D.col(i) . <f, e_n>
  Mat chi;               // n_candidates x h: eigen-coefficients of the dual fields
  std::vector<Vec> chi_fields;
  int n_candidates = 0;

  int count() const { return static_cast<int>(D.cols()); }

  Vec coefficients(const Discretization& disc, const Vec& f) const {
    return disc.cell_area() * (disc.basis().fields.leftCols(n_candidates).transpose() * f);
  }
  /// D_i(f) for all i.
  Vec apply(const Discretization& disc, const Vec& f) const { return D.transpose() * coefficients(disc, f); }
};

inline DistributionBasis invariant_distributions(const Discretization& disc, const Direction& d, double s,
                                                 int n_candidates, double gap_threshold = -1.0,
                                                 double min_gap_ratio = 10.0) {
  const auto& b = disc.basis();
  const int M = b.n_modes();
  if (n_candidates < 1 || n_candidates > M)
    throw Error(ErrorCode::ConfigError, "n_candidates must lie in [1, " + std::to_string(M) + "]");
  // With as many test fields as candidates the truncated skew operator can
  // have spurious null vectors, so test against a strictly larger space.
  const int n_test = M;
  Mat X = lie_galerkin(disc, d, n_candidates, n_test);
  Vec lam = (1.0 + b.eigenvalues.array()).matrix();
  Mat W = X;
  for (int i = 0; i < n_candidates; ++i) W.row(i) *= std::pow(lam[i], s / 2.0);
  for (int j = 0; j < n_test; ++j) W.col(j) *= std::pow(lam[j], -(s + 1.0) / 2.0);

  Eigen::BDCSVD<Mat> svd(W, Eigen::ComputeFullU);
  Vec sv = Vec::Zero(n_candidates);
  sv.head(svd.singularValues().size()) = svd.singularValues();
  Mat U = svd.matrixU();
  // order ascending
  std::vector<int> order(n_candidates);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int c) { return sv[a] < sv[c]; });

  DistributionBasis out;
  out.s = s;
  out.n_candidates = n_candidates;
  out.spectrum.resize(n_candidates);
  for (int i = 0; i < n_candidates; ++i) out.spectrum[i] = sv[order[i]];
  const double smax = out.spectrum.maxCoeff();
  out.threshold = gap_threshold < 0 ? 1e-6 * smax : gap_threshold;

  std::vector<int> kept;
  for (int i = 0; i < n_candidates; ++i)
    if (out.spectrum[i] < out.threshold) kept.push_back(order[i]);
  const int h = static_cast<int>(kept.size());
  out.D.resize(n_candidates, h);
  out.chi.resize(n_candidates, h);
  out.singular_values.resize(h);
  for (int q = 0; q < h; ++q) {
    Vec dq = U.col(kept[q]);
    // sign convention: largest entry positive
    Eigen::Index arg;
    dq.cwiseAbs().maxCoeff(&arg);
    if (dq[arg] < 0) dq = -dq;
    out.singular_values[q] = sv[kept[q]];
    for (int i = 0; i < n_candidates; ++i) {
      out.D(i, q) = std::pow(lam[i], s / 2.0) * dq[i];
      out.chi(i, q) = std::pow(lam[i], -s / 2.0) * dq[i];
    }
    out.chi_fields.push_back(b.fields.leftCols(n_candidates) * out.chi.col(q));
  }
  if (h > 0 && h < n_candidates) {
    const double largest_kept = out.spectrum[h - 1];
    out.gap_ratio = largest_kept > 0 ? out.spectrum[h] / largest_kept : std::numeric_limits<double>::infinity();
    if (out.gap_ratio < min_gap_ratio) {
      std::string raw;
      for (int i = 0; i < std::min(n_candidates, h + 4); ++i) raw += " " + std::to_string(out.spectrum[i]);
      throw Error(ErrorCode::NoSpectralGap, "kept/rejected singular value ratio " + std::to_string(out.gap_ratio) +
                                                " below " + std::to_string(min_gap_ratio) + "; spectrum:" + raw);
    }
  }
  return out;
}

}  // namespace parasurf

#endif  // PARASURF_COHOMOLOGY_DISTRIBUTIONS_HPP
