#ifndef PARASURF_SPECTRAL_PARAPRODUCT_HPP
#define PARASURF_SPECTRAL_PARAPRODUCT_HPP

#include <functional>
#include <vector>

#include "parasurf/spectral/dyadic.hpp"
#include "parasurf/spectral/norms.hpp"

namespace parasurf {

/// How the two lowest blocks of f are treated. Dropped is the textbook Bony
/// product sum_{j>=2} S_{j-2}a Delta_j f. Completed adds <a>(Delta_0 + Delta_1) f,
/// so constant symbols act as plain multiplication.
enum class LowFrequency { Dropped, Completed };

/// T_a for a fixed (matrix) symbol; the low-passed symbols are cached.
class Paraproduct {
 public:
  explicit Paraproduct(Field a, LowFrequency lf = LowFrequency::Dropped) : a_(std::move(a)), lf_(lf) {
    J_ = a_.disc()->dyadic_J();
    std::vector<Multiplier> gs;
    for (int j = 0; j <= J_ - 1; ++j) gs.push_back(dyadic::lowpass(j));
    for (int j = 0; j <= J_ - 1; ++j) low_.emplace_back(a_.disc(), a_.rows(), a_.cols());
    for (int q = 0; q < a_.n_components(); ++q) {
      auto parts = a_.disc()->multipliers(a_.data().row(q).transpose(), gs);
      for (int j = 0; j <= J_ - 1; ++j) low_[j].data().row(q) = parts[j].transpose();
    }
    mean_ = a_.mean();
  }

  const Field& symbol() const { return a_; }
  const Mat& mean() const { return mean_; }
  LowFrequency convention() const { return lf_; }

  Field apply(const Field& f) const {
    if (a_.cols() != f.rows() && !(a_.rows() == 1 && a_.cols() == 1))
      throw Error(ErrorCode::ShapeMismatch, "paraproduct symbol " + a_.shape_str() + " on field " + f.shape_str());
    auto d = dyadic::decompose(f);
    Field out = matmul(low_[0], d.blocks[2]);
    for (int j = 3; j <= J_ + 1; ++j) out += matmul(low_[j - 2], d.blocks[j]);
    if (lf_ == LowFrequency::Completed) out += matmul(Field::constant(f.disc(), mean_), d.blocks[0] + d.blocks[1]);
    return out.dealias();
  }

  Field operator()(const Field& f) const { return apply(f); }

 private:
  Field a_;
  LowFrequency lf_;
  int J_ = 0;
  std::vector<Field> low_;  // S_j a, j = 0..J-1
  Mat mean_;
};

inline Field paraproduct(const Field& a, const Field& f, LowFrequency lf = LowFrequency::Dropped) {
  return Paraproduct(a, lf).apply(f);
}

struct InverseResult {
  Field v;
  int terms = 0;
  double residual = 0.0;
};

/// Solves T_a v = g by the Neumann series v += <a>^{-1} (g - T_a v).
/// Under the Dropped convention T_a annihilates the two lowest blocks, so the
/// equation is posed on the range of I - S_1 only: target, residual and
/// correction are all projected onto the frequencies where S_1 vanishes.
inline InverseResult paraproduct_inverse(const Paraproduct& T, const Field& g, double tol = 1e-12,
                                         int max_terms = 60) {
  const Mat& abar = T.mean();
  if (abar.rows() != abar.cols()) throw Error(ErrorCode::ShapeMismatch, "paraproduct inverse needs a square symbol");
  Eigen::JacobiSVD<Mat> svd(abar);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > 1e-12 * std::max(1.0, smax)))
    throw Error(ErrorCode::NoConvergence, "mean symbol is not invertible");
  const Mat abar_inv = abar.inverse();
  const bool completed = T.convention() == LowFrequency::Completed;
  auto project = [&](const Field& r) { return completed ? r : dyadic::high_part(r); };

  InverseResult res;
  res.v = Field(g.disc(), g.rows(), g.cols());
  const Field target = project(g);
  Field r = target;
  double rn = r.l2();
  const double r0 = std::max(rn, 1e-300);
  double prev = rn;
  int growth = 0;
  while (rn > tol) {
    if (res.terms >= max_terms)
      throw Error(ErrorCode::NoConvergence, "paraproduct inverse: residual " + std::to_string(rn) + " after " +
                                                std::to_string(max_terms) + " terms");
    res.v += matmul(abar_inv, r);
    ++res.terms;
    r = target - project(T.apply(res.v));
    rn = r.l2();
    growth = rn > prev ? growth + 1 : 0;
    if (growth >= 2 || rn > 1e3 * r0 || !std::isfinite(rn))
      throw Error(ErrorCode::NoConvergence, "paraproduct inverse: Neumann series is not contracting");
    prev = rn;
  }
  res.residual = rn;
  return res;
}

inline InverseResult paraproduct_inverse(const Field& a, const Field& g, double tol = 1e-12, int max_terms = 60,
                                         LowFrequency lf = LowFrequency::Dropped) {
  return paraproduct_inverse(Paraproduct(a, lf), g, tol, max_terms);
}

/// (T_{ab} - T_a T_b) f
inline Field composition_remainder(const Field& a, const Field& b, const Field& f,
                                   LowFrequency lf = LowFrequency::Dropped) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::ShapeMismatch, "composition " + a.shape_str() + " * " + b.shape_str());
  Field ab = matmul(a, b).dealias();
  return paraproduct(ab, f, lf) - paraproduct(a, paraproduct(b, f, lf), lf);
}

/// max over probes of |T_a f|_{H^s} / (|a|_inf |f|_{H^s})
inline double paraproduct_constant(const Field& a, const std::vector<Field>& probes, double s,
                                   LowFrequency lf = LowFrequency::Dropped) {
  Paraproduct T(a, lf);
  double best = 0.0;
  for (const auto& f : probes) {
    const double den = a.sup() * friedrichs_norm(f, s);
    if (den > 0) best = std::max(best, friedrichs_norm(T.apply(f), s) / den);
  }
  return best;
}

/// Pointwise nonlinearity F(x, u) with u in R^in and values in R^out.
struct LocalNonlinearity {
  int in_dim = 1;
  int out_dim = 1;
  std::function<Vec(const SurfacePoint&, const Vec&)> value;
  std::function<Mat(const SurfacePoint&, const Vec&)> jacobian;
};

struct ParaLinearization {
  Field symbol;     // dF/du (x, u(x)), out x in
  Field remainder;  // F(x,u) - F(x,0) - T_symbol u
};

inline ParaLinearization para_linearize(const LocalNonlinearity& F, const Field& u,
                                        LowFrequency lf = LowFrequency::Dropped) {
  if (u.rows() != F.in_dim || u.cols() != 1) throw Error(ErrorCode::ShapeMismatch, "para_linearize input shape");
  const auto& disc = u.disc();
  Field symbol(disc, F.out_dim, F.in_dim), fu(disc, F.out_dim, 1), f0(disc, F.out_dim, 1);
  const Vec zero = Vec::Zero(F.in_dim);
  for (int k = 0; k < u.n_nodes(); ++k) {
    const auto p = disc->node_point(k);
    const Vec uk = u.at(k);
    symbol.set_at(k, F.jacobian(p, uk));
    fu.set_at(k, F.value(p, uk));
    f0.set_at(k, F.value(p, zero));
  }
  ParaLinearization out;
  out.remainder = fu - f0 - paraproduct(symbol, u, lf);
  out.symbol = std::move(symbol);
  return out;
}

}  // namespace parasurf

#endif  // PARASURF_SPECTRAL_PARAPRODUCT_HPP
