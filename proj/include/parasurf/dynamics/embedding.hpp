#ifndef PARASURF_DYNAMICS_EMBEDDING_HPP
#define PARASURF_DYNAMICS_EMBEDDING_HPP

#include "parasurf/dynamics/hamiltonian.hpp"
#include "parasurf/spectral/field.hpp"

namespace parasurf {

/// u(x) = (x + w1(x), xi + w2(x)), stored as the 4x1 displacement w = (w1, w2).
/// w1 is a flat displacement in translation coordinates.
struct Embedding {
  Field w;
  Direction xi;

  static Embedding trivial(const DiscPtr& disc, const Direction& d) { return {Field(disc, 4, 1), d}; }

  const DiscPtr& disc() const { return w.disc(); }
  Field w1() const { return w.block(0, 0, 2, 1); }
  Field w2() const { return w.block(2, 0, 2, 1); }

  /// Du in the (X1, X2) frame, 4x2.
  Field Du() const {
    Field D = Field::hstack(w.dx(), w.dy());
    for (int r = 0; r < 2; ++r) D.data().row(r * 2 + r).array() += 1.0;
    return D;
  }

  Embedding displaced(const Field& dw, double h = 1.0) const { return {w + h * dw, xi}; }

  /// Base point of u at a grid node.
  SurfacePoint base_point(int node) const {
    SurfacePoint p = disc()->node_point(node);
    const double dx = w.data()(0, node), dy = w.data()(1, node);
    if (disc()->surface().is_torus()) {
      // periodic Hamiltonian terms, no need to wrap
      p.x += dx;
      p.y += dy;
      return p;
    }
    return flat_displace(disc()->surface(), p, dx, dy);
  }

  /// max over nodes of |w1| / dist(x, cone points); must stay below 1.
  double displacement_ratio() const {
    const auto& surf = disc()->surface();
    if (surf.cone_points().empty()) return 0.0;
    double worst = 0.0;
    for (int k = 0; k < w.n_nodes(); ++k) {
      const double r = std::hypot(w.data()(0, k), w.data()(1, k));
      worst = std::max(worst, r / surf.distance_to_cone_points(disc()->node_point(k)));
    }
    return worst;
  }

  void check() const {
    if (w.rows() != 4 || w.cols() != 1) throw Error(ErrorCode::ShapeMismatch, "embedding must be 4x1, got " + w.shape_str());
    if (!w.data().allFinite()) throw Error(ErrorCode::PreconditionViolated, "embedding has non-finite values");
    if (displacement_ratio() >= 1.0)
      throw Error(ErrorCode::PreconditionViolated, "base displacement exceeds the distance to the cone points");
  }
};

/// Jets of H along u: gradient (4x1) and Hessian (4x4) at every node.
struct JetField {
  Field value, grad, hess;
};

inline JetField hamiltonian_jets(const Hamiltonian& H, const Embedding& u) {
  const auto& disc = u.disc();
  JetField out{Field(disc, 1, 1), Field(disc, 4, 1), Field(disc, 4, 4)};
  for (int k = 0; k < u.w.n_nodes(); ++k) {
    const SurfacePoint p = u.base_point(k);
    const Jet j = H.jet(p, u.xi.xi1 + u.w.data()(2, k), u.xi.xi2 + u.w.data()(3, k));
    out.value.data()(0, k) = j.value;
    for (int r = 0; r < 4; ++r) {
      out.grad.data()(r, k) = j.grad(r);
      for (int c = 0; c < 4; ++c) out.hess.data()(r * 4 + c, k) = j.hess(r, c);
    }
  }
  return out;
}

/// X_H at a point (x, eta) in the (X1, X2, d_eta1, d_eta2) frame.
inline Vec4 hamiltonian_field(const Hamiltonian& H, const SurfacePoint& p, double e1, double e2) {
  return H.vector_field(p, e1, e2);
}

/// F(H, u) = X_H(u) - X_xi u.
inline Field invariance_residual(const Hamiltonian& H, const Embedding& u) {
  const JetField J = hamiltonian_jets(H, u);
  const Field Xw = u.w.lie(u.xi);
  Field F(u.disc(), 4, 1);
  auto& g = J.grad.data();
  F.data().row(0) = g.row(2).array() - u.xi.xi1;
  F.data().row(1) = g.row(3).array() - u.xi.xi2;
  F.data().row(2) = -g.row(0);
  F.data().row(3) = -g.row(1);
  F -= Xw;
  return F;
}

}  // namespace parasurf

#endif  // PARASURF_DYNAMICS_EMBEDDING_HPP
