#ifndef PARASURF_DYNAMICS_HAMILTONIAN_HPP
#define PARASURF_DYNAMICS_HAMILTONIAN_HPP

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "parasurf/error.hpp"
#include "parasurf/spectral/dyadic.hpp"
#include "parasurf/surface.hpp"

namespace parasurf {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

enum class BaseKind { One, Cos, Sin };

/// coeff * base(m, n)(x) * eta1^i * eta2^j with base in {1, cos, sin}(2 pi (m x + n y)).
struct HamiltonianTerm {
  double coeff = 0.0;
  BaseKind base = BaseKind::One;
  int m = 0, n = 0;
  int i = 0, j = 0;

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << coeff;
    if (base == BaseKind::Cos) os << "*cos_base(" << m << "," << n << ")";
    if (base == BaseKind::Sin) os << "*sin_base(" << m << "," << n << ")";
    if (i != 0 || j != 0) os << "*fiber_poly(" << i << "," << j << ")";
    return os.str();
  }
};

inline HamiltonianTerm fiber_poly(int i, int j, double coeff = 1.0) { return {coeff, BaseKind::One, 0, 0, i, j}; }
inline HamiltonianTerm cos_base(int m, int n, double coeff = 1.0) { return {coeff, BaseKind::Cos, m, n, 0, 0}; }
inline HamiltonianTerm sin_base(int m, int n, double coeff = 1.0) { return {coeff, BaseKind::Sin, m, n, 0, 0}; }
inline HamiltonianTerm operator*(HamiltonianTerm a, const HamiltonianTerm& b) {
  if (a.base != BaseKind::One && b.base != BaseKind::One)
    throw Error(ErrorCode::ConfigError, "a term may contain at most one base function");
  if (b.base != BaseKind::One) {
    a.base = b.base;
    a.m = b.m;
    a.n = b.n;
  }
  a.coeff *= b.coeff;
  a.i += b.i;
  a.j += b.j;
  return a;
}
inline HamiltonianTerm operator*(double c, HamiltonianTerm a) {
  a.coeff *= c;
  return a;
}

/// Value, gradient and Hessian in the variables (x, y, eta1, eta2).
struct Jet {
  double value = 0.0;
  Vec4 grad = Vec4::Zero();
  Mat4 hess = Mat4::Zero();
};

/// H(x, eta) = |eta|^2 / 2 + mask(x) * sum of terms. The mask is 1 on the torus
/// and vanishes within mask_radius of every cone point otherwise.
class Hamiltonian {
 public:
  Hamiltonian() = default;
  Hamiltonian(SurfacePtr surface, std::vector<HamiltonianTerm> terms, double mask_radius = 0.1,
              double mask_width = 0.2)
      : surface_(std::move(surface)), terms_(std::move(terms)), mask_radius_(mask_radius), mask_width_(mask_width) {}

  const std::vector<HamiltonianTerm>& terms() const { return terms_; }
  const SurfacePtr& surface() const { return surface_; }
  double mask_radius() const { return mask_radius_; }
  bool is_flat() const { return terms_.empty(); }
  bool masked() const { return surface_ && !surface_->cone_points().empty(); }

  Hamiltonian plus(const std::vector<HamiltonianTerm>& extra) const {
    Hamiltonian h = *this;
    h.terms_.insert(h.terms_.end(), extra.begin(), extra.end());
    return h;
  }
  Hamiltonian scaled_perturbation(double s) const {
    Hamiltonian h = *this;
    for (auto& t : h.terms_) t.coeff *= s;
    return h;
  }

  /// The point may use local coordinates outside [0,1]^2 on the torus (the
  /// base functions are periodic); on origamis it must be normalized.
  Jet jet(const SurfacePoint& p, double e1, double e2) const {
    Jet out;
    out.value = 0.5 * (e1 * e1 + e2 * e2);
    out.grad(2) = e1;
    out.grad(3) = e2;
    out.hess(2, 2) = 1.0;
    out.hess(3, 3) = 1.0;
    if (terms_.empty()) return out;
    Jet mask = mask_jet(p);
    if (mask.value == 0.0 && mask.grad.isZero() && mask.hess.isZero()) return out;
    Jet f = terms_jet(p.x, p.y, e1, e2);
    // product rule for mask(x) * f(x, eta)
    out.value += mask.value * f.value;
    out.grad += mask.value * f.grad + f.value * mask.grad;
    out.hess += mask.value * f.hess + f.value * mask.hess + mask.grad * f.grad.transpose() +
                f.grad * mask.grad.transpose();
    return out;
  }

  double value(const SurfacePoint& p, double e1, double e2) const { return jet(p, e1, e2).value; }

  /// X_H = (dH/deta1, dH/deta2, -X1 H, -X2 H)
  Vec4 vector_field(const SurfacePoint& p, double e1, double e2) const {
    const Vec4 g = jet(p, e1, e2).grad;
    return Vec4(g(2), g(3), -g(0), -g(1));
  }

  Jet mask_jet(const SurfacePoint& p) const {
    Jet out;
    out.value = 1.0;
    if (!masked()) return out;
    const double eps = 1e-12;
    for (Corner c : {Corner::BottomLeft, Corner::BottomRight, Corner::TopLeft, Corner::TopRight}) {
      if (!surface_->is_cone_corner(p.square, c)) continue;
      auto o = corner_offset(c);
      const double dx = p.x - o[0], dy = p.y - o[1];
      const double r = std::hypot(dx, dy);
      if (r < eps && mask_radius_ <= 0.0)
        throw Error(ErrorCode::EvaluationAtSingularity, "Hamiltonian evaluated at a cone point");
      Jet fac = radial_step(r, dx, dy);
      Jet prod;
      prod.value = out.value * fac.value;
      prod.grad = out.value * fac.grad + fac.value * out.grad;
      prod.hess = out.value * fac.hess + fac.value * out.hess + out.grad * fac.grad.transpose() +
                  fac.grad * out.grad.transpose();
      out = prod;
    }
    return out;
  }

 private:
  // smoothstep5((r - R) / W) as a function of the base point
  Jet radial_step(double r, double dx, double dy) const {
    Jet out;
    const double s = (r - mask_radius_) / mask_width_;
    if (s <= 0.0) {
      out.value = 0.0;
      return out;
    }
    if (s >= 1.0) {
      out.value = 1.0;
      return out;
    }
    out.value = dyadic::smoothstep5(s);
    const double d1 = 30.0 * s * s * (1.0 - s) * (1.0 - s) / mask_width_;
    const double d2 = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (mask_width_ * mask_width_);
    const Eigen::Vector2d rh(dx / r, dy / r);
    const Eigen::Matrix2d P = rh * rh.transpose();
    out.grad.head<2>() = d1 * rh;
    out.hess.topLeftCorner<2, 2>() = d2 * P + d1 * (Eigen::Matrix2d::Identity() - P) / r;
    return out;
  }

  static double ipow(double x, int k) {
    double r = 1.0;
    for (int q = 0; q < k; ++q) r *= x;
    return r;
  }

  Jet terms_jet(double x, double y, double e1, double e2) const {
    Jet out;
    const double tp = 2.0 * M_PI;
    for (const auto& t : terms_) {
      // base part b(x) with derivatives
      double b = 1.0;
      Eigen::Vector2d bg = Eigen::Vector2d::Zero();
      Eigen::Matrix2d bh = Eigen::Matrix2d::Zero();
      if (t.base != BaseKind::One) {
        const double ph = tp * (t.m * x + t.n * y);
        const double c = std::cos(ph), s = std::sin(ph);
        const Eigen::Vector2d k(tp * t.m, tp * t.n);
        if (t.base == BaseKind::Cos) {
          b = c;
          bg = -s * k;
          bh = -c * k * k.transpose();
        } else {
          b = s;
          bg = c * k;
          bh = -s * k * k.transpose();
        }
      }
      // fiber monomial
      const double p = ipow(e1, t.i) * ipow(e2, t.j);
      Eigen::Vector2d pg(t.i > 0 ? t.i * ipow(e1, t.i - 1) * ipow(e2, t.j) : 0.0,
                         t.j > 0 ? t.j * ipow(e1, t.i) * ipow(e2, t.j - 1) : 0.0);
      Eigen::Matrix2d ph2;
      ph2(0, 0) = t.i > 1 ? t.i * (t.i - 1) * ipow(e1, t.i - 2) * ipow(e2, t.j) : 0.0;
      ph2(1, 1) = t.j > 1 ? t.j * (t.j - 1) * ipow(e1, t.i) * ipow(e2, t.j - 2) : 0.0;
      ph2(0, 1) = ph2(1, 0) = (t.i > 0 && t.j > 0) ? t.i * t.j * ipow(e1, t.i - 1) * ipow(e2, t.j - 1) : 0.0;
      out.value += t.coeff * b * p;
      out.grad.head<2>() += t.coeff * p * bg;
      out.grad.tail<2>() += t.coeff * b * pg;
      out.hess.topLeftCorner<2, 2>() += t.coeff * p * bh;
      out.hess.bottomRightCorner<2, 2>() += t.coeff * b * ph2;
      const Eigen::Matrix2d cross = t.coeff * bg * pg.transpose();  // d^2 / dx deta
      out.hess.topRightCorner<2, 2>() += cross;
      out.hess.bottomLeftCorner<2, 2>() += cross.transpose();
    }
    return out;
  }

  SurfacePtr surface_;
  std::vector<HamiltonianTerm> terms_;
  double mask_radius_ = 0.1;
  double mask_width_ = 0.2;
};

namespace detail {

inline std::pair<int, int> parse_int_pair(const std::string& args, const std::string& what) {
  std::string a = args;
  for (char& ch : a)
    if (ch == ',') ch = ' ';
  std::istringstream in(a);
  int x, y;
  std::string extra;
  if (!(in >> x >> y) || (in >> extra)) throw Error(ErrorCode::ConfigError, "bad arguments in " + what);
  return {x, y};
}

inline HamiltonianTerm parse_factor(std::string f) {
  f = trim(f);
  auto open = f.find('(');
  if (open == std::string::npos) {
    try {
      std::size_t used = 0;
      double c = std::stod(f, &used);
      if (used != f.size()) throw std::invalid_argument(f);
      return HamiltonianTerm{c, BaseKind::One, 0, 0, 0, 0};
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "cannot read factor '" + f + "'");
    }
  }
  if (f.back() != ')') throw Error(ErrorCode::ConfigError, "unbalanced factor '" + f + "'");
  const std::string name = trim(f.substr(0, open));
  auto [a, b] = parse_int_pair(f.substr(open + 1, f.size() - open - 2), f);
  if (name == "cos_base") return cos_base(a, b);
  if (name == "sin_base") return sin_base(a, b);
  if (name == "fiber_poly") {
    if (a < 0 || b < 0) throw Error(ErrorCode::ConfigError, "fiber_poly exponents must be >= 0");
    return fiber_poly(a, b);
  }
  throw Error(ErrorCode::ConfigError, "unknown basis term '" + name + "'");
}

}  // namespace detail

/// Parses "1e-3*cos_base(1,-1)*fiber_poly(1,0); 2e-4*fiber_poly(0,1)".
inline std::vector<HamiltonianTerm> parse_terms(const std::string& text) {
  std::vector<HamiltonianTerm> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (detail::trim(item).empty()) continue;
    HamiltonianTerm t{1.0, BaseKind::One, 0, 0, 0, 0};
    std::string factor;
    std::stringstream fs(item);
    while (std::getline(fs, factor, '*')) t = t * detail::parse_factor(factor);
    out.push_back(t);
  }
  return out;
}

}  // namespace parasurf

#endif  // PARASURF_DYNAMICS_HAMILTONIAN_HPP
