#ifndef PARASURF_SPECTRAL_DISCRETIZATION_HPP
#define PARASURF_SPECTRAL_DISCRETIZATION_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "parasurf/error.hpp"
#include "parasurf/surface.hpp"

namespace parasurf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Eigenpairs of the (discrete) Friedrichs Laplacian. Eigenfields are the
/// columns of `fields`, orthonormal in the area-weighted L2 product.
struct SpectralBasis {
  Vec eigenvalues;
  Mat fields;  // n_nodes x n_modes
  int n_modes() const { return static_cast<int>(eigenvalues.size()); }
};

using Multiplier = std::function<double(double)>;

/// Per-square N x N cell-centred grid on a translation surface. Node (s, i, j)
/// sits at ((i + 1/2)/N, (j + 1/2)/N) in square s and has index s N^2 + j N + i.
class Discretization {
 public:
  Discretization(SurfacePtr surface, int N) : surface_(std::move(surface)), N_(N) {
    if (N < 4 || (N & (N - 1)) != 0)
      throw Error(ErrorCode::ConfigError, "resolution N must be a power of 2, got " + std::to_string(N));
  }
  virtual ~Discretization() = default;

  const TranslationSurface& surface() const { return *surface_; }
  const SurfacePtr& surface_ptr() const { return surface_; }
  int N() const { return N_; }
  int n_nodes() const { return surface_->n_squares() * N_ * N_; }
  double h() const { return 1.0 / N_; }
  double cell_area() const { return h() * h(); }
  /// Index of the top dyadic block below the tail: J = log2(N) - 1.
  int dyadic_J() const { return static_cast<int>(std::lround(std::log2(N_))) - 1; }

  int node(int square, int i, int j) const { return (square * N_ + j) * N_ + i; }
  SurfacePoint node_point(int node) const {
    const int s = node / (N_ * N_);
    const int r = node % (N_ * N_);
    return SurfacePoint{s, (r % N_ + 0.5) / N_, (r / N_ + 0.5) / N_};
  }

  double inner(const Vec& a, const Vec& b) const { return cell_area() * a.dot(b); }
  double mean(const Vec& f) const { return f.sum() / n_nodes(); }

  virtual bool is_fourier() const = 0;
  virtual Vec dx(const Vec& f) const = 0;
  virtual Vec dy(const Vec& f) const = 0;
  Vec lie(const Vec& f, const Direction& d) const { return d.xi1 * dx(f) + d.xi2 * dy(f); }

  /// Applies radial multipliers g(freq) to f, freq = |k| on the torus and
  /// sqrt(lambda)/(2 pi) on origamis (infinity for the part outside the basis).
  virtual std::vector<Vec> multipliers(const Vec& f, const std::vector<Multiplier>& gs) const = 0;
  Vec multiplier(const Vec& f, const Multiplier& g) const { return multipliers(f, {g}).front(); }

  /// 2/3-rule truncation applied after pointwise products.
  virtual Vec dealias(const Vec& f) const = 0;
  /// sum_n (1 + lambda_n)^s |<f, e_n>|^2
  virtual double friedrichs_norm_sq(const Vec& f, double s) const = 0;
  /// Continuous interpolant of nodal data, evaluable anywhere on the surface.
  virtual std::function<double(const SurfacePoint&)> interpolant(const Vec& f) const = 0;
  virtual const SpectralBasis& basis() const = 0;
  virtual bool has_basis() const = 0;

  Vec sample(const std::function<double(const SurfacePoint&)>& fn) const {
    Vec out(n_nodes());
    for (int k = 0; k < n_nodes(); ++k) out[k] = fn(node_point(k));
    return out;
  }

 protected:
  SurfacePtr surface_;
  int N_;
};

using DiscPtr = std::shared_ptr<const Discretization>;

}  // namespace parasurf

#endif  // PARASURF_SPECTRAL_DISCRETIZATION_HPP
