#ifndef PARASURF_SPECTRAL_ORIGAMI_GRID_HPP
#define PARASURF_SPECTRAL_ORIGAMI_GRID_HPP

#include <array>

#include <lapacke.h>

#include "parasurf/spectral/discretization.hpp"

namespace parasurf {

/// Finite-difference discretization of a square-tiled surface. Neighbour
/// lookups follow the gluing permutations, so the 5-point Laplacian is
/// symmetric and its eigenvectors give a discrete Friedrichs basis.
class OrigamiGrid final : public Discretization {
 public:
  enum Dir { PlusX = 0, MinusX = 1, PlusY = 2, MinusY = 3 };

  static constexpr int kMaxDenseNodes = 8192;

  OrigamiGrid(SurfacePtr surface, int N, int n_modes = 0) : Discretization(std::move(surface), N) {
    build_neighbors();
    if (n_modes > 0) build_basis(n_modes);
  }

  bool is_fourier() const override { return false; }

  int neighbor(int node, Dir d) const { return nbr_[d][node]; }
  /// Pure horizontal then vertical shift by (di, dj) cells.
  int shift(int node, int di, int dj) const {
    for (; di > 0; --di) node = nbr_[PlusX][node];
    for (; di < 0; ++di) node = nbr_[MinusX][node];
    for (; dj > 0; --dj) node = nbr_[PlusY][node];
    for (; dj < 0; ++dj) node = nbr_[MinusY][node];
    return node;
  }

  /// The cell of `square` touching the given corner.
  int corner_cell(int square, Corner c) const {
    const int i = (c == Corner::BottomRight || c == Corner::TopRight) ? N_ - 1 : 0;
    const int j = (c == Corner::TopLeft || c == Corner::TopRight) ? N_ - 1 : 0;
    return node(square, i, j);
  }

  // Fourth-order central differences.
  Vec dx(const Vec& f) const override { return central(f, PlusX, MinusX); }
  Vec dy(const Vec& f) const override { return central(f, PlusY, MinusY); }

  /// -Laplacian applied with the 5-point stencil.
  Vec neg_laplacian(const Vec& f) const {
    Vec out(f.size());
    const double inv_h2 = double(N_) * N_;
    for (int k = 0; k < n_nodes(); ++k)
      out[k] = inv_h2 * (4.0 * f[k] - f[nbr_[0][k]] - f[nbr_[1][k]] - f[nbr_[2][k]] - f[nbr_[3][k]]);
    return out;
  }

  std::vector<Vec> multipliers(const Vec& f, const std::vector<Multiplier>& gs) const override {
    const auto& b = basis();
    Vec c = cell_area() * (b.fields.transpose() * f);
    Vec rest = f - b.fields * c;
    std::vector<Vec> out;
    out.reserve(gs.size());
    for (const auto& g : gs) {
      Vec gc(c.size());
      for (int n = 0; n < c.size(); ++n) gc[n] = g(std::sqrt(std::max(0.0, b.eigenvalues[n])) / (2.0 * M_PI)) * c[n];
      out.push_back(b.fields * gc + g(std::numeric_limits<double>::infinity()) * rest);
    }
    return out;
  }

  // Finite differences have no aliasing to remove.
  Vec dealias(const Vec& f) const override { return f; }

  double friedrichs_norm_sq(const Vec& f, double s) const override {
    const auto& b = basis();
    Vec c = cell_area() * (b.fields.transpose() * f);
    double acc = 0.0;
    for (int n = 0; n < c.size(); ++n) acc += std::pow(1.0 + b.eigenvalues[n], s) * c[n] * c[n];
    const double rest = cell_area() * (f - b.fields * c).squaredNorm();
    return acc + std::pow(1.0 + b.eigenvalues[b.n_modes() - 1], s) * rest;
  }

  /// Catmull-Rom bicubic interpolation through the glued neighbours.
  std::function<double(const SurfacePoint&)> interpolant(const Vec& f) const override {
    return [this, f](const SurfacePoint& p) {
      const double gx = p.x * N_ - 0.5, gy = p.y * N_ - 0.5;
      const int i0 = static_cast<int>(std::floor(gx)), j0 = static_cast<int>(std::floor(gy));
      const double tx = gx - i0, ty = gy - j0;
      const int ic = std::clamp(i0, 0, N_ - 1), jc = std::clamp(j0, 0, N_ - 1);
      const int base = shift(node(p.square, ic, jc), i0 - ic, j0 - jc);
      auto wts = [](double t) {
        return std::array<double, 4>{0.5 * (-t + 2 * t * t - t * t * t), 0.5 * (2 - 5 * t * t + 3 * t * t * t),
                                     0.5 * (t + 4 * t * t - 3 * t * t * t), 0.5 * (-t * t + t * t * t)};
      };
      const auto wx = wts(tx), wy = wts(ty);
      double acc = 0.0;
      for (int b = 0; b < 4; ++b)
        for (int a = 0; a < 4; ++a) acc += wx[a] * wy[b] * f[shift(base, a - 1, b - 1)];
      return acc;
    };
  }

  const SpectralBasis& basis() const override {
    if (!has_basis())
      throw Error(ErrorCode::BasisUnavailable, "origami eigenbasis not built (n_modes = 0)");
    return basis_;
  }
  bool has_basis() const override { return basis_.n_modes() > 0; }

 private:
  void build_neighbors() {
    const int n = n_nodes();
    for (auto& t : nbr_) t.resize(n);
    const auto& S = *surface_;
    for (int s = 0; s < S.n_squares(); ++s)
      for (int j = 0; j < N_; ++j)
        for (int i = 0; i < N_; ++i) {
          const int k = node(s, i, j);
          nbr_[PlusX][k] = i + 1 < N_ ? node(s, i + 1, j) : node(S.right(s), 0, j);
          nbr_[MinusX][k] = i > 0 ? node(s, i - 1, j) : node(S.left(s), N_ - 1, j);
          nbr_[PlusY][k] = j + 1 < N_ ? node(s, i, j + 1) : node(S.up(s), i, 0);
          nbr_[MinusY][k] = j > 0 ? node(s, i, j - 1) : node(S.down(s), i, N_ - 1);
        }
  }

  Vec central(const Vec& f, Dir plus, Dir minus) const {
    Vec out(f.size());
    const double c = N_ / 12.0;
    for (int k = 0; k < n_nodes(); ++k) {
      const int p1 = nbr_[plus][k], m1 = nbr_[minus][k];
      out[k] = c * (-f[nbr_[plus][p1]] + 8.0 * f[p1] - 8.0 * f[m1] + f[nbr_[minus][m1]]);
    }
    return out;
  }

  void build_basis(int n_modes) {
    const int n = n_nodes();
    if (n > kMaxDenseNodes)
      throw Error(ErrorCode::ConfigError, "dense eigensolver limited to " + std::to_string(kMaxDenseNodes) +
                                              " nodes; lower N");
    if (n_modes > n) throw Error(ErrorCode::SolverFailure, "more modes requested than grid nodes");
    const double inv_h2 = double(N_) * N_;
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k) {
      a[static_cast<std::size_t>(k) * n + k] += 4.0 * inv_h2;
      for (int d = 0; d < 4; ++d) a[static_cast<std::size_t>(k) * n + nbr_[d][k]] -= inv_h2;
    }
    std::vector<double> w(n), z(static_cast<std::size_t>(n) * n_modes);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, a.data(), n, 0.0, 0.0, 1, n_modes, 0.0,
                                     &found, w.data(), z.data(), n, isuppz.data());
    if (info != 0 || found != n_modes)
      throw Error(ErrorCode::SolverFailure, "dsyevr failed, info=" + std::to_string(info));
    basis_.eigenvalues.resize(n_modes);
    basis_.fields.resize(n, n_modes);
    for (int q = 0; q < n_modes; ++q) {
      basis_.eigenvalues[q] = w[q];
      Eigen::Map<Vec> col(z.data() + static_cast<std::size_t>(q) * n, n);
      // fix the sign so repeated builds agree
      Eigen::Index arg;
      col.cwiseAbs().maxCoeff(&arg);
      const double sign = col[arg] < 0 ? -1.0 : 1.0;
      basis_.fields.col(q) = sign * N_ * col;
    }
    // The constant is an exact null vector of the stencil.
    basis_.eigenvalues[0] = 0.0;
    basis_.fields.col(0).setConstant(1.0 / std::sqrt(surface_->area()));
  }

  std::array<std::vector<int>, 4> nbr_;
  SpectralBasis basis_;
};

}  // namespace parasurf

#endif  // PARASURF_SPECTRAL_ORIGAMI_GRID_HPP
