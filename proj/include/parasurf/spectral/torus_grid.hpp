#ifndef PARASURF_SPECTRAL_TORUS_GRID_HPP
#define PARASURF_SPECTRAL_TORUS_GRID_HPP

#include <algorithm>
#include <array>
#include <tuple>

#include "parasurf/spectral/discretization.hpp"
#include "parasurf/spectral/fft.hpp"

namespace parasurf {

/// Closed-form Laplace eigenbasis of the unit torus: the constant, then
/// sqrt(2) cos / sqrt(2) sin pairs ordered by 4 pi^2 (m^2 + n^2).
inline SpectralBasis torus_basis(int N, int n_modes) {
  const int kmax = N / 2 - 1;
  std::vector<std::array<int, 2>> ks;
  for (int m = 0; m <= kmax; ++m)
    for (int n = -kmax; n <= kmax; ++n)
      if (m > 0 || n > 0) ks.push_back({m, n});
  std::sort(ks.begin(), ks.end(), [](const auto& a, const auto& b) {
    return std::make_tuple(a[0] * a[0] + a[1] * a[1], a[0], a[1]) <
           std::make_tuple(b[0] * b[0] + b[1] * b[1], b[0], b[1]);
  });
  const int available = 1 + 2 * static_cast<int>(ks.size());
  if (n_modes > available)
    throw Error(ErrorCode::SolverFailure, "torus basis has only " + std::to_string(available) + " modes at N=" +
                                              std::to_string(N));
  SpectralBasis b;
  b.eigenvalues.resize(n_modes);
  b.fields.resize(N * N, n_modes);
  const double two_pi = 2.0 * M_PI;
  for (int q = 0; q < n_modes; ++q) {
    if (q == 0) {
      b.eigenvalues[0] = 0.0;
      b.fields.col(0).setOnes();
      continue;
    }
    const auto& k = ks[(q - 1) / 2];
    const bool is_sin = (q - 1) % 2 == 1;
    b.eigenvalues[q] = two_pi * two_pi * (k[0] * k[0] + k[1] * k[1]);
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        const double ph = two_pi * (k[0] * (i + 0.5) + k[1] * (j + 0.5)) / N;
        b.fields(j * N + i, q) = std::sqrt(2.0) * (is_sin ? std::sin(ph) : std::cos(ph));
      }
  }
  return b;
}

/// Fourier pseudo-spectral discretization of the one-square torus.
class TorusGrid final : public Discretization {
 public:
  TorusGrid(SurfacePtr surface, int N, int n_modes = 0) : Discretization(std::move(surface), N) {
    if (!surface_->is_torus()) throw Error(ErrorCode::ConfigError, "TorusGrid needs the one-square torus");
    if (n_modes > 0) basis_ = torus_basis(N, n_modes);
  }

  bool is_fourier() const override { return true; }

  /// Normalized coefficients: f = sum_k fhat_k exp(2 pi i k.(x - x_node0)).
  std::vector<fft::cplx> transform(const Vec& f) const {
    std::vector<fft::cplx> in(f.size()), out(f.size());
    for (Eigen::Index k = 0; k < f.size(); ++k) in[k] = f[k];
    fft::forward(N_, in.data(), out.data());
    const double scale = 1.0 / (static_cast<double>(N_) * N_);
    for (auto& c : out) c *= scale;
    return out;
  }

  Vec inverse(std::vector<fft::cplx> hat) const {
    std::vector<fft::cplx> out(hat.size());
    fft::backward(N_, hat.data(), out.data());
    Vec f(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) f[k] = out[k].real();
    return f;
  }

  Vec dx(const Vec& f) const override { return derivative(f, 0); }
  Vec dy(const Vec& f) const override { return derivative(f, 1); }

  std::vector<Vec> multipliers(const Vec& f, const std::vector<Multiplier>& gs) const override {
    auto hat = transform(f);
    std::vector<double> freq(hat.size());
    for (int j = 0; j < N_; ++j)
      for (int i = 0; i < N_; ++i) {
        const int kx = fft::wavenumber(i, N_), ky = fft::wavenumber(j, N_);
        freq[j * N_ + i] = std::sqrt(double(kx * kx + ky * ky));
      }
    std::vector<Vec> out;
    out.reserve(gs.size());
    std::vector<fft::cplx> work(hat.size());
    for (const auto& g : gs) {
      for (std::size_t k = 0; k < hat.size(); ++k) work[k] = hat[k] * g(freq[k]);
      out.push_back(inverse(work));
    }
    return out;
  }

  Vec dealias(const Vec& f) const override {
    auto hat = transform(f);
    const int keep = N_ / 3;
    for (int j = 0; j < N_; ++j)
      for (int i = 0; i < N_; ++i)
        if (std::abs(fft::wavenumber(i, N_)) > keep || std::abs(fft::wavenumber(j, N_)) > keep)
          hat[j * N_ + i] = 0.0;
    return inverse(std::move(hat));
  }

  double friedrichs_norm_sq(const Vec& f, double s) const override {
    auto hat = transform(f);
    const double c = 4.0 * M_PI * M_PI;
    double acc = 0.0;
    for (int j = 0; j < N_; ++j)
      for (int i = 0; i < N_; ++i) {
        const int kx = fft::wavenumber(i, N_), ky = fft::wavenumber(j, N_);
        acc += std::pow(1.0 + c * (kx * kx + ky * ky), s) * std::norm(hat[j * N_ + i]);
      }
    return acc;
  }

  /// Trigonometric interpolant (Nyquist modes dropped).
  std::function<double(const SurfacePoint&)> interpolant(const Vec& f) const override {
    auto hat = transform(f);
    const int n = N_;
    std::vector<fft::cplx> coef(hat.size());
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int kx = fft::wavenumber(i, n), ky = fft::wavenumber(j, n);
        if (kx == -n / 2 || ky == -n / 2) continue;
        // node 0 sits at (1/2N, 1/2N)
        coef[j * n + i] = hat[j * n + i] * std::polar(1.0, -M_PI * (kx + ky) / n);
      }
    return [coef = std::move(coef), n](const SurfacePoint& p) {
      std::vector<fft::cplx> ex(n), ey(n);
      for (int i = 0; i < n; ++i) {
        ex[i] = std::polar(1.0, 2.0 * M_PI * fft::wavenumber(i, n) * p.x);
        ey[i] = std::polar(1.0, 2.0 * M_PI * fft::wavenumber(i, n) * p.y);
      }
      fft::cplx acc = 0.0;
      for (int j = 0; j < n; ++j) {
        fft::cplx row = 0.0;
        for (int i = 0; i < n; ++i) row += coef[j * n + i] * ex[i];
        acc += row * ey[j];
      }
      return acc.real();
    };
  }

  const SpectralBasis& basis() const override {
    if (!has_basis()) throw Error(ErrorCode::BasisUnavailable, "torus grid built without modes");
    return basis_;
  }
  bool has_basis() const override { return basis_.n_modes() > 0; }

 private:
  Vec derivative(const Vec& f, int axis) const {
    auto hat = transform(f);
    for (int j = 0; j < N_; ++j)
      for (int i = 0; i < N_; ++i) {
        int k = fft::wavenumber(axis == 0 ? i : j, N_);
        if (k == -N_ / 2) k = 0;
        hat[j * N_ + i] *= fft::cplx(0.0, 2.0 * M_PI * k);
      }
    return inverse(std::move(hat));
  }

  SpectralBasis basis_;
};

}  // namespace parasurf

#endif  // PARASURF_SPECTRAL_TORUS_GRID_HPP
