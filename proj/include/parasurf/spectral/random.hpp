#ifndef PARASURF_SPECTRAL_RANDOM_HPP
#define PARASURF_SPECTRAL_RANDOM_HPP

#include <complex>
#include <random>

#include "parasurf/spectral/field.hpp"

namespace parasurf {

using Rng = std::mt19937_64;

/// Random trigonometric polynomial with integer modes |m|, |n| <= kmax in the
/// local square coordinates (globally smooth on any origami), zero mean unless
/// keep_mean. Coefficients decay like 1/(1 + m^2 + n^2).
inline Vec random_trig(const Discretization& disc, int kmax, Rng& rng, bool keep_mean = false) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  using cplx = std::complex<double>;
  // coefficient of exp(2 pi i (m x + n y)), m >= 0, drawn in a fixed order
  const int W = 2 * kmax + 1;
  std::vector<cplx> coef(static_cast<std::size_t>(kmax + 1) * W, 0.0);
  double mean = 0.0;
  for (int m = 0; m <= kmax; ++m)
    for (int n = -kmax; n <= kmax; ++n) {
      if (m == 0 && n < 0) continue;
      if (m == 0 && n == 0) {
        mean = U(rng);
        continue;
      }
      const double damp = 1.0 / (1.0 + m * m + n * n);
      const double a = U(rng) * damp, b = U(rng) * damp;
      coef[m * W + n + kmax] = cplx(a, -b);  // a cos + b sin
    }
  Vec out(disc.n_nodes());
  std::vector<cplx> ex(kmax + 1), ey(W);
  for (int k = 0; k < disc.n_nodes(); ++k) {
    const auto p = disc.node_point(k);
    for (int m = 0; m <= kmax; ++m) ex[m] = std::polar(1.0, 2.0 * M_PI * m * p.x);
    for (int n = -kmax; n <= kmax; ++n) ey[n + kmax] = std::polar(1.0, 2.0 * M_PI * n * p.y);
    double acc = keep_mean ? mean : 0.0;
    for (int m = 0; m <= kmax; ++m) {
      cplx row = 0.0;
      for (int n = 0; n < W; ++n) row += coef[m * W + n] * ey[n];
      acc += (row * ex[m]).real();
    }
    out[k] = acc;
  }
  return out;
}

inline Field random_field(const DiscPtr& disc, int rows, int cols, int kmax, Rng& rng, bool keep_mean = false) {
  Field f(disc, rows, cols);
  for (int q = 0; q < rows * cols; ++q) f.data().row(q) = random_trig(*disc, kmax, rng, keep_mean).transpose();
  return f;
}

}  // namespace parasurf

#endif  // PARASURF_SPECTRAL_RANDOM_HPP
