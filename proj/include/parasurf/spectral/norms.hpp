#ifndef PARASURF_SPECTRAL_NORMS_HPP
#define PARASURF_SPECTRAL_NORMS_HPP

#include <algorithm>
#include <cmath>

#include "parasurf/spectral/field.hpp"

namespace parasurf {

enum class NormFlavor { Weighted, Friedrichs };

inline double friedrichs_norm(const Field& f, double s) {
  double acc = 0.0;
  for (int q = 0; q < f.n_components(); ++q) acc += f.disc()->friedrichs_norm_sq(f.data().row(q).transpose(), s);
  return std::sqrt(acc);
}

/// Derivative-based norm: sum over a + b <= floor(s) of |X^a Y^b f|^2 in the
/// Friedrichs norm of order s - floor(s). Negative orders fall back to Friedrichs.
inline double weighted_norm(const Field& f, double s) {
  if (s < 0.0) return friedrichs_norm(f, s);
  const int m = static_cast<int>(std::floor(s));
  const double frac = s - m;
  double acc = 0.0;
  std::vector<Field> level{f};
  for (int order = 0; order <= m; ++order) {
    for (const auto& g : level) {
      const double n = friedrichs_norm(g, frac);
      acc += n * n;
    }
    if (order == m) break;
    // X^a Y^b for a + b = order + 1: differentiate the first entry in x, all in y.
    std::vector<Field> next;
    next.push_back(level.front().dx());
    for (const auto& g : level) next.push_back(g.dy());
    level = std::move(next);
  }
  return std::sqrt(acc);
}

inline double sobolev_norm(const Field& f, double s, NormFlavor flavor = NormFlavor::Friedrichs) {
  if (!f.disc()->is_fourier() && !f.disc()->has_basis())
    throw Error(ErrorCode::BasisUnavailable, "Sobolev norm on an origami needs the eigenbasis");
  return flavor == NormFlavor::Friedrichs ? friedrichs_norm(f, s) : weighted_norm(f, s);
}

/// max(|f|_inf, |Xf|_inf, |Yf|_inf)
inline double c1_norm(const Field& f) { return std::max({f.sup(), f.dx().sup(), f.dy().sup()}); }

}  // namespace parasurf

#endif  // PARASURF_SPECTRAL_NORMS_HPP
