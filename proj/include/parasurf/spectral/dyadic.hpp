#ifndef PARASURF_SPECTRAL_DYADIC_HPP
#define PARASURF_SPECTRAL_DYADIC_HPP

#include <cmath>
#include <vector>

#include "parasurf/spectral/field.hpp"

namespace parasurf::dyadic {

inline double smoothstep5(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

/// Radial cutoff: 1 on [0, 1.1], 0 on [1.9, inf), quintic in log2(t) between.
inline double psi(double t) {
  if (t <= 1.1) return 1.0;
  if (t >= 1.9) return 0.0;
  static const double a = std::log2(1.1), b = std::log2(1.9);
  return 1.0 - smoothstep5((std::log2(t) - a) / (b - a));
}

/// Symbol of the low-pass S_j, j >= 0.
inline Multiplier lowpass(int j) {
  const double scale = std::ldexp(1.0, j);
  return [scale](double f) { return psi(f / scale); };
}

/// Symbol of block j in 0..J+1 (block J+1 is the tail I - S_J).
inline Multiplier block(int j, int J) {
  if (j == 0) return lowpass(0);
  if (j == J + 1) {
    const double scale = std::ldexp(1.0, J);
    return [scale](double f) { return 1.0 - psi(f / scale); };
  }
  const double hi = std::ldexp(1.0, j), lo = std::ldexp(1.0, j - 1);
  return [hi, lo](double f) { return psi(f / hi) - psi(f / lo); };
}

inline std::vector<Multiplier> all_blocks(int J) {
  std::vector<Multiplier> gs;
  for (int j = 0; j <= J + 1; ++j) gs.push_back(block(j, J));
  return gs;
}

inline Field lowpass(const Field& f, int j) {
  const auto g = lowpass(j);
  return f.apply([&](const Vec& v) { return f.disc()->multiplier(v, g); });
}

/// Projection onto the frequencies where S_1 vanishes.
inline Field high_part(const Field& f) {
  const auto s1 = lowpass(1);
  return f.apply([&](const Vec& v) { return f.disc()->multiplier(v, [&](double k) { return s1(k) == 0.0 ? 1.0 : 0.0; }); });
}

struct DyadicDecomposition {
  int J = 0;
  std::vector<Field> blocks;  // j = 0..J+1

  Field sum() const {
    Field acc = blocks.front();
    for (std::size_t j = 1; j < blocks.size(); ++j) acc += blocks[j];
    return acc;
  }
  /// S_j f = sum of blocks 0..j.
  Field partial(int j) const {
    Field acc = blocks.front();
    for (int i = 1; i <= j; ++i) acc += blocks[i];
    return acc;
  }
};

inline DyadicDecomposition decompose(const Field& f) {
  DyadicDecomposition d;
  d.J = f.disc()->dyadic_J();
  const auto gs = all_blocks(d.J);
  for (std::size_t j = 0; j < gs.size(); ++j) d.blocks.emplace_back(f.disc(), f.rows(), f.cols());
  for (int q = 0; q < f.n_components(); ++q) {
    auto parts = f.disc()->multipliers(f.data().row(q).transpose(), gs);
    for (std::size_t j = 0; j < gs.size(); ++j) d.blocks[j].data().row(q) = parts[j].transpose();
  }
  return d;
}

}  // namespace parasurf::dyadic

#endif  // PARASURF_SPECTRAL_DYADIC_HPP
