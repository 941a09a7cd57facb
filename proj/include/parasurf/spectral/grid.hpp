#ifndef PARASURF_SPECTRAL_GRID_HPP
#define PARASURF_SPECTRAL_GRID_HPP

#include "parasurf/spectral/origami_grid.hpp"
#include "parasurf/spectral/torus_grid.hpp"

namespace parasurf {

/// Fourier grid on the torus, finite differences plus eigenbasis otherwise.
inline DiscPtr make_discretization(const SurfacePtr& surface, int N, int n_modes = 0) {
  if (surface->is_torus()) return std::make_shared<TorusGrid>(surface, N, n_modes);
  return std::make_shared<OrigamiGrid>(surface, N, n_modes);
}

/// laplacian_eigenbasis: closed form on the torus, dense symmetric solve otherwise.
inline SpectralBasis laplacian_eigenbasis(const SurfacePtr& surface, int n_modes, int N) {
  if (N < 16) throw Error(ErrorCode::ConfigError, "eigenbasis needs N >= 16");
  if (surface->is_torus()) return torus_basis(N, n_modes);
  return OrigamiGrid(surface, N, n_modes).basis();
}

}  // namespace parasurf

#endif  // PARASURF_SPECTRAL_GRID_HPP
