#ifndef PARASURF_SPECTRAL_HPP
#define PARASURF_SPECTRAL_HPP

#include "parasurf/spectral/dyadic.hpp"
#include "parasurf/spectral/field.hpp"
#include "parasurf/spectral/grid.hpp"
#include "parasurf/spectral/norms.hpp"
#include "parasurf/spectral/paraproduct.hpp"
#include "parasurf/spectral/random.hpp"

#endif  // PARASURF_SPECTRAL_HPP
