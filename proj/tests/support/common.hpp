#ifndef PARASURF_TESTS_COMMON_HPP
#define PARASURF_TESTS_COMMON_HPP

#include <cmath>

#include "parasurf/spectral.hpp"

namespace testing_support {

using namespace parasurf;

inline DiscPtr torus_grid(int N, int n_modes = 0) { return make_discretization(make_torus(), N, n_modes); }

inline Field trig(const DiscPtr& d, double a, int m, int n, bool sine = false) {
  return Field::scalar(d, d->sample([&](const SurfacePoint& p) {
    const double ph = 2.0 * M_PI * (m * p.x + n * p.y);
    return a * (sine ? std::sin(ph) : std::cos(ph));
  }));
}

inline double max_abs_diff(const Field& a, const Field& b) { return (a - b).sup(); }

}  // namespace testing_support

#endif
