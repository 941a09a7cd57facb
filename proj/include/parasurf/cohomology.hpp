#ifndef PARASURF_COHOMOLOGY_HPP
#define PARASURF_COHOMOLOGY_HPP

#include "parasurf/cohomology/distributions.hpp"
#include "parasurf/cohomology/solve.hpp"

#endif  // PARASURF_COHOMOLOGY_HPP
