#ifndef PARASURF_SOLVER_HPP
#define PARASURF_SOLVER_HPP

#include "parasurf/solver/conjugacy.hpp"
#include "parasurf/solver/fixed_point.hpp"
#include "parasurf/solver/obstruction.hpp"
#include "parasurf/solver/para_cohomological.hpp"

#endif  // PARASURF_SOLVER_HPP
