#ifndef PARASURF_DYNAMICS_HPP
#define PARASURF_DYNAMICS_HPP

#include "parasurf/dynamics/embedding.hpp"
#include "parasurf/dynamics/hamiltonian.hpp"
#include "parasurf/dynamics/linearization.hpp"

#endif  // PARASURF_DYNAMICS_HPP
