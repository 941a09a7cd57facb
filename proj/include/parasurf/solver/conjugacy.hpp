#ifndef PARASURF_SOLVER_CONJUGACY_HPP
#define PARASURF_SOLVER_CONJUGACY_HPP

#include <array>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "parasurf/dynamics.hpp"
#include "parasurf/spectral/random.hpp"

namespace parasurf {

struct ConjugacyReport {
  double max_deviation = 0.0;
  std::vector<std::pair<double, double>> deviation_vs_time;  // max over points at each sample time
};

/// Integrates X_H from u(x) and compares with u(straight_flow(x, t)).
/// Positions are tracked in the developed chart of the start point x, so the
/// state is the flat displacement from x plus the fiber coordinates.
inline ConjugacyReport verify_conjugacy(const Hamiltonian& H, const Embedding& u, double t_max, int n_points,
                                        std::uint64_t seed = 1, int n_times = 10, double tol = 1e-11) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 4>;
  const auto& disc = u.disc();
  const auto& surf = disc->surface();
  std::array<std::function<double(const SurfacePoint&)>, 4> interp;
  for (int q = 0; q < 4; ++q) interp[q] = disc->interpolant(u.w.comp(q));
  auto w_at = [&](const SurfacePoint& p) {
    Vec4 out;
    for (int q = 0; q < 4; ++q) out(q) = interp[q](p);
    return out;
  };

  ConjugacyReport rep;
  std::vector<double> times;
  for (int k = 1; k <= n_times; ++k) times.push_back(t_max * k / n_times);
  rep.deviation_vs_time.assign(times.size(), {0.0, 0.0});
  for (std::size_t k = 0; k < times.size(); ++k) rep.deviation_vs_time[k].first = times[k];

  Rng rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_int_distribution<int> S(0, surf.n_squares() - 1);
  for (int n = 0; n < n_points; ++n) {
    SurfacePoint x0{S(rng), U(rng), U(rng)};
    while (surf.distance_to_cone_points(x0) < 0.2) x0 = {S(rng), U(rng), U(rng)};
    const Vec4 w0 = w_at(x0);
    State z{w0(0), w0(1), u.xi.xi1 + w0(2), u.xi.xi2 + w0(3)};
    auto rhs = [&](const State& s, State& ds, double) {
      const SurfacePoint p = flat_displace(surf, x0, s[0], s[1]);
      const Vec4 X = H.vector_field(p, s[2], s[3]);
      for (int q = 0; q < 4; ++q) ds[q] = X(q);
    };
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());
    double t = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      odeint::integrate_adaptive(stepper, rhs, z, t, times[k], 1e-2);
      t = times[k];
      const SurfacePoint xt = straight_flow(surf, u.xi, x0, t);
      const Vec4 wt = w_at(xt);
      const double dev = std::max({std::abs(z[0] - (t * u.xi.xi1 + wt(0))), std::abs(z[1] - (t * u.xi.xi2 + wt(1))),
                                   std::abs(z[2] - (u.xi.xi1 + wt(2))), std::abs(z[3] - (u.xi.xi2 + wt(3)))});
      rep.deviation_vs_time[k].second = std::max(rep.deviation_vs_time[k].second, dev);
      rep.max_deviation = std::max(rep.max_deviation, dev);
    }
  }
  return rep;
}

}  // namespace parasurf

#endif  // PARASURF_SOLVER_CONJUGACY_HPP
