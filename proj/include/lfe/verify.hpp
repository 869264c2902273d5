#pragma once

// Independent checks on candidate orbits: direct Runge-Kutta integration of
// the equation of motion in momentum form, a spectral residual for periodic
// trajectories, and the closed-form radius equation for circular orbits of
// the radial electric problem.

#include <functional>
#include <optional>
#include <vector>

#include "lfe/potentials.hpp"
#include "lfe/trajectory.hpp"

namespace lfe {

struct ode_state {
  vec3 q, p;
  double t = 0;
};

// classical RK4 on q' = phi_inv(p), p' = lorentz_force(q, phi_inv(p)) over
// [0, 2pi] with fixed step; returns all steps+1 states
std::vector<ode_state> integrate_lfe(const vec3 &q0, const vec3 &p0,
                                     const electric_potential &V, const magnetic_potential &W,
                                     int steps);

// max nodal defect |(phi(q'))' - force|: the momentum track phi(d_i) lives at
// element midpoints and is differentiated and resampled at the nodes through
// its Fourier interpolant; force_at_node(i, q_i, v_i) supplies the right side
double ode_residual_force(
    const periodic_trajectory &q,
    const std::function<vec3(int, const vec3 &, const vec3 &)> &force_at_node);

double ode_residual(const periodic_trajectory &q, const electric_potential &V,
                    const magnetic_potential &W);

// root of j^2/sqrt(1 - j^2 rho^2) = 2 lambda/(1 + lambda^2 rho^4) on (0, 1/j),
// the radius of the mode-j circular orbit for V = arctan(lambda |q|^2), W = 0;
// empty when the curves do not cross (2 lambda <= j^2)
std::optional<double> circular_orbit_radius(double lambda, int j);

// RK4 round trip from the trajectory's spectral initial data; returns
// |q(2pi) - q(0)| + |p(2pi) - p(0)|
double shooting_defect(const periodic_trajectory &q, const electric_potential &V,
                       const magnetic_potential &W, int steps = 8192);

} // namespace lfe
