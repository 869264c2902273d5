#pragma once
#include <vector>

#include "lfe/trajectory.hpp"
#include "lfe/vec3.hpp"

namespace lfe {

// relativistic momentum map and its inverse
vec3 phi(const vec3 &v);     // v / sqrt(1 - |v|^2), rejects |v| >= 1
vec3 phi_inv(const vec3 &p); // p / sqrt(1 + |p|^2)
mat3 dphi(const vec3 &v);
mat3 dphi_inv(const vec3 &p); // SPD

// nodal forcing samples on the trajectory grid
using forcing = std::vector<vec3>;

struct subproblem_solution {
  periodic_trajectory q_f;
  vec3 p0;               // momentum offset found by the reduced Newton solve
  double mean_check = 0; // |mean(q_f) + mean(f)|
  double ode_residual = 0;
  int newton_iterations = 0;
  double final_residual = 0; // |G(p0)| at exit
  bool converged = false;
};

// Unique periodic solution of (phi(q'))' = mean(q) + f. The problem reduces
// to a 3-D root-find G(P0) = mean_t phi_inv(P0 + F(t)) = 0 with SPD Jacobian;
// damped Newton from newton_start. Never throws on nonconvergence: the report
// carries the final residual.
subproblem_solution solve_subproblem(const forcing &f, double tol,
                                     const vec3 &newton_start = vec3{},
                                     int max_iters = 60);

// max over nodes of |centered difference of elementwise momenta - mean(q) - f|
double subproblem_residual(const periodic_trajectory &q, const forcing &f);

// variational-inequality residual for the subproblem functional
// psi(q) + pi |mean q|^2 + integral f . q over the given probe set
double bm_vi_residual(const periodic_trajectory &q, const forcing &f,
                      const std::vector<periodic_trajectory> &probes);

} // namespace lfe
