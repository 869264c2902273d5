#pragma once
#include <functional>
#include <optional>
#include <vector>

#include "lfe/linalg.hpp"
#include "lfe/potentials.hpp"
#include "lfe/trajectory.hpp"

namespace lfe {

struct action_breakdown {
  double psi = 0;   // kinetic part, in [0, 2pi] when finite
  double f = 0;     // electromagnetic part
  double total = 0; // psi + f when finite
  double slack = 0; // 1 - sup_speed
  bool finite = true;
};

// exact elementwise value h sum (1 - sqrt(1 - |d_i|^2)); empty when infeasible
std::optional<double> psi_star(const periodic_trajectory &q);

// midpoint quadrature of q'.W(q) - V(q)
double f_star(const periodic_trajectory &q, const electric_potential &V,
              const magnetic_potential &W);

action_breakdown evaluate_action(const periodic_trajectory &q, const electric_potential &V,
                                 const magnetic_potential &W);

// directional derivative of the smooth part:
// midpoint quadrature of (script_E(q, q') - grad V(q)) . phi + W(q) . phi'
double f_star_derivative(const periodic_trajectory &q, const periodic_trajectory &phi,
                         const electric_potential &V, const magnetic_potential &W);

// max over probes of the positive part of
// [psi(q) - psi(phi) - F'(q)[phi - q]] / ||phi - q||_{1,2};
// fprime_delta(phi) must return F'(q)[phi - q]
double vi_residual_callback(const periodic_trajectory &q,
                            const std::vector<periodic_trajectory> &probes,
                            const std::function<double(const periodic_trajectory &)> &fprime_delta);

double vi_residual(const periodic_trajectory &q, const electric_potential &V,
                   const magnetic_potential &W,
                   const std::vector<periodic_trajectory> &probes);

// probe set for variational-inequality checks: Fourier modes 0..m_probe in the
// three axes around q plus random feasible perturbations, all projected
std::vector<periodic_trajectory> standard_probes(const periodic_trajectory &q, int m_probe,
                                                 int random_count, double amplitude,
                                                 double slack, rng &gen);

// Euclidean gradient of the discrete action with respect to the nodal values;
// requires sup_speed(q) < 1
std::vector<vec3> action_cogradient(const periodic_trajectory &q,
                                    const electric_potential &V,
                                    const magnetic_potential &W);

// Hessian of the discrete action as a cyclic block tridiagonal matrix;
// requires V.hessian and (for nontrivial W) W.second_derivative
block_tridiag action_hessian(const periodic_trajectory &q, const electric_potential &V,
                             const magnetic_potential &W);

// Gram matrix of the discrete H^1 inner product in the same block layout
block_tridiag h1_gram(int node_count);

// H^1 Riesz representative of a Euclidean cogradient: solves A u = g
// componentwise for the cyclic tridiagonal Gram matrix A
periodic_trajectory riesz_representative(const std::vector<vec3> &cograd, int node_count);

} // namespace lfe
