#pragma once

// Moreau-Yosida regularization of the nonsmooth action and the checks
// that make it usable as a critical point detector: the regularized
// functional is C^1 with gradient recoverable from the proximal map,
// and its critical points coincide with critical points of the action.

#include <string>
#include <vector>

#include "lfe/potentials.hpp"
#include "lfe/rng.hpp"
#include "lfe/trajectory.hpp"

namespace lfe {

struct convexity_budget {
  double alpha1 = 0; // electric contribution, H_V / 2
  double alpha2 = 0; // magnetic contribution, c1 + c2 / 2
  double alpha = 0;  // alpha1 + alpha2
  double epsilon = 0;
};

// alpha such that I + alpha ||.||^2 is convex on the feasible set,
// and a default regularization width 0 < epsilon < 1/alpha.
convexity_budget alpha_bound(const electric_potential &V, const magnetic_potential &W);

struct regularization_state {
  periodic_trajectory q;       // query point
  periodic_trajectory gamma_q; // proximal point gamma(q)
  double i_eps = 0;            // regularized value at q
  periodic_trajectory grad;    // H^1 gradient of I_eps at q, (2/eps)(q - gamma(q))
  double grad_norm = 0;        // ||grad||_{1,2}
  int inner_iterations = 0;
  double inner_residual = 0; // projected-gradient norm at exit
  bool cap_active = false;   // feasibility projection active at the solution
  bool converged = false;
};

// proximal map: minimize eps^{-1}||phi - q||_{1,2}^2 + I(phi) over feasible phi,
// by projected gradient descent in the H^1 metric, warm started at q.
regularization_state prox(const periodic_trajectory &q, const electric_potential &V,
                          const magnetic_potential &W, const convexity_budget &budget,
                          double inner_tol, double delta_inner = 1e-6, int max_inner = 20000);

// same minimization from an explicit warm start; the minimizer is unique
// because epsilon stays below 1/alpha, so any start must land on it
regularization_state prox_from(const periodic_trajectory &q, const periodic_trajectory &warm,
                               const electric_potential &V, const magnetic_potential &W,
                               const convexity_budget &budget, double inner_tol,
                               double delta_inner = 1e-6, int max_inner = 20000);

struct el_check {
  std::string name;
  double worst = 0;
  double threshold = 0;
  bool ok = false;
};

struct el_report {
  std::vector<el_check> checks;
  bool all_ok() const {
    for (const auto &c : checks)
      if (!c.ok) return false;
    return true;
  }
  bool any_violation() const { return !all_ok(); }
};

// battery of checks that the prox output satisfies the properties the
// regularization must have: value consistency, gradient consistency with
// finite differences, subgradient inequality against probes, invariance
// under grid shifts.
el_report check_el_properties(const periodic_trajectory &q, const electric_potential &V,
                              const magnetic_potential &W, const convexity_budget &budget,
                              double tol, double inner_tol, rng &gen);

// probes for variational inequalities: standard Fourier probe set plus the
// proximal point itself.
std::vector<periodic_trajectory> default_probes(const periodic_trajectory &q,
                                                const electric_potential &V,
                                                const magnetic_potential &W,
                                                const convexity_budget &budget, double inner_tol,
                                                rng &gen);

} // namespace lfe
