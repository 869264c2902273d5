#pragma once

// Multi-start proximal search for critical orbits of the action at negative
// levels: structured starts on the boundary of the Z_m disk, proximal-point
// descent with a Newton polish, a verification gauntlet, and S^1-aware
// deduplication of the catch.

#include <cstdint>
#include <string>
#include <vector>

#include "lfe/moreau.hpp"
#include "lfe/potentials.hpp"
#include "lfe/rng.hpp"
#include "lfe/trajectory.hpp"

namespace lfe {

struct start_tag {
  int mode = 0;       // structured starts carry mode j in 1..m; 0 for random
  int plane = -1;     // 0=xy, 1=yz, 2=zx; -1 for random starts
  int seed_index = 0; // substream index of the random start
};

bool operator<(const start_tag &a, const start_tag &b);
std::string tag_string(const start_tag &t);

struct critical_orbit {
  periodic_trajectory representative; // stored at the verification resolution
  double level = 0;                   // discrete action value
  double grad_norm = 0;               // ||grad I_eps||_{1,2} at the representative
  double vi_res = 0;
  double ode_res = 0;
  double shooting = 0;
  start_tag tag;
  int minimal_period_divisor = 1;
};

// threshold on the quadratic floor coefficient of V that forces the action
// below omega on the boundary sphere of the Z_m disk; three readings of the
// constant chain are reported, `value` is the one the acceptance gate uses
struct lambda_estimate {
  double value = 0;        // m^2 + (l* + 2 c0)/(gamma_m^2 r^2)
  double unsquared = 0;    // same chain with the embedding constant unsquared
  double conservative = 0; // same chain with the 2 pi of the period kept
  double gamma_hat = 0;
  std::vector<std::string> warnings;
};

struct negativity_report {
  int samples = 0;
  int violations = 0;      // samples with action >= bound
  double worst_value = 0;  // max action over the samples
  double bound = 0;        // omega = -2 pi (l* + c0)
  double margin = 0;       // bound - worst_value, positive when all clear
  std::vector<std::string> warnings;
};

struct search_options {
  int node_count = 256;     // search resolution
  int verify_nodes = 16384; // verification resolution (candidates are lifted)
  double tol_crit = 1e-7;
  double inner_tol = 1e-10;
  double tol_ode = 1e-6;
  double sep_tol = 1e-2;
  double shoot_tol = 1e-5;
  int shoot_steps = 8192;
  int phase1_cap = 120;      // proximal-point steps before the Newton polish
  int max_newton_iters = 80;
  double newton_switch = 1e-3; // gradient norm that triggers the polish
  double delta_inner = 1e-6;
  double mean_cap = 50.0; // |mean| beyond which the descent counts as escaped
  int max_period_divisor = 4; // multi_start raises this to m+1
  double epsilon_override = 0; // 0 keeps the default 0.5/alpha
};

struct candidate_assessment {
  double level = 0;
  double grad_norm = 0;
  double vi_res = 0;
  double ode_res = 0;
  double shooting = 0;
  double speed = 0;
  bool fixed_point = false;
  bool cap_active = false;
  bool prox_converged = false;
};

// full verification gauntlet at the candidate's own resolution
candidate_assessment assess_candidate(const periodic_trajectory &q, const electric_potential &V,
                                      const magnetic_potential &W,
                                      const convexity_budget &budget, const search_options &opt,
                                      rng &gen);

// empty string when every gate passes, otherwise the first failing gate
std::string gate_failure(const candidate_assessment &a, const search_options &opt);

// damped Newton iteration on the action cogradient (Levenberg damping in the
// H^1 metric, accepted on residual decrease); returns the final residual
double newton_polish(periodic_trajectory &q, const electric_potential &V,
                     const magnetic_potential &W, double target, int max_iters,
                     double delta_inner, int *steps_taken = nullptr);

struct descend_result {
  bool promoted = false;
  critical_orbit orbit;           // filled when promoted
  std::string failure;            // reason otherwise
  std::vector<double> level_trace; // proximal leg, monotone by construction
  int prox_steps = 0;
  int newton_steps = 0;
};

// proximal-point descent from q0 followed by a Newton polish, then the
// verification gauntlet at opt.verify_nodes
descend_result descend(const periodic_trajectory &q0, const electric_potential &V,
                       const magnetic_potential &W, const convexity_budget &budget,
                       const start_tag &tag, const search_options &opt, rng &gen);

lambda_estimate estimate_lambda_m(int m, double r, const electric_potential &V,
                                  const magnetic_potential &W);

// samples random boundary points of the Z_m disk and checks that the action
// sits below omega = -2 pi (l* + c0) on all of them
negativity_report verify_negativity(int m, double r, const electric_potential &V,
                                    const magnetic_potential &W, int samples,
                                    std::uint64_t seed, int node_count = 256);

struct orbit_set {
  std::vector<critical_orbit> orbits; // sorted by (level, tag), pairwise separated
  int m = 1;
  double lambda = 0;
  double r = 0;
  int dim_zm = 0;
  int boundary_index = 0; // 3m
  lambda_estimate lambda_m;
  double omega = 0;
  std::vector<std::string> start_log; // one line per start, promoted or not
};

// largest divisor n in 2..max_divisor with shift(q, 2pi/n) == q up to a small
// interpolation tolerance; 1 when none
int minimal_period_divisor(const periodic_trajectory &q, int max_divisor);

// 3m structured starts (plane circles) plus random boundary samples, each
// descended and verified, then deduplicated by orbit distance keeping the
// lowest level per cluster; deterministic for a fixed seed
orbit_set multi_start(int m, double r, const electric_potential &V,
                      const magnetic_potential &W, int extra_random_starts,
                      std::uint64_t seed, const search_options &opt);

} // namespace lfe
