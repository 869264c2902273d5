#include "lfe/orbit_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lfe/action.hpp"
#include "lfe/linalg.hpp"
#include "lfe/verify.hpp"

namespace lfe {

bool operator<(const start_tag &a, const start_tag &b) {
  if (a.mode != b.mode) return a.mode < b.mode;
  if (a.plane != b.plane) return a.plane < b.plane;
  return a.seed_index < b.seed_index;
}

std::string tag_string(const start_tag &t) {
  std::ostringstream os;
  if (t.mode > 0) {
    static const char *names[3] = {"xy", "yz", "zx"};
    os << "mode" << t.mode << "-" << (t.plane >= 0 && t.plane < 3 ? names[t.plane] : "??");
    if (t.seed_index) os << "-s" << t.seed_index;
  } else {
    os << "random-" << t.seed_index;
  }
  return os.str();
}

double newton_polish(periodic_trajectory &q, const electric_potential &V,
                     const magnetic_potential &W, double target, int max_iters,
                     double delta_inner, int *steps_taken) {
  const int n = q.n();
  block_tridiag gram = h1_gram(n);

  auto residual_of = [&](const periodic_trajectory &p, std::vector<vec3> &eucl) {
    eucl = action_cogradient(p, V, W);
    periodic_trajectory g = riesz_representative(eucl, n);
    return h1_norm(g);
  };

  std::vector<vec3> g;
  double res = residual_of(q, g);
  double nu = 1e-6;
  int it = 0;
  for (; it < max_iters && res > target; ++it) {
    block_tridiag hess = action_hessian(q, V, W);
    hess.axpy(nu, gram);
    std::vector<vec3> rhs(n), delta(n);
    for (int j = 0; j < n; ++j) rhs[j] = -1.0 * g[j];
    if (!cyclic_block_solve(hess, rhs, delta)) {
      nu = std::max(nu * 16.0, 1e-4);
      continue;
    }
    periodic_trajectory dir(n);
    for (int j = 0; j < n; ++j) dir.node[j] = delta[j];
    bool accepted = false;
    double s = 1.0;
    for (int bt = 0; bt < 30 && !accepted; ++bt) {
      periodic_trajectory trial = project_feasible(lin_comb(1.0, q, s, dir), delta_inner);
      std::vector<vec3> gt;
      double rt = residual_of(trial, gt);
      if (rt < res) {
        q = trial;
        res = rt;
        g = std::move(gt);
        accepted = true;
      } else {
        s *= 0.5;
      }
    }
    if (accepted) {
      nu = std::max(nu * 0.25, 1e-10);
    } else {
      nu *= 16.0;
      if (nu > 1e8) break;
    }
  }
  if (steps_taken) *steps_taken = it;
  return res;
}

candidate_assessment assess_candidate(const periodic_trajectory &q, const electric_potential &V,
                                      const magnetic_potential &W,
                                      const convexity_budget &budget, const search_options &opt,
                                      rng &gen) {
  candidate_assessment a;
  action_breakdown b = evaluate_action(q, V, W);
  a.level = b.finite ? b.total : std::numeric_limits<double>::infinity();
  a.speed = sup_speed(q);
  a.fixed_point = is_fixed_point(q, 1e-10);

  regularization_state st = prox(q, V, W, budget, opt.inner_tol, opt.delta_inner);
  a.grad_norm = st.grad_norm;
  a.cap_active = st.cap_active;
  a.prox_converged = st.converged;

  auto probes = standard_probes(q, 3, 8, 0.1, opt.delta_inner, gen);
  probes.push_back(st.gamma_q);
  a.vi_res = vi_residual(q, V, W, probes);

  a.ode_res = ode_residual(q, V, W);
  a.shooting = shooting_defect(q, V, W, opt.shoot_steps);
  return a;
}

std::string gate_failure(const candidate_assessment &a, const search_options &opt) {
  std::ostringstream os;
  if (a.fixed_point && a.level >= 0) return "converged to Fix(S1)";
  if (a.fixed_point) return "fixed point";
  if (!(a.level < 0)) {
    os << "nonnegative level " << a.level;
    return os.str();
  }
  if (!a.prox_converged) return "final prox solve did not converge";
  if (a.cap_active) return "speed cap active at the candidate";
  if (!(a.grad_norm <= opt.tol_crit)) {
    os << "grad_norm " << a.grad_norm << " above " << opt.tol_crit;
    return os.str();
  }
  if (!(a.vi_res <= opt.tol_crit)) {
    os << "vi_residual " << a.vi_res << " above " << opt.tol_crit;
    return os.str();
  }
  if (!(a.ode_res <= opt.tol_ode)) {
    os << "ode_residual " << a.ode_res << " above " << opt.tol_ode;
    return os.str();
  }
  if (!(a.shooting <= opt.shoot_tol)) {
    os << "shooting defect " << a.shooting << " above " << opt.shoot_tol;
    return os.str();
  }
  return "";
}

descend_result descend(const periodic_trajectory &q0, const electric_potential &V,
                       const magnetic_potential &W, const convexity_budget &budget,
                       const start_tag &tag, const search_options &opt, rng &gen) {
  descend_result out;
  out.orbit.tag = tag;
  if (sup_speed(q0) >= 1.0) {
    out.failure = "infeasible start";
    return out;
  }
  periodic_trajectory q = project_feasible(q0, opt.delta_inner);
  out.level_trace.push_back(evaluate_action(q, V, W).total);

  // leg 1: proximal-point iteration; the trace is monotone by construction.
  // full inner accuracy is pointless this far out, the gauntlet retightens it
  const double inner1 = std::max(opt.inner_tol, 1e-9);
  double grad_norm = std::numeric_limits<double>::infinity();
  double best_grad = grad_norm;
  int since_best = 0;
  for (int k = 0; k < opt.phase1_cap; ++k) {
    regularization_state st = prox(q, V, W, budget, inner1, opt.delta_inner);
    q = st.gamma_q;
    ++out.prox_steps;
    out.level_trace.push_back(evaluate_action(q, V, W).total);
    grad_norm = st.grad_norm;
    if (norm(mean(q)) > opt.mean_cap) {
      out.failure = "descent escaped (mean drift)";
      return out;
    }
    if (grad_norm <= opt.newton_switch) break;
    if (grad_norm < 0.99 * best_grad) {
      best_grad = grad_norm;
      since_best = 0;
    } else if (++since_best >= 15) {
      break; // stalled near a saddle; hand over to the Newton leg
    }
  }

  // leg 2: Newton polish on the cogradient when second derivatives exist
  const bool second_order = bool(V.hessian) && (W.trivial() || bool(W.second_derivative));
  if (second_order) {
    int steps = 0;
    double res = newton_polish(q, V, W, 1e-12, opt.max_newton_iters, opt.delta_inner, &steps);
    out.newton_steps += steps;
    if (res > 0.5 * opt.tol_crit) {
      std::ostringstream os;
      os << "newton stalled at residual " << res;
      out.failure = os.str();
      return out;
    }
  } else if (grad_norm > opt.tol_crit) {
    for (int k = 0; k < 4 * opt.phase1_cap && grad_norm > opt.tol_crit; ++k) {
      regularization_state st = prox(q, V, W, budget, opt.inner_tol, opt.delta_inner);
      q = st.gamma_q;
      ++out.prox_steps;
      grad_norm = st.grad_norm;
    }
    if (grad_norm > opt.tol_crit) {
      out.failure = "proximal iteration did not reach tol_crit";
      return out;
    }
  }

  // lift to the verification resolution and re-polish there
  periodic_trajectory qv = q;
  if (opt.verify_nodes > q.n()) {
    qv = from_fourier(to_fourier(q, q.n() / 2 - 1), opt.verify_nodes);
    if (second_order) {
      int steps = 0;
      newton_polish(qv, V, W, 1e-12, opt.max_newton_iters, opt.delta_inner, &steps);
      out.newton_steps += steps;
    }
  }

  if (is_fixed_point(qv, 1e-10)) {
    out.failure =
        evaluate_action(qv, V, W).total >= 0 ? "converged to Fix(S1)" : "fixed point";
    return out;
  }
  candidate_assessment a = assess_candidate(qv, V, W, budget, opt, gen);
  std::string bad = gate_failure(a, opt);
  if (!bad.empty()) {
    out.failure = bad;
    return out;
  }
  out.promoted = true;
  out.orbit.representative = qv;
  out.orbit.level = a.level;
  out.orbit.grad_norm = a.grad_norm;
  out.orbit.vi_res = a.vi_res;
  out.orbit.ode_res = a.ode_res;
  out.orbit.shooting = a.shooting;
  out.orbit.minimal_period_divisor = minimal_period_divisor(qv, opt.max_period_divisor);
  return out;
}

lambda_estimate estimate_lambda_m(int m, double r, const electric_potential &V,
                                  const magnetic_potential &W) {
  if (m < 1) throw std::invalid_argument("estimate_lambda_m: need m >= 1");
  if (!(r > 0) || r >= 1.0) throw std::invalid_argument("estimate_lambda_m: need 0 < r < 1");
  lambda_estimate est;
  est.gamma_hat = gamma_m_constant(m, r);
  double num = V.l_star + 2.0 * W.c0;
  est.value = m * m + num / (est.gamma_hat * est.gamma_hat * r * r);
  est.unsquared = m * m + num / (est.gamma_hat * r * r);
  est.conservative = m * m + two_pi * num / (est.gamma_hat * est.gamma_hat * r * r);
  if (V.floor_r0 > 0 && r >= V.floor_r0) {
    std::ostringstream os;
    os << "r = " << r << " is not below the quadratic floor radius r0 = " << V.floor_r0
       << "; the threshold guarantee assumes r < r0";
    est.warnings.push_back(os.str());
  }
  return est;
}

negativity_report verify_negativity(int m, double r, const electric_potential &V,
                                    const magnetic_potential &W, int samples,
                                    std::uint64_t seed, int node_count) {
  if (samples < 1) throw std::invalid_argument("verify_negativity: need samples >= 1");
  negativity_report rep;
  rep.samples = samples;
  rep.bound = -two_pi * (V.l_star + W.c0);
  rep.worst_value = -std::numeric_limits<double>::infinity();
  rng gen(rng::mix(seed, 0xb0d5));
  for (int s = 0; s < samples; ++s) {
    fourier_trajectory f = random_zm_boundary(m, r, gen);
    periodic_trajectory q = from_fourier(f, node_count);
    action_breakdown b = evaluate_action(q, V, W);
    double val = b.finite ? b.total : std::numeric_limits<double>::infinity();
    rep.worst_value = std::max(rep.worst_value, val);
    if (!(val < rep.bound)) ++rep.violations;
  }
  rep.margin = rep.bound - rep.worst_value;
  if (V.floor_r0 > 0 && r >= V.floor_r0)
    rep.warnings.push_back("r is not below the quadratic floor radius r0; "
                           "the negativity guarantee does not apply");
  return rep;
}

int minimal_period_divisor(const periodic_trajectory &q, int max_divisor) {
  double scale = std::max(1.0, sup_norm(q));
  for (int n_div = max_divisor; n_div >= 2; --n_div) {
    periodic_trajectory s = shift(q, two_pi / n_div);
    double worst = 0;
    for (int i = 0; i < q.n(); ++i) worst = std::max(worst, norm(s.node[i] - q.node[i]));
    if (worst <= 1e-5 * scale) return n_div;
  }
  return 1;
}

orbit_set multi_start(int m, double r, const electric_potential &V,
                      const magnetic_potential &W, int extra_random_starts,
                      std::uint64_t seed, const search_options &opt) {
  if (m < 1) throw std::invalid_argument("multi_start: need m >= 1");
  orbit_set set;
  set.m = m;
  set.lambda = V.param;
  set.r = r;
  set.dim_zm = 6 * m;
  set.boundary_index = 3 * m;
  set.lambda_m = estimate_lambda_m(m, r, V, W);
  set.omega = -two_pi * (V.l_star + W.c0);
  if (V.floor_lambda < set.lambda_m.value)
    set.start_log.push_back("warning: quadratic floor coefficient is below the "
                            "lambda_m threshold; negative boundary levels are not guaranteed");

  convexity_budget budget = alpha_bound(V, W);
  if (opt.epsilon_override > 0) {
    if (opt.epsilon_override * budget.alpha >= 1.0)
      throw std::invalid_argument("multi_start: epsilon override violates epsilon*alpha < 1");
    budget.epsilon = opt.epsilon_override;
  }
  search_options o = opt;
  o.max_period_divisor = std::max(2, m + 1);

  struct start_item {
    periodic_trajectory q;
    start_tag tag;
  };
  std::vector<start_item> starts;
  for (int plane = 0; plane < 3; ++plane)
    for (int j = 1; j <= m; ++j)
      starts.push_back(
          {zm_boundary_point(m, r, coord_plane(plane), j, opt.node_count), {j, plane, 0}});
  for (int s = 0; s < extra_random_starts; ++s) {
    rng sub(rng::mix(seed, 0x5eed0000ull + s));
    fourier_trajectory f = random_zm_boundary(m, r, sub);
    starts.push_back({from_fourier(f, opt.node_count), {0, -1, s + 1}});
  }

  std::vector<critical_orbit> found;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    rng sub(rng::mix(seed, i));
    descend_result dr = descend(starts[i].q, V, W, budget, starts[i].tag, o, sub);
    std::ostringstream os;
    os << tag_string(starts[i].tag) << ": ";
    if (dr.promoted) {
      os << "promoted, level " << dr.orbit.level;
      found.push_back(dr.orbit);
    } else {
      os << dr.failure;
    }
    set.start_log.push_back(os.str());
  }

  // lowest level first; ties resolve by the deterministic tag order; the
  // first representative of each distance cluster is kept
  std::sort(found.begin(), found.end(), [](const critical_orbit &a, const critical_orbit &b) {
    if (a.level != b.level) return a.level < b.level;
    return a.tag < b.tag;
  });
  for (const auto &orb : found) {
    bool dup = false;
    for (const auto &kept : set.orbits)
      if (orbit_distance(orb.representative, kept.representative) <= opt.sep_tol) {
        dup = true;
        break;
      }
    if (!dup) set.orbits.push_back(orb);
  }
  return set;
}

} // namespace lfe
