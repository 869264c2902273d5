#include "lfe/bm_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "lfe/action.hpp"

namespace lfe {

vec3 phi(const vec3 &v) {
  double s = norm2(v);
  if (s >= 1.0) throw std::domain_error("phi: |v| >= 1");
  return v * (1.0 / std::sqrt(1.0 - s));
}

vec3 phi_inv(const vec3 &p) { return p * (1.0 / std::sqrt(1.0 + norm2(p))); }

mat3 dphi(const vec3 &v) {
  double s = norm2(v);
  if (s >= 1.0) throw std::domain_error("dphi: |v| >= 1");
  double inv = 1.0 / std::sqrt(1.0 - s);
  mat3 m = inv * mat3::identity();
  m += (inv / (1.0 - s)) * outer(v, v);
  return m;
}

mat3 dphi_inv(const vec3 &p) {
  double s = norm2(p);
  double inv = 1.0 / std::sqrt(1.0 + s);
  mat3 m = mat3::identity() - (1.0 / (1.0 + s)) * outer(p, p);
  return inv * m;
}

static vec3 mean_of(const forcing &f) {
  vec3 m{};
  for (const auto &v : f) m += v;
  return m * (1.0 / double(f.size()));
}

subproblem_solution solve_subproblem(const forcing &f, double tol, const vec3 &newton_start,
                                     int max_iters) {
  const int n = int(f.size());
  if (n < 3) throw std::invalid_argument("solve_subproblem: need at least 3 nodes");
  if (tol <= 0) throw std::invalid_argument("solve_subproblem: tol must be positive");
  const double h = two_pi / n;
  const vec3 c = -1.0 * mean_of(f);

  // nodal smoothing makes the construction stationary for the discrete
  // functional with midpoint quadrature of the forcing term
  std::vector<vec3> fs(n);
  for (int j = 0; j < n; ++j)
    fs[j] = 0.25 * (f[(j + n - 1) % n] + 2.0 * f[j] + f[(j + 1) % n]);

  // cumulative momentum drive on elements: F_j = sum_{k<=j, k>=1} h (c + fs_k)
  std::vector<vec3> F(n);
  F[0] = vec3{};
  for (int j = 1; j < n; ++j) F[j] = F[j - 1] + h * (c + fs[j]);

  auto g_and_jac = [&](const vec3 &p0, mat3 *jac) {
    vec3 g{};
    if (jac) *jac = mat3::zero();
    for (int j = 0; j < n; ++j) {
      vec3 p = p0 + F[j];
      g += phi_inv(p);
      if (jac) *jac += dphi_inv(p);
    }
    g *= 1.0 / n;
    if (jac) *jac *= 1.0 / n;
    return g;
  };

  subproblem_solution sol;
  vec3 p0 = newton_start;
  mat3 jac;
  vec3 g = g_and_jac(p0, &jac);
  int it = 0;
  for (; it < max_iters && norm(g) > tol; ++it) {
    vec3 step;
    if (!solve3(jac, g, step)) break;
    double s = 1.0;
    double g0 = norm(g);
    for (int bt = 0; bt < 60; ++bt) {
      vec3 trial = p0 - s * step;
      vec3 gt = g_and_jac(trial, nullptr);
      if (norm(gt) < g0) {
        p0 = trial;
        break;
      }
      s *= 0.5;
    }
    g = g_and_jac(p0, &jac);
  }
  sol.newton_iterations = it;
  sol.final_residual = norm(g);
  sol.converged = sol.final_residual <= tol;
  sol.p0 = p0;

  // element derivatives, drift-corrected so the wraparound is exact
  std::vector<vec3> d(n);
  for (int j = 0; j < n; ++j) d[j] = phi_inv(p0 + F[j]) - g;
  periodic_trajectory q(n);
  q.node[0] = vec3{};
  for (int j = 0; j < n - 1; ++j) q.node[j + 1] = q.node[j] + h * d[j];
  vec3 offset = c - mean(q);
  for (auto &v : q.node) v += offset;

  sol.q_f = q;
  sol.mean_check = norm(mean(sol.q_f) + mean_of(f));
  sol.ode_residual = subproblem_residual(sol.q_f, f);
  return sol;
}

double subproblem_residual(const periodic_trajectory &q, const forcing &f) {
  const int n = q.n();
  if (int(f.size()) != n) throw std::invalid_argument("subproblem_residual: size mismatch");
  if (sup_speed(q) >= 1.0)
    throw std::invalid_argument("subproblem_residual: infeasible trajectory");
  const double h = q.h();
  const vec3 qbar = mean(q);
  double worst = 0;
  std::vector<vec3> p(n);
  for (int i = 0; i < n; ++i) p[i] = phi(q.d(i));
  for (int j = 0; j < n; ++j) {
    vec3 dp = (p[j] - p[(j + n - 1) % n]) * (1.0 / h);
    worst = std::max(worst, norm(dp - qbar - f[j]));
  }
  return worst;
}

double bm_vi_residual(const periodic_trajectory &q, const forcing &f,
                      const std::vector<periodic_trajectory> &probes) {
  const int n = q.n();
  if (int(f.size()) != n) throw std::invalid_argument("bm_vi_residual: size mismatch");
  const double h = q.h();
  const vec3 qbar = mean(q);
  return vi_residual_callback(q, probes, [&](const periodic_trajectory &phi_probe) {
    vec3 pbar = mean(phi_probe);
    double s = two_pi * dot(qbar, pbar - qbar);
    for (int i = 0; i < n; ++i) {
      vec3 fm = 0.5 * (f[i] + f[(i + 1) % n]);
      s += h * dot(fm, phi_probe.mid(i) - q.mid(i));
    }
    return s;
  });
}

} // namespace lfe
