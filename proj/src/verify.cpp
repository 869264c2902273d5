#include "lfe/verify.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "lfe/bm_solver.hpp"
#include "lfe/fourier.hpp"

namespace lfe {

std::vector<ode_state> integrate_lfe(const vec3 &q0, const vec3 &p0,
                                     const electric_potential &V, const magnetic_potential &W,
                                     int steps) {
  if (steps < 1) throw std::invalid_argument("integrate_lfe: steps must be >= 1");
  const double dt = two_pi / steps;
  std::vector<ode_state> out;
  out.reserve(steps + 1);
  vec3 q = q0, p = p0;
  out.push_back({q, p, 0.0});
  for (int i = 0; i < steps; ++i) {
    vec3 k1q = phi_inv(p);
    vec3 k1p = lorentz_force(V, W, q, k1q);
    vec3 k2q = phi_inv(p + 0.5 * dt * k1p);
    vec3 k2p = lorentz_force(V, W, q + 0.5 * dt * k1q, k2q);
    vec3 k3q = phi_inv(p + 0.5 * dt * k2p);
    vec3 k3p = lorentz_force(V, W, q + 0.5 * dt * k2q, k3q);
    vec3 k4q = phi_inv(p + dt * k3p);
    vec3 k4p = lorentz_force(V, W, q + dt * k3q, k4q);
    q += (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    p += (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    out.push_back({q, p, (i + 1) * dt});
  }
  return out;
}

double ode_residual_force(
    const periodic_trajectory &q,
    const std::function<vec3(int, const vec3 &, const vec3 &)> &force_at_node) {
  const int n = q.n();
  if (n < 4) throw std::invalid_argument("ode_residual: too few nodes");
  if (sup_speed(q) >= 1.0) throw std::invalid_argument("ode_residual: infeasible trajectory");
  const double h = q.h();

  std::vector<vec3> p(n);
  for (int i = 0; i < n; ++i) p[i] = phi(q.d(i));

  // midpoint samples to node values and node derivatives: shift the Fourier
  // interpolant back by h/2 and apply ik; real parts restore conjugate symmetry
  std::vector<vec3> dp(n), pn(n);
  std::vector<std::complex<double>> comp(n);
  for (int axis = 0; axis < 3; ++axis) {
    for (int i = 0; i < n; ++i) comp[i] = p[i][axis];
    auto hat = dft(comp);
    std::vector<std::complex<double>> vhat(n), dhat(n);
    for (int k = 0; k < n; ++k) {
      int freq = (2 * k <= n) ? k : k - n;
      std::complex<double> ph = std::exp(std::complex<double>(0.0, -freq * h / 2.0));
      vhat[k] = hat[k] * ph;
      dhat[k] = vhat[k] * std::complex<double>(0.0, double(freq));
    }
    auto vnode = idft(vhat);
    auto dnode = idft(dhat);
    for (int i = 0; i < n; ++i) {
      pn[i][axis] = vnode[i].real();
      dp[i][axis] = dnode[i].real();
    }
  }

  double worst = 0;
  for (int i = 0; i < n; ++i) {
    vec3 v = phi_inv(pn[i]);
    worst = std::max(worst, norm(dp[i] - force_at_node(i, q.node[i], v)));
  }
  return worst;
}

double ode_residual(const periodic_trajectory &q, const electric_potential &V,
                    const magnetic_potential &W) {
  return ode_residual_force(q, [&](int, const vec3 &qi, const vec3 &vi) {
    return lorentz_force(V, W, qi, vi);
  });
}

std::optional<double> circular_orbit_radius(double lambda, int j) {
  if (lambda <= 0 || j < 1)
    throw std::invalid_argument("circular_orbit_radius: need lambda > 0, j >= 1");
  const double jj = double(j) * double(j);
  if (2.0 * lambda <= jj) return std::nullopt;
  auto balance = [&](double rho) {
    double r2 = rho * rho;
    return jj / std::sqrt(1.0 - jj * r2) - 2.0 * lambda / (1.0 + lambda * lambda * r2 * r2);
  };
  // negative at 0 (since 2 lambda > j^2), blows up positive at the light cone
  double lo = 0.0, hi = (1.0 - 1e-14) / j;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (balance(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double shooting_defect(const periodic_trajectory &q, const electric_potential &V,
                       const magnetic_potential &W, int steps) {
  fourier_trajectory f = to_fourier(q, q.n() / 2 - 1);
  vec3 p0 = phi(f.eval_derivative(0.0));
  auto traj = integrate_lfe(q.node[0], p0, V, W, steps);
  const ode_state &end = traj.back();
  return norm(end.q - q.node[0]) + norm(end.p - p0);
}

} // namespace lfe
