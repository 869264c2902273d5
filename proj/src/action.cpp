#include "lfe/action.hpp"

#include <cmath>
#include <stdexcept>

namespace lfe {

std::optional<double> psi_star(const periodic_trajectory &q) {
  const int n = q.n();
  const double h = q.h();
  double s = 0;
  for (int i = 0; i < n; ++i) {
    double sp2 = norm2(q.d(i));
    if (sp2 > 1.0) return std::nullopt;
    s += 1.0 - std::sqrt(1.0 - sp2);
  }
  return h * s;
}

double f_star(const periodic_trajectory &q, const electric_potential &V,
              const magnetic_potential &W) {
  const int n = q.n();
  const double h = q.h();
  const bool with_w = !W.trivial();
  double s = 0;
  for (int i = 0; i < n; ++i) {
    vec3 m = q.mid(i);
    double term = -V.value(m);
    if (with_w) term += dot(q.d(i), W.value(m));
    s += term;
  }
  return h * s;
}

action_breakdown evaluate_action(const periodic_trajectory &q, const electric_potential &V,
                                 const magnetic_potential &W) {
  action_breakdown b;
  b.slack = 1.0 - sup_speed(q);
  auto psi = psi_star(q);
  b.f = f_star(q, V, W);
  if (psi) {
    b.psi = *psi;
    b.total = b.psi + b.f;
    b.finite = true;
  } else {
    b.finite = false;
  }
  return b;
}

double f_star_derivative(const periodic_trajectory &q, const periodic_trajectory &phi,
                         const electric_potential &V, const magnetic_potential &W) {
  if (q.n() != phi.n()) throw std::invalid_argument("f_star_derivative: node_count mismatch");
  const int n = q.n();
  const double h = q.h();
  const bool with_w = !W.trivial();
  double s = 0;
  for (int i = 0; i < n; ++i) {
    vec3 m = q.mid(i);
    vec3 field = -V.gradient(m);
    if (with_w) field += script_E(W, m, q.d(i));
    s += dot(field, phi.mid(i));
    if (with_w) s += dot(W.value(m), phi.d(i));
  }
  return h * s;
}

double vi_residual_callback(const periodic_trajectory &q,
                            const std::vector<periodic_trajectory> &probes,
                            const std::function<double(const periodic_trajectory &)> &fprime_delta) {
  if (probes.empty()) throw std::invalid_argument("vi_residual: empty probe set");
  auto psi_q = psi_star(q);
  if (!psi_q) throw std::invalid_argument("vi_residual: infeasible base point");
  double worst = 0;
  for (const auto &phi : probes) {
    auto psi_phi = psi_star(phi);
    if (!psi_phi) continue;
    periodic_trajectory delta = lin_comb(1.0, phi, -1.0, q);
    double nd = h1_norm(delta);
    if (nd < 1e-14) continue;
    double violation = *psi_q - *psi_phi - fprime_delta(phi);
    if (violation > 0) worst = std::max(worst, violation / nd);
  }
  return worst;
}

double vi_residual(const periodic_trajectory &q, const electric_potential &V,
                   const magnetic_potential &W,
                   const std::vector<periodic_trajectory> &probes) {
  return vi_residual_callback(q, probes, [&](const periodic_trajectory &phi) {
    periodic_trajectory delta = lin_comb(1.0, phi, -1.0, q);
    return f_star_derivative(q, delta, V, W);
  });
}

std::vector<periodic_trajectory> standard_probes(const periodic_trajectory &q, int m_probe,
                                                 int random_count, double amplitude,
                                                 double slack, rng &gen) {
  const int n = q.n();
  const double h = q.h();
  std::vector<periodic_trajectory> probes;
  auto push = [&](const periodic_trajectory &p) {
    probes.push_back(project_feasible(p, slack));
  };
  for (int mode = 0; mode <= m_probe; ++mode) {
    for (int axis = 0; axis < 3; ++axis) {
      for (int trig = 0; trig < (mode == 0 ? 1 : 2); ++trig) {
        periodic_trajectory dir(n);
        for (int i = 0; i < n; ++i) {
          double t = i * h;
          double v = (mode == 0) ? 1.0 : (trig == 0 ? std::cos(mode * t) : std::sin(mode * t));
          vec3 e{};
          e[axis] = amplitude * v;
          dir.node[i] = e;
        }
        push(lin_comb(1.0, q, 1.0, dir));
        push(lin_comb(1.0, q, -1.0, dir));
      }
    }
  }
  for (int k = 0; k < random_count; ++k) {
    fourier_trajectory f;
    f.mode_count = std::max(1, m_probe);
    f.a.resize(f.mode_count);
    f.b.resize(f.mode_count);
    f.a0 = gen.normal3();
    for (int j = 0; j < f.mode_count; ++j) {
      f.a[j] = gen.normal3();
      f.b[j] = gen.normal3();
    }
    periodic_trajectory pert = from_fourier(f, n);
    double scale = amplitude / std::max(1e-12, sup_norm(pert));
    push(lin_comb(1.0, q, scale, pert));
  }
  return probes;
}

// phi(d) = d / sqrt(1 - |d|^2)
static vec3 momentum_of(const vec3 &d) {
  double s = norm2(d);
  return d * (1.0 / std::sqrt(1.0 - s));
}

std::vector<vec3> action_cogradient(const periodic_trajectory &q,
                                    const electric_potential &V,
                                    const magnetic_potential &W) {
  const int n = q.n();
  const double h = q.h();
  if (sup_speed(q) >= 1.0)
    throw std::invalid_argument("action_cogradient: infeasible trajectory");
  const bool with_w = !W.trivial();
  // per-element quantities
  std::vector<vec3> p(n), wm(n), em(n), gv(n);
  for (int i = 0; i < n; ++i) {
    vec3 d = q.d(i), m = q.mid(i);
    p[i] = momentum_of(d);
    gv[i] = V.gradient(m);
    if (with_w) {
      wm[i] = W.value(m);
      em[i] = script_E(W, m, d);
    }
  }
  std::vector<vec3> g(n);
  for (int j = 0; j < n; ++j) {
    int jm = (j + n - 1) % n;
    vec3 gj = p[jm] - p[j] - 0.5 * h * (gv[jm] + gv[j]);
    if (with_w) gj += wm[jm] - wm[j] + 0.5 * h * (em[jm] + em[j]);
    g[j] = gj;
  }
  return g;
}

block_tridiag action_hessian(const periodic_trajectory &q, const electric_potential &V,
                             const magnetic_potential &W) {
  const int n = q.n();
  const double h = q.h();
  if (!V.hessian) throw std::invalid_argument("action_hessian: potential lacks a hessian");
  const bool with_w = !W.trivial();
  if (with_w && !W.second_derivative)
    throw std::invalid_argument("action_hessian: magnetic potential lacks second_derivative");
  block_tridiag hess;
  hess.diag.assign(n, mat3::zero());
  hess.upper.assign(n, mat3::zero());
  for (int i = 0; i < n; ++i) {
    int ip = (i + 1) % n;
    vec3 d = q.d(i), m = q.mid(i);
    double s = norm2(d);
    if (s >= 1.0) throw std::invalid_argument("action_hessian: infeasible trajectory");
    double inv = 1.0 / std::sqrt(1.0 - s);
    // d phi = (I + d d^T/(1-s)) / sqrt(1-s)
    mat3 dphi = inv * mat3::identity();
    dphi += (inv / (1.0 - s)) * outer(d, d);
    mat3 pblk = (1.0 / h) * dphi;
    mat3 eblk = (-0.25 * h) * V.hessian(m);
    mat3 du = pblk + eblk, dv = pblk + eblk, uv = (-1.0) * pblk + eblk;
    if (with_w) {
      mat3 j = W.jacobian(m);
      mat3 jsym = 0.5 * (j + transpose(j));
      mat3 janti = 0.5 * (transpose(j) - j);
      auto wd2 = W.second_derivative(m);
      mat3 t = mat3::zero();
      for (int k = 0; k < 3; ++k) t += d[k] * wd2[k];
      mat3 t4 = (0.25 * h) * t;
      du += (-1.0) * jsym + t4;
      dv += jsym + t4;
      uv += janti + t4;
    }
    hess.diag[i] += du;
    hess.diag[ip] += dv;
    hess.upper[i] += uv;
  }
  return hess;
}

block_tridiag h1_gram(int node_count) {
  const double h = two_pi / node_count;
  block_tridiag a;
  a.diag.assign(node_count, (h + 2.0 / h) * mat3::identity());
  a.upper.assign(node_count, (-1.0 / h) * mat3::identity());
  return a;
}

periodic_trajectory riesz_representative(const std::vector<vec3> &cograd, int node_count) {
  const double h = two_pi / node_count;
  periodic_trajectory u(node_count);
  std::vector<double> rhs(node_count);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < node_count; ++i) rhs[i] = cograd[i][c];
    auto x = cyclic_tridiag_solve(h + 2.0 / h, -1.0 / h, rhs);
    for (int i = 0; i < node_count; ++i) u.node[i][c] = x[i];
  }
  return u;
}

} // namespace lfe
