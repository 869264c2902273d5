#include "lfe/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace lfe {

vec3 curl_w(const magnetic_potential &W, const vec3 &q) {
  if (W.trivial()) return {};
  mat3 j = W.jacobian(q);
  return {j(2, 1) - j(1, 2), j(0, 2) - j(2, 0), j(1, 0) - j(0, 1)};
}

vec3 lorentz_force(const electric_potential &V, const magnetic_potential &W, const vec3 &q,
                   const vec3 &v, double beta_over_m0) {
  vec3 f = -V.gradient(q);
  if (!W.trivial()) f += cross(v, curl_w(W, q));
  return beta_over_m0 * f;
}

vec3 script_E(const magnetic_potential &W, const vec3 &q, const vec3 &p) {
  if (W.trivial()) return {};
  return matvec(transpose(W.jacobian(q)), p);
}

electric_potential make_arctan_potential(double lambda) {
  if (lambda <= 0) throw std::invalid_argument("arctan potential needs lambda > 0");
  electric_potential V;
  V.name = "arctan";
  V.param = lambda;
  V.value = [lambda](const vec3 &q) { return std::atan(lambda * norm2(q)); };
  V.gradient = [lambda](const vec3 &q) {
    double s = norm2(q);
    double den = 1.0 + lambda * lambda * s * s;
    return (2.0 * lambda / den) * q;
  };
  V.hessian = [lambda](const vec3 &q) {
    // V = f(s), s = |q|^2: Hess = 2 f'(s) I + 4 f''(s) q q^T
    double s = norm2(q);
    double den = 1.0 + lambda * lambda * s * s;
    double fp = lambda / den;
    double fpp = -2.0 * lambda * lambda * lambda * s / (den * den);
    mat3 h = 2.0 * fp * mat3::identity();
    h += 4.0 * fpp * outer(q, q);
    return h;
  };
  V.l_star = 1.5707963267948966192313216916398; // pi/2
  V.floor_lambda = 0.5 * lambda;
  // largest r with arctan(lambda r^2) >= (lambda/2) r^2, bisection on (0, 2/sqrt(lambda)]
  {
    auto g = [lambda](double r) {
      return std::atan(lambda * r * r) - 0.5 * lambda * r * r;
    };
    double lo = 1e-8 / std::sqrt(lambda), hi = 2.0 / std::sqrt(lambda);
    if (g(hi) >= 0) {
      V.floor_r0 = hi;
    } else {
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) >= 0 ? lo : hi) = mid;
      }
      V.floor_r0 = lo;
    }
  }
  // hessian bound by a radial scan; eigenvalues 2 f'(s) and 2 f'(s) + 4 s f''(s)
  {
    double best = 0;
    for (int i = 0; i <= 4000; ++i) {
      double u = 10.0 * i / 4000.0; // u = lambda s
      double den = 1.0 + u * u;
      double e1 = 2.0 * lambda / den;
      double e2 = 2.0 * lambda * (1.0 - 3.0 * u * u) / (den * den);
      best = std::max({best, std::fabs(e1), std::fabs(e2)});
    }
    V.hessian_bound = best;
  }
  return V;
}

magnetic_potential make_sine_magnetic(double kappa) {
  if (kappa < 0) throw std::invalid_argument("sine potential needs kappa >= 0");
  magnetic_potential W;
  W.name = "sine";
  W.param = kappa;
  W.value = [kappa](const vec3 &q) {
    return vec3{kappa * std::sin(q.y), kappa * std::sin(q.z), kappa * std::sin(q.x)};
  };
  W.jacobian = [kappa](const vec3 &q) {
    mat3 j = mat3::zero();
    j(0, 1) = kappa * std::cos(q.y);
    j(1, 2) = kappa * std::cos(q.z);
    j(2, 0) = kappa * std::cos(q.x);
    return j;
  };
  W.second_derivative = [kappa](const vec3 &q) {
    std::array<mat3, 3> h{mat3::zero(), mat3::zero(), mat3::zero()};
    h[0](1, 1) = -kappa * std::sin(q.y);
    h[1](2, 2) = -kappa * std::sin(q.z);
    h[2](0, 0) = -kappa * std::sin(q.x);
    return h;
  };
  W.c0 = kappa * std::sqrt(3.0);
  W.c1 = kappa;
  W.c2 = kappa;
  return W;
}

magnetic_potential make_zero_magnetic() {
  magnetic_potential W;
  W.name = "none";
  W.value = [](const vec3 &) { return vec3{}; };
  W.jacobian = [](const vec3 &) { return mat3::zero(); };
  W.second_derivative = [](const vec3 &) {
    return std::array<mat3, 3>{mat3::zero(), mat3::zero(), mat3::zero()};
  };
  return W;
}

electric_potential make_quadratic_test_potential(double lambda) {
  electric_potential V;
  V.name = "quadratic_stub";
  V.param = lambda;
  V.value = [lambda](const vec3 &q) { return lambda * norm2(q); };
  V.gradient = [lambda](const vec3 &q) { return 2.0 * lambda * q; };
  V.hessian = [lambda](const vec3 &) { return 2.0 * lambda * mat3::identity(); };
  V.hessian_bound = 2.0 * lambda;
  V.l_star = 0; // no asymptote; stub for convexity-budget tests only
  V.floor_lambda = lambda;
  V.floor_r0 = 1e9;
  return V;
}

consistency_report check_consistency(const electric_potential &V,
                                     const magnetic_potential &W, int sample_count,
                                     std::uint64_t seed, double R_far, double tol_far) {
  if (sample_count < 1) throw std::invalid_argument("check_consistency: sample_count >= 1");
  consistency_report rep;
  rng gen(seed);
  auto add = [&rep](const std::string &name, double worst, double threshold) {
    rep.checks.push_back({name, worst, threshold, worst <= threshold});
  };

  // value(0) = 0, gradient(0) = 0
  add("V_zero_at_origin", std::fabs(V.value(vec3{})), 1e-12);
  add("V_gradient_zero_at_origin", norm(V.gradient(vec3{})), 1e-12);

  double worst_pos = 0, worst_floor = 0, worst_far = 0, worst_fd = 0, worst_hess_fd = 0,
         worst_hess_bound = 0;
  const double fd_step = 1e-4;
  for (int k = 0; k < sample_count; ++k) {
    vec3 q = gen.uniform_ball(10.0);
    if (norm(q) > 1e-8) worst_pos = std::max(worst_pos, -V.value(q));
    // quadratic floor inside its radius
    vec3 qf = gen.uniform_ball(std::min(V.floor_r0, 10.0));
    worst_floor = std::max(worst_floor, V.floor_lambda * norm2(qf) - V.value(qf));
    // asymptote
    vec3 dir = gen.normal3();
    if (norm(dir) > 1e-12) {
      vec3 far = (R_far * (1.0 + gen.uniform()) / norm(dir)) * dir;
      worst_far = std::max(worst_far, std::fabs(V.value(far) - V.l_star));
    }
    // gradient against central differences
    vec3 g = V.gradient(q), fd;
    for (int c = 0; c < 3; ++c) {
      vec3 e{};
      e[c] = fd_step;
      fd[c] = (V.value(q + e) - V.value(q - e)) / (2.0 * fd_step);
    }
    double rel = norm(fd - g) / std::max({norm(g), norm(fd), 1.0});
    worst_fd = std::max(worst_fd, rel);
    if (V.hessian) {
      mat3 hh = V.hessian(q), hfd;
      for (int c = 0; c < 3; ++c) {
        vec3 e{};
        e[c] = fd_step;
        vec3 col = (V.gradient(q + e) - V.gradient(q - e)) * (1.0 / (2.0 * fd_step));
        for (int r = 0; r < 3; ++r) hfd(r, c) = col[r];
      }
      worst_hess_fd = std::max(worst_hess_fd,
                               frob_norm(hfd - hh) / std::max(frob_norm(hh), 1.0));
      worst_hess_bound = std::max(worst_hess_bound, spectral_norm(hh) - V.hessian_bound);
    }
  }
  add("V_positive_off_origin", worst_pos, 0.0);
  add("V_quadratic_floor", worst_floor, 1e-12);
  add("V_asymptote", worst_far, tol_far);
  add("V_gradient_fd", worst_fd, 1e-5);
  if (V.hessian) {
    add("V_hessian_fd", worst_hess_fd, 1e-4);
    add("V_hessian_bound", worst_hess_bound, 1e-9);
  }

  if (!W.trivial()) {
    double w0 = 0, w1 = 0, w2 = 0, wfd = 0, w2fd = 0;
    for (int k = 0; k < sample_count; ++k) {
      vec3 q = gen.uniform_ball(10.0);
      w0 = std::max(w0, norm(W.value(q)) - W.c0);
      mat3 j = W.jacobian(q);
      w1 = std::max(w1, spectral_norm(j) - W.c1);
      // jacobian against central differences of the value
      mat3 jfd;
      for (int c = 0; c < 3; ++c) {
        vec3 e{};
        e[c] = fd_step;
        vec3 col = (W.value(q + e) - W.value(q - e)) * (1.0 / (2.0 * fd_step));
        for (int r = 0; r < 3; ++r) jfd(r, c) = col[r];
      }
      wfd = std::max(wfd, frob_norm(jfd - j) / std::max({frob_norm(j), frob_norm(jfd), 1.0}));
      if (W.second_derivative) {
        auto h = W.second_derivative(q);
        vec3 u = gen.normal3(), v = gen.normal3();
        double nu = norm(u), nv = norm(v);
        if (nu > 1e-12 && nv > 1e-12) {
          u = u / nu;
          v = v / nv;
          vec3 form{dot(u, matvec(h[0], v)), dot(u, matvec(h[1], v)),
                    dot(u, matvec(h[2], v))};
          w2 = std::max(w2, norm(form) - W.c2);
        }
        // second derivative against differences of the jacobian
        for (int c = 0; c < 3; ++c) {
          vec3 e{};
          e[c] = fd_step;
          mat3 dj = (W.jacobian(q + e) - W.jacobian(q - e)) * (1.0 / (2.0 * fd_step));
          // dj(r, :) row r should match h[r] column c
          for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s)
              w2fd = std::max(w2fd, std::fabs(dj(r, s) - h[r](s, c)));
        }
      }
    }
    add("W_value_bound", w0, 1e-9);
    add("W_jacobian_bound", w1, 1e-9);
    add("W_jacobian_fd", wfd, 1e-5);
    if (W.second_derivative) {
      add("W_second_derivative_bound", w2, 1e-9);
      add("W_second_derivative_fd", w2fd, 1e-4);
    }
  }
  return rep;
}

} // namespace lfe
