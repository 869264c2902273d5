#pragma once
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "lfe/rng.hpp"
#include "lfe/vec3.hpp"

namespace lfe {

// Electric potential V with declared global bounds. V is C^2, V(0)=0,
// V > 0 away from 0, V(q) >= floor_lambda |q|^2 for |q| <= floor_r0,
// V -> l_star at infinity, sup ||V''|| <= hessian_bound.
struct electric_potential {
  std::string name;
  double param = 0;
  std::function<double(const vec3 &)> value;
  std::function<vec3(const vec3 &)> gradient;
  std::function<mat3(const vec3 &)> hessian; // may be empty
  double hessian_bound = 0;                  // H_V
  double l_star = 0;
  double floor_lambda = 0;
  double floor_r0 = 0;
};

// Magnetic potential W with bounded derivatives: c0 = sup|W|,
// c1 = sup||W'||, c2 = sup||W''||.
struct magnetic_potential {
  std::string name;
  double param = 0;
  std::function<vec3(const vec3 &)> value;
  std::function<mat3(const vec3 &)> jacobian;
  // second_derivative(q)[k] is the Hessian of component W_k
  std::function<std::array<mat3, 3>(const vec3 &)> second_derivative; // may be empty
  double c0 = 0, c1 = 0, c2 = 0;

  bool trivial() const { return c0 == 0 && c1 == 0 && c2 == 0; }
};

// E(q) + v x B(q) with E = -grad V and B = curl W read off the Jacobian.
// beta_over_m0 is the uniform rescaling hook for physical constants.
vec3 lorentz_force(const electric_potential &V, const magnetic_potential &W, const vec3 &q,
                   const vec3 &v, double beta_over_m0 = 1.0);

vec3 curl_w(const magnetic_potential &W, const vec3 &q);

// component i equals p . dW/dq_i, i.e. the transpose-Jacobian action
vec3 script_E(const magnetic_potential &W, const vec3 &q, const vec3 &p);

// V(q) = arctan(lambda |q|^2); quadratic floor coefficient lambda/2 with its
// radius found by bisection, hessian bound from a radial scan
electric_potential make_arctan_potential(double lambda);

// W(q) = kappa (sin q2, sin q3, sin q1)
magnetic_potential make_sine_magnetic(double kappa);

magnetic_potential make_zero_magnetic();

// V(q) = lambda |q|^2, unbounded; unit tests only
electric_potential make_quadratic_test_potential(double lambda);

struct consistency_check {
  std::string name;
  double worst = 0;
  double threshold = 0;
  bool ok = true;
};

struct consistency_report {
  std::vector<consistency_check> checks;
  bool all_ok() const {
    for (const auto &c : checks)
      if (!c.ok) return false;
    return true;
  }
};

// samples all declared invariants; violations are reported, never thrown
consistency_report check_consistency(const electric_potential &V,
                                     const magnetic_potential &W, int sample_count,
                                     std::uint64_t seed, double R_far = 100.0,
                                     double tol_far = 1e-2);

} // namespace lfe
