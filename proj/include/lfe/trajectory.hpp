#pragma once
#include <string>
#include <vector>

#include "lfe/fourier.hpp"
#include "lfe/rng.hpp"
#include "lfe/vec3.hpp"

namespace lfe {

// 2pi-periodic piecewise-linear curve in R^3, values at t_i = 2pi i/N,
// wraparound q_N == q_0 is structural.
struct periodic_trajectory {
  std::vector<vec3> node;

  periodic_trajectory() = default;
  explicit periodic_trajectory(int n) : node(n) {}

  int n() const { return int(node.size()); }
  double h() const { return two_pi / double(node.size()); }

  const vec3 &at(int i) const { return node[wrap(i)]; }
  // element derivative on [t_i, t_{i+1}]
  vec3 d(int i) const { return (node[wrap(i + 1)] - node[wrap(i)]) * (1.0 / h()); }
  // element midpoint value
  vec3 mid(int i) const { return 0.5 * (node[wrap(i)] + node[wrap(i + 1)]); }
  // piecewise-linear evaluation with wraparound
  vec3 eval(double t) const;

  int wrap(int i) const {
    int n_ = n();
    i %= n_;
    return i < 0 ? i + n_ : i;
  }
};

vec3 mean(const periodic_trajectory &q);

// discrete H^1 inner product: trapezoid L^2 over nodes plus h*sum d_i(q).d_i(r)
double h1_inner(const periodic_trajectory &q, const periodic_trajectory &r);
double h1_norm(const periodic_trajectory &q);
// trapezoid L^2 quantities used by the Wirtinger check
double l2_norm2(const periodic_trajectory &q);
double deriv_l2_norm2(const periodic_trajectory &q);
// C-norm: sup over nodes
double sup_norm(const periodic_trajectory &q);

double sup_speed(const periodic_trajectory &q);
bool feasible(const periodic_trajectory &q, double slack);

// scales the deviation from the mean by the largest s in (0,1] that makes the
// result feasible at the given slack; identity on feasible inputs
periodic_trajectory project_feasible(const periodic_trajectory &q, double slack);

// time shift (L(theta)q)(t) = q(t+theta); exact index rotation on grid multiples
periodic_trajectory shift(const periodic_trajectory &q, double theta);

// min over time shifts of the nodal sup distance; N-point grid scan followed
// by golden-section refinement of the best bracket to 1e-6 in theta
double orbit_distance(const periodic_trajectory &q, const periodic_trajectory &r);

bool is_fixed_point(const periodic_trajectory &q, double tol);

// elementwise arithmetic helpers
periodic_trajectory lin_comb(double a, const periodic_trajectory &q, double b,
                             const periodic_trajectory &r);

fourier_trajectory to_fourier(const periodic_trajectory &q, int mode_count);
periodic_trajectory from_fourier(const fourier_trajectory &f, int node_count);

// sup_t |f(t)| of a trigonometric polynomial (coarse scan + golden refinement)
double trig_sup_norm(const fourier_trajectory &f);
// W^{1,inf} norm sup|q| + sup|q'| of the underlying trigonometric polynomial
double w1inf_norm(const fourier_trajectory &f);

// zero-mean trigonometric polynomials of degree <= m and their r-ball
struct zm_disk {
  int m = 1;
  double r = 0.5;
  int dim() const { return 6 * m; }
  int index_of_boundary() const { return 3 * m; }
};

enum class coord_plane { xy, yz, zx };

// the circle rho(cos jt e_a + sin jt e_b) with rho = r/(1+j), a boundary
// point of the Z_m disk: sup|q| + sup|q'| = r exactly
periodic_trajectory zm_boundary_point(int m, double r, coord_plane plane, int j,
                                      int node_count);

// random Z_m element with normal coefficients, rescaled so the W^{1,inf}
// norm of the trigonometric polynomial equals r
fourier_trajectory random_zm_boundary(int m, double r, rng &gen);

// lower estimate of inf ||q||_{L^2} / ||q||_{1,inf} over Z_m \ {0} by
// deterministic multi-start subgradient descent plus coordinate refinement;
// independent of r (the ratio is 0-homogeneous)
double gamma_m_constant(int m, double r);

// random trigonometric loop (modes <= 4, decaying coefficients) whose
// deviation from its mean is rescaled so sup |q'| = target_speed
periodic_trajectory random_feasible_trajectory(int node_count, double target_speed, rng &gen);

// CSV with header t,q1,q2,q3, one row per node, final wrap row omitted
void write_trajectory_csv(const std::string &path, const periodic_trajectory &q);
periodic_trajectory read_trajectory_csv(const std::string &path);

} // namespace lfe
