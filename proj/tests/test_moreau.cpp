#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "lfe/action.hpp"
#include "lfe/moreau.hpp"
#include "lfe/rng.hpp"

using namespace lfe;

TEST_CASE("convexity budget formulas") {
  electric_potential V5 = make_arctan_potential(5.0);
  magnetic_potential W0 = make_zero_magnetic();
  convexity_budget b = alpha_bound(V5, W0);
  CHECK(b.alpha1 == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(b.alpha2 == 0.0);
  CHECK(b.alpha == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(b.epsilon == doctest::Approx(0.1).epsilon(1e-15));

  magnetic_potential W = make_sine_magnetic(0.1);
  convexity_budget bw = alpha_bound(V5, W);
  CHECK(bw.alpha2 == doctest::Approx(0.15).epsilon(1e-15)); // c1 + c2/2
  CHECK(bw.alpha == doctest::Approx(5.15).epsilon(1e-15));
  CHECK(bw.epsilon == doctest::Approx(0.5 / 5.15).epsilon(1e-15));

  electric_potential V50 = make_arctan_potential(50.0);
  convexity_budget b50 = alpha_bound(V50, W0);
  CHECK(b50.alpha == doctest::Approx(50.0).epsilon(1e-15));
  CHECK(b50.epsilon == doctest::Approx(0.01).epsilon(1e-15));

  electric_potential broken = V5;
  broken.hessian_bound = 0;
  CHECK_THROWS_AS(alpha_bound(broken, W0), std::invalid_argument);
}

TEST_CASE("prox rejects a budget outside the convexity window") {
  electric_potential V = make_arctan_potential(5.0);
  magnetic_potential W0 = make_zero_magnetic();
  periodic_trajectory q;
  q.node.assign(32, vec3{});
  convexity_budget bad = alpha_bound(V, W0);
  bad.epsilon = 1.0 / bad.alpha; // closes the window
  CHECK_THROWS_AS(prox(q, V, W0, bad, 1e-8), std::invalid_argument);
  convexity_budget b = alpha_bound(V, W0);
  CHECK_THROWS_AS(prox(q, V, W0, b, 0.0), std::invalid_argument);
}

TEST_CASE("origin is a fixed point of the prox map") {
  electric_potential V = make_arctan_potential(5.0);
  magnetic_potential W = make_sine_magnetic(0.1); // W(0)=0, autonomous
  convexity_budget b = alpha_bound(V, W);
  periodic_trajectory q;
  q.node.assign(64, vec3{});
  regularization_state st = prox(q, V, W, b, 1e-10);
  CHECK(st.converged);
  CHECK(st.inner_iterations == 0);
  CHECK(sup_norm(st.gamma_q) == 0.0);
  CHECK(st.i_eps == 0.0);
  CHECK(st.grad_norm == 0.0);
}

TEST_CASE("gradient is assembled from the prox point exactly") {
  electric_potential V = make_arctan_potential(5.0);
  magnetic_potential W0 = make_zero_magnetic();
  convexity_budget b = alpha_bound(V, W0);
  rng gen(401);
  periodic_trajectory q = random_feasible_trajectory(64, 0.5, gen);
  regularization_state st = prox(q, V, W0, b, 1e-9);
  REQUIRE(st.converged);
  periodic_trajectory rebuilt =
      lin_comb(2.0 / b.epsilon, q, -2.0 / b.epsilon, st.gamma_q);
  CHECK(sup_norm(lin_comb(1.0, st.grad, -1.0, rebuilt)) == 0.0);
  CHECK(st.grad_norm == doctest::Approx(h1_norm(st.grad)).epsilon(1e-15));
}

TEST_CASE("envelope sandwich holds on a random battery") {
  electric_potential V = make_arctan_potential(5.0);
  magnetic_potential W = make_sine_magnetic(0.1);
  convexity_budget b = alpha_bound(V, W);
  // I* = Psi* + F* with Psi* >= 0 and F* >= -2 pi (sup V + c0 sup|q'|)
  double lower = -two_pi * (V.l_star + W.c0);
  rng gen(402);
  for (int trial = 0; trial < 100; ++trial) {
    periodic_trajectory q = random_feasible_trajectory(64, gen.uniform(0.2, 0.8), gen);
    regularization_state st = prox(q, V, W, b, 1e-8);
    REQUIRE(st.converged);
    action_breakdown a = evaluate_action(q, V, W);
    REQUIRE(a.finite);
    CHECK(st.i_eps <= a.total + 1e-6);
    CHECK(st.i_eps >= lower - 1e-6);
    // the prox point stays feasible
    CHECK(sup_speed(st.gamma_q) < 1.0);
  }
}

TEST_CASE("two warm starts land on the same prox point") {
  electric_potential V = make_arctan_potential(5.0);
  magnetic_potential W = make_sine_magnetic(0.1);
  convexity_budget b = alpha_bound(V, W);
  rng gen(403);
  double inner_tol = 1e-8;
  for (int trial = 0; trial < 5; ++trial) {
    periodic_trajectory q = random_feasible_trajectory(64, 0.5, gen);
    regularization_state s0 = prox(q, V, W, b, inner_tol);
    regularization_state s1 =
        prox_from(q, project_feasible(lin_comb(2.0, q, 0.0, q), 1e-6), V, W, b, inner_tol);
    REQUIRE(s0.converged);
    REQUIRE(s1.converged);
    periodic_trajectory diff = lin_comb(1.0, s0.gamma_q, -1.0, s1.gamma_q);
    CHECK(h1_norm(diff) <= 10.0 * inner_tol);
    CHECK(std::fabs(s0.i_eps - s1.i_eps) <= 10.0 * inner_tol);
  }
}

TEST_CASE("proximal iteration descends by the envelope identity margin") {
  electric_potential V = make_arctan_potential(5.0);
  magnetic_potential W0 = make_zero_magnetic();
  convexity_budget b = alpha_bound(V, W0);
  rng gen(404);
  double inner_tol = 1e-9;
  periodic_trajectory q = random_feasible_trajectory(64, 0.6, gen);
  for (int step = 0; step < 30; ++step) {
    regularization_state st = prox(q, V, W0, b, inner_tol);
    REQUIRE(st.converged);
    double before = evaluate_action(q, V, W0).total;
    double after = evaluate_action(st.gamma_q, V, W0).total;
    periodic_trajectory d = lin_comb(1.0, q, -1.0, st.gamma_q);
    double dist2 = h1_inner(d, d);
    CHECK(after <= before - dist2 / b.epsilon + 10.0 * inner_tol);
    q = st.gamma_q;
    if (st.grad_norm < 1e-10) break;
  }
}

TEST_CASE("property battery passes at production tolerances") {
  electric_potential V = make_arctan_potential(5.0);
  magnetic_potential W = make_sine_magnetic(0.1);
  convexity_budget b = alpha_bound(V, W);
  rng gen(405);
  for (int trial = 0; trial < 5; ++trial) {
    periodic_trajectory q = random_feasible_trajectory(128, gen.uniform(0.2, 0.8), gen);
    el_report rep = check_el_properties(q, V, W, b, 1e-5, 1e-10, gen);
    CHECK(rep.all_ok());
    if (!rep.all_ok())
      for (const auto &c : rep.checks)
        if (!c.ok) MESSAGE(c.name, " worst=", c.worst, " threshold=", c.threshold);
    // the battery names stay stable
    bool saw_el4 = false, saw_el5 = false;
    for (const auto &c : rep.checks) {
      if (c.name == "el4_identity") saw_el4 = true;
      if (c.name == "el5_subgradient") saw_el5 = true;
    }
    CHECK(saw_el4);
    CHECK(saw_el5);
  }
}

TEST_CASE("sloppy inner solves are caught by the value identity") {
  electric_potential V = make_arctan_potential(5.0);
  magnetic_potential W = make_sine_magnetic(0.1);
  convexity_budget b = alpha_bound(V, W);
  rng gen(406);
  // the envelope identity error scales like grad^2 / (2 mu); at inner_tol 1e-2
  // it sits near 1e-6, so the detection threshold must sit below that
  int flagged = 0;
  for (int trial = 0; trial < 3; ++trial) {
    periodic_trajectory q = random_feasible_trajectory(128, 0.5, gen);
    el_report rep = check_el_properties(q, V, W, b, 1e-8, 1e-2, gen);
    CHECK(rep.any_violation());
    for (const auto &c : rep.checks)
      if (c.name == "el4_identity" && !c.ok) ++flagged;
  }
  CHECK(flagged == 3);
}
