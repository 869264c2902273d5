// acceptance gauntlet: each criterion prints one [PASS]/[FAIL] line with the
// measured numbers; --criterion k runs a single one; exit 1 when any executed
// criterion fails

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lfe/action.hpp"
#include "lfe/bm_solver.hpp"
#include "lfe/config.hpp"
#include "lfe/moreau.hpp"
#include "lfe/orbit_search.hpp"
#include "lfe/potentials.hpp"
#include "lfe/rng.hpp"
#include "lfe/trajectory.hpp"
#include "lfe/verify.hpp"

using namespace lfe;
namespace fs = std::filesystem;

namespace {

using clock_point = std::chrono::steady_clock::time_point;

clock_point tick() { return std::chrono::steady_clock::now(); }

double seconds_since(clock_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string format(const char *fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

forcing cosine_forcing(int n, double a) {
  forcing f(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) f[static_cast<size_t>(i)] = {a * std::cos(two_pi * i / n), 0, 0};
  return f;
}

forcing random_forcing(int n, rng &gen) {
  forcing f(static_cast<size_t>(n));
  for (int c = 0; c < 3; ++c) {
    for (int j = 1; j <= 3; ++j) {
      double ac = gen.uniform(-1.0, 1.0) / (1.0 + j);
      double bc = gen.uniform(-1.0, 1.0) / (1.0 + j);
      for (int i = 0; i < n; ++i) {
        double t = two_pi * i / n;
        double v = ac * std::cos(j * t) + bc * std::sin(j * t);
        if (c == 0) f[static_cast<size_t>(i)].x += v;
        if (c == 1) f[static_cast<size_t>(i)].y += v;
        if (c == 2) f[static_cast<size_t>(i)].z += v;
      }
    }
  }
  return f;
}

periodic_trajectory circle_xy(double rho, int n) {
  periodic_trajectory q(n);
  for (int i = 0; i < n; ++i) {
    double t = two_pi * i / n;
    q.node[static_cast<size_t>(i)] = {rho * std::cos(t), rho * std::sin(t), 0.0};
  }
  return q;
}

void radius_range(const periodic_trajectory &q, double &rmin, double &rmax) {
  rmin = 1e30;
  rmax = 0;
  for (int i = 0; i < q.n(); ++i) {
    double r = norm(q.node[static_cast<size_t>(i)]);
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
}

std::string slurp(const fs::path &p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// 1. closed-form cosine subproblem: step count, residual size and decay,
//    chord match against a sin t / sqrt(1 + a^2 sin^2 t), under one second
bool criterion_1(std::string &detail) {
  clock_point t0 = tick();
  const double a = 0.5;
  const int grids[4] = {128, 256, 512, 1024};
  double res[4];
  bool converged = true;
  int iters512 = 0;
  subproblem_solution s512;
  for (int k = 0; k < 4; ++k) {
    subproblem_solution sol = solve_subproblem(cosine_forcing(grids[k], a), 1e-10);
    converged = converged && sol.converged;
    res[k] = sol.ode_residual;
    if (grids[k] == 512) {
      iters512 = sol.newton_iterations;
      s512 = sol;
    }
  }
  double worst_chord = 0;
  {
    int n = 512;
    double h = two_pi / n;
    for (int i = 0; i < n; ++i) {
      double tm = (i + 0.5) * h;
      double s = a * std::sin(tm);
      vec3 exact{s / std::sqrt(1.0 + s * s), 0, 0};
      worst_chord = std::max(worst_chord, norm(s512.q_f.d(i) - exact));
    }
  }
  double r01 = res[0] / res[1], r12 = res[1] / res[2], r23 = res[2] / res[3];
  double secs = seconds_since(t0);
  bool ok = converged && iters512 <= 20 && res[2] <= 1e-3;
  ok = ok && r01 > 3.2 && r01 < 4.8 && r12 > 3.2 && r12 < 4.8 && r23 > 3.2 && r23 < 4.8;
  ok = ok && worst_chord <= 1e-4 && secs < 1.0;
  detail = format("newton=%d residual=%.2e decay=%.2f/%.2f/%.2f chord=%.2e time=%.2fs",
                  iters512, res[2], r01, r12, r23, worst_chord, secs);
  return ok;
}

// 2. uniqueness: both Newton starts land on the same solution
bool criterion_2(std::string &detail) {
  rng gen(rng::mix(42, 0x02));
  const int n = 256;
  double worst = 0;
  bool converged = true;
  for (int trial = 0; trial < 20; ++trial) {
    forcing f = random_forcing(n, gen);
    subproblem_solution s0 = solve_subproblem(f, 1e-12, vec3{0, 0, 0});
    subproblem_solution s1 = solve_subproblem(f, 1e-12, vec3{5, 5, 5});
    converged = converged && s0.converged && s1.converged;
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, norm(s0.q_f.node[static_cast<size_t>(i)] -
                                   s1.q_f.node[static_cast<size_t>(i)]));
  }
  bool ok = converged && worst <= 1e-8;
  detail = format("starts {0,(5,5,5)} on 20 forcings, sup distance %.2e", worst);
  return ok;
}

// 3. envelope sandwich on a random feasible battery
bool criterion_3(std::string &detail) {
  electric_potential V = make_arctan_potential(5.0);
  magnetic_potential W = make_sine_magnetic(0.1);
  convexity_budget b = alpha_bound(V, W);
  rng gen(rng::mix(42, 0x03));
  const int n = 128;
  const double lower = -two_pi * (V.l_star + W.c0) - 1e-6;
  bool ok = true;
  double min_lo = 1e30, min_hi = 1e30;
  for (int trial = 0; trial < 100; ++trial) {
    periodic_trajectory q = random_feasible_trajectory(n, gen.uniform(0.2, 0.8), gen);
    regularization_state st = prox(q, V, W, b, 1e-10);
    double upper = evaluate_action(q, V, W).total + 1e-6;
    ok = ok && st.converged && st.i_eps >= lower && st.i_eps <= upper;
    min_lo = std::min(min_lo, st.i_eps - lower);
    min_hi = std::min(min_hi, upper - st.i_eps);
  }
  detail = format("100 trajectories, slack above floor %.3e, below action %.3e", min_lo, min_hi);
  return ok;
}

// 4. proximal identity I*(gamma) - I_eps + ||q - gamma||^2 / eps = 0
bool criterion_4(std::string &detail) {
  electric_potential V = make_arctan_potential(5.0);
  magnetic_potential W = make_sine_magnetic(0.1);
  convexity_budget b = alpha_bound(V, W);
  rng gen(rng::mix(42, 0x03)); // same battery as criterion 3
  const int n = 128;
  bool ok = true;
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    periodic_trajectory q = random_feasible_trajectory(n, gen.uniform(0.2, 0.8), gen);
    regularization_state st = prox(q, V, W, b, 1e-10);
    double dist = h1_norm(lin_comb(1.0, q, -1.0, st.gamma_q));
    double identity =
        std::abs(evaluate_action(st.gamma_q, V, W).total - st.i_eps + dist * dist / b.epsilon);
    ok = ok && st.converged;
    worst = std::max(worst, identity);
  }
  ok = ok && worst <= 1e-5;
  detail = format("worst identity defect %.2e over 100 trajectories", worst);
  return ok;
}

// 5. envelope gradient against directional finite differences
bool criterion_5(std::string &detail) {
  electric_potential V = make_arctan_potential(5.0);
  magnetic_potential W = make_sine_magnetic(0.1);
  convexity_budget b = alpha_bound(V, W);
  rng gen(rng::mix(42, 0x05));
  const int n = 128;
  const double t = 1e-5;
  bool ok = true;
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    periodic_trajectory q = random_feasible_trajectory(n, gen.uniform(0.2, 0.6), gen);
    periodic_trajectory d = random_feasible_trajectory(n, 0.4, gen);
    d = lin_comb(1.0 / h1_norm(d), d, 0.0, d);
    regularization_state st = prox(q, V, W, b, 1e-10);
    regularization_state sp = prox(lin_comb(1.0, q, t, d), V, W, b, 1e-10);
    regularization_state sm = prox(lin_comb(1.0, q, -t, d), V, W, b, 1e-10);
    double fd = (sp.i_eps - sm.i_eps) / (2.0 * t);
    double ip = h1_inner(st.grad, d);
    double rel = std::abs(fd - ip) / std::max({std::abs(fd), std::abs(ip), 1e-8});
    ok = ok && st.converged && sp.converged && sm.converged;
    worst = std::max(worst, rel);
  }
  ok = ok && worst <= 1e-4;
  detail = format("worst relative gradient error %.2e over 20 pairs", worst);
  return ok;
}

// 6. grid-shift invariance of the envelope
bool criterion_6(std::string &detail) {
  electric_potential V = make_arctan_potential(5.0);
  magnetic_potential W = make_sine_magnetic(0.1);
  convexity_budget b = alpha_bound(V, W);
  rng gen(rng::mix(42, 0x06));
  const int n = 128;
  bool ok = true;
  double worst = 0;
  for (int trial = 0; trial < 10; ++trial) {
    periodic_trajectory q = random_feasible_trajectory(n, gen.uniform(0.2, 0.7), gen);
    regularization_state st = prox(q, V, W, b, 1e-10);
    ok = ok && st.converged;
    for (int s = 0; s < 10; ++s) {
      int k = 1 + static_cast<int>(gen.uniform(0.0, 1.0) * (n - 1));
      if (k >= n) k = n - 1;
      regularization_state sh = prox(shift(q, two_pi * k / n), V, W, b, 1e-10);
      ok = ok && sh.converged;
      worst = std::max(worst, std::abs(sh.i_eps - st.i_eps));
    }
  }
  ok = ok && worst <= 1e-6;
  detail = format("worst shift defect %.2e over 10x10", worst);
  return ok;
}

// 7. discrete Wirtinger inequality on the mode-m subspaces
bool criterion_7(std::string &detail) {
  rng gen(rng::mix(42, 0x07));
  const int n = 256;
  double worst = 1e30;
  for (int m = 1; m <= 3; ++m) {
    for (int trial = 0; trial < 1000; ++trial) {
      fourier_trajectory f = random_zm_boundary(m, 0.5, gen);
      periodic_trajectory q = from_fourier(f, n);
      double slack = m * m * l2_norm2(q) - deriv_l2_norm2(q);
      worst = std::min(worst, slack);
    }
  }
  bool ok = worst >= -1e-10;
  detail = format("min of m^2||q||^2 - ||q'||^2 is %.3e over 3x1000", worst);
  return ok;
}

// 8. boundary negativity at lambda = 2 Lambda_1 plus the small-lambda control
bool criterion_8(std::string &detail) {
  magnetic_potential W0 = make_zero_magnetic();
  lambda_estimate est = estimate_lambda_m(1, 0.5, make_arctan_potential(1.0), W0);
  double lam = 2.0 * est.value;
  negativity_report neg =
      verify_negativity(1, 0.5, make_arctan_potential(lam), W0, 1000, 42, 256);
  negativity_report control =
      verify_negativity(1, 0.5, make_arctan_potential(0.05), W0, 1000, 42, 256);
  bool ok = neg.violations == 0 && control.violations >= 1;
  detail = format("lambda=%.6g violations=%d/1000 worst_margin=%.4g (bound %.6g), "
                  "control violations=%d/1000",
                  lam, neg.violations, neg.margin, neg.bound, control.violations);
  return ok;
}

// 9. circular orbit reproduction from a perturbed start
bool criterion_9(std::string &detail) {
  clock_point t0 = tick();
  electric_potential V = make_arctan_potential(50.0);
  magnetic_potential W0 = make_zero_magnetic();
  convexity_budget b = alpha_bound(V, W0);
  double rho_star = circular_orbit_radius(50.0, 1).value();
  search_options opt;
  opt.node_count = 256;
  rng gen(rng::mix(42, 0x09));
  descend_result dr = descend(circle_xy(1.1 * rho_star, 256), V, W0, b, {1, 0, 0}, opt, gen);
  double secs = seconds_since(t0);
  if (!dr.promoted) {
    detail = format("descend failed: %s", dr.failure.c_str());
    return false;
  }
  double rmin, rmax;
  radius_range(dr.orbit.representative, rmin, rmax);
  double rerr = std::max(std::abs(rmin - rho_star), std::abs(rmax - rho_star));
  bool ok = dr.orbit.grad_norm <= 1e-7 && rerr <= 1e-4 && dr.orbit.ode_res <= 1e-6 &&
            dr.orbit.shooting <= 1e-5 && dr.orbit.level < 0 && secs < 60.0;
  detail = format("grad=%.1e radius_err=%.1e ode=%.1e shoot=%.1e level=%.6f time=%.1fs",
                  dr.orbit.grad_norm, rerr, dr.orbit.ode_res, dr.orbit.shooting,
                  dr.orbit.level, secs);
  return ok;
}

// 10. multiplicity: structured plus random starts yield three separated orbits
bool criterion_10(std::string &detail) {
  clock_point t0 = tick();
  electric_potential V = make_arctan_potential(50.0);
  magnetic_potential W0 = make_zero_magnetic();
  search_options opt;
  opt.node_count = 256;
  orbit_set set = multi_start(1, 0.5, V, W0, 9, 42, opt);
  double secs = seconds_since(t0);
  int count = static_cast<int>(set.orbits.size());
  double worst_grad = 0, worst_ode = 0, worst_shoot = 0, worst_level = -1e30;
  for (const critical_orbit &o : set.orbits) {
    worst_grad = std::max(worst_grad, o.grad_norm);
    worst_ode = std::max(worst_ode, o.ode_res);
    worst_shoot = std::max(worst_shoot, o.shooting);
    worst_level = std::max(worst_level, o.level);
  }
  double min_dist = 1e30;
  for (size_t i = 0; i < set.orbits.size(); ++i)
    for (size_t j = i + 1; j < set.orbits.size(); ++j)
      min_dist = std::min(min_dist, orbit_distance(set.orbits[i].representative,
                                                   set.orbits[j].representative));
  bool ok = count >= 3 && min_dist > 1e-2 && worst_grad <= 1e-7 && worst_ode <= 1e-6 &&
            worst_shoot <= 1e-5 && worst_level < 0 && secs < 600.0;
  detail = format("orbits=%d min_distance=%.2e grad<=%.1e ode<=%.1e shoot<=%.1e time=%.0fs",
                  count, count >= 2 ? min_dist : 0.0, worst_grad, worst_ode, worst_shoot, secs);
  return ok;
}

// 11. the magnetic term does not break the descent
bool criterion_11(std::string &detail) {
  clock_point t0 = tick();
  electric_potential V = make_arctan_potential(50.0);
  magnetic_potential W = make_sine_magnetic(0.05);
  convexity_budget b = alpha_bound(V, W);
  double rho_star = circular_orbit_radius(50.0, 1).value();
  search_options opt;
  opt.node_count = 256;
  rng gen(rng::mix(42, 0x0b));
  descend_result dr = descend(circle_xy(1.1 * rho_star, 256), V, W, b, {1, 0, 0}, opt, gen);
  double secs = seconds_since(t0);
  if (!dr.promoted) {
    detail = format("descend failed: %s", dr.failure.c_str());
    return false;
  }
  bool ok = dr.orbit.grad_norm <= 1e-7 && dr.orbit.ode_res <= 1e-6 &&
            dr.orbit.shooting <= 1e-5 && dr.orbit.level < 0;
  detail = format("grad=%.1e ode=%.1e shoot=%.1e level=%.6f time=%.1fs", dr.orbit.grad_norm,
                  dr.orbit.ode_res, dr.orbit.shooting, dr.orbit.level, secs);
  return ok;
}

// 12. the full search twice with one seed, reports compared byte for byte
bool criterion_12(std::string &detail) {
  clock_point t0 = tick();
  fs::path base = "acceptance_determinism";
  fs::remove_all(base);
  run_config c;
  c.command = "solve";
  c.lambda = 50.0;
  c.m = 1;
  c.r = 0.5;
  c.nodes = 256;
  c.starts = 9;
  c.seed = 42;
  c.out_dir = (base / "a").string();
  int rc1 = run(c);
  c.out_dir = (base / "b").string();
  int rc2 = run(c);
  std::string ra = slurp(base / "a" / "report.json");
  std::string rb = slurp(base / "b" / "report.json");
  bool identical = !ra.empty() && ra == rb;
  fs::remove_all(base);
  double secs = seconds_since(t0);
  bool ok = rc1 == 0 && rc2 == 0 && identical;
  detail = format("exit=%d/%d report bytes %zu, identical=%s, time=%.0fs", rc1, rc2, ra.size(),
                  identical ? "yes" : "no", secs);
  return ok;
}

} // namespace

int main(int argc, char **argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  struct entry {
    int id;
    bool (*fn)(std::string &);
  };
  const entry table[] = {{1, criterion_1}, {2, criterion_2},   {3, criterion_3},
                         {4, criterion_4}, {5, criterion_5},   {6, criterion_6},
                         {7, criterion_7}, {8, criterion_8},   {9, criterion_9},
                         {10, criterion_10}, {11, criterion_11}, {12, criterion_12}};
  int failures = 0, ran = 0;
  for (const entry &e : table) {
    if (only != 0 && e.id != only) continue;
    ++ran;
    std::string detail;
    bool ok = false;
    try {
      ok = e.fn(detail);
    } catch (const std::exception &ex) {
      detail = std::string("exception: ") + ex.what();
    }
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", e.id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (only == 0) std::printf("%d/%d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
