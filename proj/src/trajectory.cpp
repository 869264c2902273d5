#include "lfe/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace lfe {

vec3 periodic_trajectory::eval(double t) const {
  const int n_ = n();
  const double h_ = h();
  double u = std::fmod(t, two_pi);
  if (u < 0) u += two_pi;
  double s = u / h_;
  int i = int(std::floor(s));
  if (i >= n_) i = n_ - 1;
  double frac = s - i;
  return (1.0 - frac) * node[i] + frac * node[(i + 1) % n_];
}

vec3 mean(const periodic_trajectory &q) {
  vec3 m{};
  for (const auto &v : q.node) m += v;
  return m * (1.0 / q.n());
}

static void require_same_n(const periodic_trajectory &q, const periodic_trajectory &r) {
  if (q.n() != r.n()) throw std::invalid_argument("node_count mismatch");
}

double h1_inner(const periodic_trajectory &q, const periodic_trajectory &r) {
  require_same_n(q, r);
  const int n = q.n();
  const double h = q.h();
  double l2 = 0, dd = 0;
  for (int i = 0; i < n; ++i) {
    l2 += dot(q.node[i], r.node[i]);
    dd += dot(q.d(i), r.d(i));
  }
  return h * (l2 + dd);
}

double h1_norm(const periodic_trajectory &q) { return std::sqrt(h1_inner(q, q)); }

double l2_norm2(const periodic_trajectory &q) {
  double s = 0;
  for (const auto &v : q.node) s += norm2(v);
  return q.h() * s;
}

double deriv_l2_norm2(const periodic_trajectory &q) {
  double s = 0;
  for (int i = 0; i < q.n(); ++i) s += norm2(q.d(i));
  return q.h() * s;
}

double sup_norm(const periodic_trajectory &q) {
  double s = 0;
  for (const auto &v : q.node) s = std::max(s, norm(v));
  return s;
}

double sup_speed(const periodic_trajectory &q) {
  double s = 0;
  for (int i = 0; i < q.n(); ++i) s = std::max(s, norm(q.d(i)));
  return s;
}

bool feasible(const periodic_trajectory &q, double slack) {
  return sup_speed(q) <= 1.0 - slack;
}

periodic_trajectory project_feasible(const periodic_trajectory &q, double slack) {
  double sp = sup_speed(q);
  double cap = 1.0 - slack;
  if (sp <= cap) return q;
  double s = (cap / sp) * (1.0 - 1e-14);
  vec3 m = mean(q);
  periodic_trajectory out(q.n());
  for (int i = 0; i < q.n(); ++i) out.node[i] = m + s * (q.node[i] - m);
  return out;
}

periodic_trajectory shift(const periodic_trajectory &q, double theta) {
  const int n = q.n();
  const double h = q.h();
  double u = std::fmod(theta, two_pi);
  if (u < 0) u += two_pi;
  double k = u / h;
  double kr = std::round(k);
  periodic_trajectory out(n);
  if (std::fabs(k - kr) < 1e-9) {
    int ki = int(kr) % n;
    for (int i = 0; i < n; ++i) out.node[i] = q.node[(i + ki) % n];
  } else {
    for (int i = 0; i < n; ++i) out.node[i] = q.eval(i * h + u);
  }
  return out;
}

// continuous sup distance between the piecewise-linear curves q(.+theta) and r;
// attained on the union of both breakpoint families, which keeps the value
// symmetric in (q, r)
static double shifted_sup_dist(const periodic_trajectory &q, const periodic_trajectory &r,
                               double theta, double early_exit_above) {
  const int n = q.n();
  const double h = q.h();
  double best = 0;
  for (int i = 0; i < n; ++i) {
    double v = norm(q.eval(i * h + theta) - r.node[i]);
    if (v > best) best = v;
    v = norm(q.node[i] - r.eval(i * h - theta));
    if (v > best) best = v;
    if (best > early_exit_above) return best;
  }
  return best;
}

double orbit_distance(const periodic_trajectory &q, const periodic_trajectory &r) {
  require_same_n(q, r);
  const int n = q.n();
  const double h = q.h();
  double best = std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (int k = 0; k < n; ++k) {
    double dk = 0;
    bool pruned = false;
    for (int i = 0; i < n; ++i) {
      double v = norm(q.node[(i + k) % n] - r.node[i]);
      if (v > dk) dk = v;
      if (dk >= best) {
        pruned = true;
        break;
      }
    }
    if (!pruned && dk < best) {
      best = dk;
      best_k = k;
    }
  }
  // golden-section refinement around the best grid shift
  double lo = best_k * h - h, hi = best_k * h + h;
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = shifted_sup_dist(q, r, x1, 1e300);
  double f2 = shifted_sup_dist(q, r, x2, 1e300);
  while (b - a > 1e-6) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = shifted_sup_dist(q, r, x1, 1e300);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = shifted_sup_dist(q, r, x2, 1e300);
    }
  }
  return std::min({best, f1, f2});
}

bool is_fixed_point(const periodic_trajectory &q, double tol) {
  vec3 m = mean(q);
  double dev = 0;
  for (const auto &v : q.node) dev = std::max(dev, norm(v - m));
  return dev <= tol;
}

periodic_trajectory lin_comb(double a, const periodic_trajectory &q, double b,
                             const periodic_trajectory &r) {
  require_same_n(q, r);
  periodic_trajectory out(q.n());
  for (int i = 0; i < q.n(); ++i) out.node[i] = a * q.node[i] + b * r.node[i];
  return out;
}

fourier_trajectory to_fourier(const periodic_trajectory &q, int mode_count) {
  return nodes_to_fourier(q.node, mode_count);
}

periodic_trajectory from_fourier(const fourier_trajectory &f, int node_count) {
  periodic_trajectory q;
  q.node = fourier_to_nodes(f, node_count);
  return q;
}

// --- sup norms of trigonometric polynomials ---

static double golden_max_1d(const std::function<double(double)> &g, double a, double b,
                            double tol) {
  const double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = g(x1), f2 = g(x2);
  while (b - a > tol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = g(x2);
    }
  }
  return std::max(f1, f2);
}

// sup_t sqrt(g(t)) with argmax, where g is smooth 2pi-periodic
static double sup_scan(const std::function<double(double)> &g, int degree, double *arg) {
  int k = 96 * (degree + 1);
  double step = two_pi / k;
  std::vector<double> val(k);
  for (int i = 0; i < k; ++i) val[i] = g(i * step);
  double best = -1, best_t = 0;
  for (int i = 0; i < k; ++i) {
    double prev = val[(i + k - 1) % k], next = val[(i + 1) % k];
    if (val[i] >= prev && val[i] >= next) {
      double lo = (i - 1) * step, hi = (i + 1) * step;
      const double gr = 0.6180339887498949;
      double a = lo, b = hi;
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a), f1 = g(x1), f2 = g(x2);
      while (b - a > 1e-11) {
        if (f1 >= f2) {
          b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = g(x1);
        } else {
          a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = g(x2);
        }
      }
      double fx = std::max(f1, f2), tx = 0.5 * (a + b);
      if (fx > best) {
        best = fx;
        best_t = tx;
      }
    }
  }
  if (arg) *arg = best_t;
  return std::sqrt(std::max(0.0, best));
}

static double trig_sup_with_arg(const fourier_trajectory &f, double *arg) {
  auto g = [&f](double t) { return norm2(f.eval(t)); };
  return sup_scan(g, 2 * std::max(1, f.mode_count), arg);
}

static double trig_deriv_sup_with_arg(const fourier_trajectory &f, double *arg) {
  auto g = [&f](double t) { return norm2(f.eval_derivative(t)); };
  return sup_scan(g, 2 * std::max(1, f.mode_count), arg);
}

double trig_sup_norm(const fourier_trajectory &f) { return trig_sup_with_arg(f, nullptr); }

double w1inf_norm(const fourier_trajectory &f) {
  return trig_sup_with_arg(f, nullptr) + trig_deriv_sup_with_arg(f, nullptr);
}

// --- Z_m sampling ---

periodic_trajectory zm_boundary_point(int m, double r, coord_plane plane, int j,
                                      int node_count) {
  if (j < 1 || j > m) throw std::invalid_argument("zm_boundary_point: need 1 <= j <= m");
  int ea, eb;
  switch (plane) {
    case coord_plane::xy: ea = 0; eb = 1; break;
    case coord_plane::yz: ea = 1; eb = 2; break;
    case coord_plane::zx: ea = 2; eb = 0; break;
    default: throw std::invalid_argument("zm_boundary_point: bad plane");
  }
  double rho = r / (1.0 + j);
  periodic_trajectory q(node_count);
  double h = two_pi / node_count;
  for (int i = 0; i < node_count; ++i) {
    vec3 v{};
    v[ea] = rho * std::cos(j * i * h);
    v[eb] = rho * std::sin(j * i * h);
    q.node[i] = v;
  }
  return q;
}

fourier_trajectory random_zm_boundary(int m, double r, rng &gen) {
  fourier_trajectory f;
  f.mode_count = m;
  f.a.resize(m);
  f.b.resize(m);
  for (int j = 0; j < m; ++j) {
    f.a[j] = gen.normal3();
    f.b[j] = gen.normal3();
  }
  double s = r / w1inf_norm(f);
  for (int j = 0; j < m; ++j) {
    f.a[j] *= s;
    f.b[j] *= s;
  }
  return f;
}

// --- embedding constant ---

namespace {

struct zm_coeffs {
  int m;
  std::vector<double> c; // layout: mode j gives a_j at 6(j-1), b_j at 6(j-1)+3

  fourier_trajectory to_fourier() const {
    fourier_trajectory f;
    f.mode_count = m;
    f.a.resize(m);
    f.b.resize(m);
    for (int j = 0; j < m; ++j) {
      f.a[j] = {c[6 * j], c[6 * j + 1], c[6 * j + 2]};
      f.b[j] = {c[6 * j + 3], c[6 * j + 4], c[6 * j + 5]};
    }
    return f;
  }
};

struct ratio_eval {
  double ratio;
  std::vector<double> grad; // of ratio^2
};

double l2_sq(const zm_coeffs &z) {
  double e = 0;
  for (double v : z.c) e += v * v;
  return 3.141592653589793238462643383279 * e;
}

double ratio_only(const zm_coeffs &z) {
  fourier_trajectory f = z.to_fourier();
  double s = w1inf_norm(f);
  if (s <= 0) return 1e300;
  return std::sqrt(l2_sq(z)) / s;
}

ratio_eval ratio_with_grad(const zm_coeffs &z) {
  const double pi = 3.141592653589793238462643383279;
  fourier_trajectory f = z.to_fourier();
  double tq = 0, tv = 0;
  double s_pos = trig_sup_with_arg(f, &tq);
  double s_vel = trig_deriv_sup_with_arg(f, &tv);
  double s = s_pos + s_vel;
  double e = l2_sq(z);
  ratio_eval out;
  out.ratio = std::sqrt(e) / s;
  out.grad.assign(z.c.size(), 0.0);
  vec3 u = f.eval(tq);
  u = (norm(u) > 0) ? u / norm(u) : vec3{1, 0, 0};
  vec3 w = f.eval_derivative(tv);
  w = (norm(w) > 0) ? w / norm(w) : vec3{1, 0, 0};
  double s2 = s * s, s3 = s2 * s;
  for (int j = 0; j < z.m; ++j) {
    double cj = std::cos((j + 1) * tq), sj = std::sin((j + 1) * tq);
    double cv = std::cos((j + 1) * tv), sv = std::sin((j + 1) * tv);
    for (int comp = 0; comp < 3; ++comp) {
      // dS/da_j = cos(j tq) u - j sin(j tv) w, dS/db_j = sin(j tq) u + j cos(j tv) w
      double dS_a = cj * u[comp] - (j + 1) * sv * w[comp];
      double dS_b = sj * u[comp] + (j + 1) * cv * w[comp];
      double dE_a = 2 * pi * z.c[6 * j + comp];
      double dE_b = 2 * pi * z.c[6 * j + 3 + comp];
      out.grad[6 * j + comp] = dE_a / s2 - 2 * e * dS_a / s3;
      out.grad[6 * j + 3 + comp] = dE_b / s2 - 2 * e * dS_b / s3;
    }
  }
  return out;
}

void normalize_w1inf(zm_coeffs &z) {
  double s = w1inf_norm(z.to_fourier());
  if (s > 0)
    for (double &v : z.c) v /= s;
}

double descend_ratio(zm_coeffs &z, int iters) {
  normalize_w1inf(z);
  double cur = ratio_only(z);
  double step = 0.1;
  for (int it = 0; it < iters; ++it) {
    ratio_eval re = ratio_with_grad(z);
    cur = re.ratio;
    double g2 = 0;
    for (double g : re.grad) g2 += g * g;
    if (g2 < 1e-24) break;
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      zm_coeffs trial = z;
      for (std::size_t k = 0; k < trial.c.size(); ++k) trial.c[k] -= step * re.grad[k];
      normalize_w1inf(trial);
      double r2 = ratio_only(trial);
      if (r2 < cur - 1e-4 * step * g2) {
        z = trial;
        cur = r2;
        step *= 1.6;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted && step < 1e-14) break;
  }
  return cur;
}

double coordinate_refine(zm_coeffs &z, double cur) {
  for (double scale = 1e-2; scale >= 1e-9; scale *= 0.1) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < z.c.size(); ++k) {
        for (double sgn : {1.0, -1.0}) {
          zm_coeffs trial = z;
          trial.c[k] += sgn * scale;
          normalize_w1inf(trial);
          double r2 = ratio_only(trial);
          if (r2 < cur) {
            z = trial;
            cur = r2;
          }
        }
      }
    }
  }
  return cur;
}

} // namespace

double gamma_m_constant(int m, double /*r*/) {
  if (m < 1) throw std::invalid_argument("gamma_m_constant: need m >= 1");
  rng gen(rng::mix(0x9e3779b97f4a7c15ull, std::uint64_t(m)));
  std::vector<zm_coeffs> starts;
  // structured starts: linear and circular polarizations in each mode
  for (int j = 0; j < m; ++j) {
    zm_coeffs lin{m, std::vector<double>(6 * m, 0.0)};
    lin.c[6 * j] = 1.0;
    starts.push_back(lin);
    zm_coeffs circ{m, std::vector<double>(6 * m, 0.0)};
    circ.c[6 * j] = 1.0;
    circ.c[6 * j + 4] = 1.0;
    starts.push_back(circ);
  }
  for (int k = 0; k < 10; ++k) {
    zm_coeffs z{m, std::vector<double>(6 * m)};
    for (double &v : z.c) v = gen.normal();
    starts.push_back(z);
  }
  double best = 1e300;
  zm_coeffs best_z;
  for (auto &z : starts) {
    double r = descend_ratio(z, 120);
    if (r < best) {
      best = r;
      best_z = z;
    }
  }
  best = coordinate_refine(best_z, best);
  return best;
}

periodic_trajectory random_feasible_trajectory(int node_count, double target_speed, rng &gen) {
  if (node_count < 16) throw std::invalid_argument("random_feasible_trajectory: node_count < 16");
  if (!(target_speed > 0) || target_speed >= 1.0)
    throw std::invalid_argument("random_feasible_trajectory: need 0 < target_speed < 1");
  fourier_trajectory f;
  f.mode_count = 4;
  f.a0 = 0.3 * gen.normal3();
  f.a.resize(4);
  f.b.resize(4);
  for (int j = 1; j <= 4; ++j) {
    double decay = 1.0 / (j * j);
    f.a[j - 1] = decay * gen.normal3();
    f.b[j - 1] = decay * gen.normal3();
  }
  periodic_trajectory q = from_fourier(f, node_count);
  double sp = sup_speed(q);
  vec3 c = mean(q);
  double scale = target_speed / sp;
  for (int i = 0; i < node_count; ++i) q.node[i] = c + scale * (q.node[i] - c);
  return q;
}

// --- CSV ---

void write_trajectory_csv(const std::string &path, const periodic_trajectory &q) {
  std::FILE *fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("cannot open for write: " + path);
  std::fprintf(fp, "t,q1,q2,q3\n");
  const double h = q.h();
  for (int i = 0; i < q.n(); ++i) {
    std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g\n", i * h, q.node[i].x, q.node[i].y,
                 q.node[i].z);
  }
  std::fclose(fp);
}

periodic_trajectory read_trajectory_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file: " + path);
  periodic_trajectory q;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    double vals[4];
    for (int k = 0; k < 4; ++k) {
      if (!std::getline(ss, tok, ',')) throw std::runtime_error("bad CSV row: " + line);
      vals[k] = std::stod(tok);
    }
    q.node.push_back({vals[1], vals[2], vals[3]});
  }
  if (q.n() < 2) throw std::runtime_error("trajectory needs at least 2 nodes");
  return q;
}

} // namespace lfe
