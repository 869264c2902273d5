#include "lfe/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace lfe {

std::vector<double> cyclic_tridiag_solve(double alpha, double beta,
                                         const std::vector<double> &rhs) {
  const int n = int(rhs.size());
  if (n < 3) throw std::invalid_argument("cyclic_tridiag_solve: need n >= 3");
  const double gamma = -0.5 * alpha;
  // modified acyclic tridiagonal
  std::vector<double> diag(n, alpha);
  diag[0] = alpha - gamma;
  diag[n - 1] = alpha - beta * beta / gamma;

  auto thomas = [&](const std::vector<double> &b) {
    std::vector<double> c(n), x(n);
    double piv = diag[0];
    x[0] = b[0] / piv;
    for (int i = 1; i < n; ++i) {
      c[i - 1] = beta / piv;
      piv = diag[i] - beta * c[i - 1];
      x[i] = (b[i] - beta * x[i - 1]) / piv;
    }
    for (int i = n - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
    return x;
  };

  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = beta;
  std::vector<double> x = thomas(rhs);
  std::vector<double> z = thomas(u);
  double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  for (int i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

block_tridiag &block_tridiag::axpy(double s, const block_tridiag &other) {
  for (int i = 0; i < n(); ++i) {
    diag[i] += s * other.diag[i];
    upper[i] += s * other.upper[i];
  }
  return *this;
}

std::vector<vec3> block_tridiag::apply(const std::vector<vec3> &x) const {
  const int m = n();
  std::vector<vec3> y(m);
  for (int i = 0; i < m; ++i) {
    int ip = (i + 1) % m, im = (i + m - 1) % m;
    y[i] = matvec(diag[i], x[i]) + matvec(upper[i], x[ip]) +
           matvec(transpose(upper[im]), x[im]);
  }
  return y;
}

namespace {

bool invert3(const mat3 &m, mat3 &inv) {
  for (int c = 0; c < 3; ++c) {
    vec3 e{};
    e[c] = 1.0;
    vec3 col;
    if (!solve3(m, e, col)) return false;
    for (int r = 0; r < 3; ++r) inv(r, c) = col[r];
  }
  return true;
}

// dense 6x6 solve with partial pivoting
bool solve6(double a[6][6], double b[6], double x[6]) {
  double aug[6][7];
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) aug[i][j] = a[i][j];
    aug[i][6] = b[i];
  }
  for (int c = 0; c < 6; ++c) {
    int p = c;
    for (int r = c + 1; r < 6; ++r)
      if (std::fabs(aug[r][c]) > std::fabs(aug[p][c])) p = r;
    if (std::fabs(aug[p][c]) < 1e-280) return false;
    if (p != c)
      for (int j = 0; j < 7; ++j) std::swap(aug[p][j], aug[c][j]);
    for (int r = 0; r < 6; ++r) {
      if (r == c) continue;
      double f = aug[r][c] / aug[c][c];
      for (int j = c; j < 7; ++j) aug[r][j] -= f * aug[c][j];
    }
  }
  for (int i = 0; i < 6; ++i) x[i] = aug[i][6] / aug[i][i];
  return true;
}

struct thomas_factor {
  std::vector<mat3> cinv;  // inverses of the eliminated diagonal blocks
  std::vector<mat3> g;     // cinv * upper
  const block_tridiag *m = nullptr;

  bool factor(const block_tridiag &mat) {
    m = &mat;
    const int n = mat.n();
    cinv.resize(n);
    g.resize(n);
    mat3 c = mat.diag[0];
    if (!invert3(c, cinv[0])) return false;
    g[0] = matmul(cinv[0], mat.upper[0]);
    for (int i = 1; i < n; ++i) {
      mat3 ci = mat.diag[i] - matmul(transpose(mat.upper[i - 1]), g[i - 1]);
      if (!invert3(ci, cinv[i])) return false;
      if (i < n - 1) g[i] = matmul(cinv[i], mat.upper[i]);
    }
    return true;
  }

  // solves the acyclic part (wrap block ignored)
  std::vector<vec3> solve(const std::vector<vec3> &b) const {
    const int n = m->n();
    std::vector<vec3> y(n), x(n);
    y[0] = matvec(cinv[0], b[0]);
    for (int i = 1; i < n; ++i)
      y[i] = matvec(cinv[i], b[i] - matvec(transpose(m->upper[i - 1]), y[i - 1]));
    x[n - 1] = y[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = y[i] - matvec(g[i], x[i + 1]);
    return x;
  }
};

} // namespace

bool cyclic_block_solve(const block_tridiag &m, const std::vector<vec3> &rhs,
                        std::vector<vec3> &x) {
  const int n = m.n();
  if (n < 3) return false;
  // split off the wrap coupling: M = T + E_0 B^T E_{n-1}^T + E_{n-1} B E_0^T
  block_tridiag t = m;
  const mat3 b = m.upper[n - 1];
  t.upper[n - 1] = mat3::zero();

  thomas_factor f;
  if (!f.factor(t)) return false;

  std::vector<vec3> y = f.solve(rhs);

  // columns of U = [E_0 | E_{n-1}] pushed through T^{-1}
  std::vector<std::vector<vec3>> ycols(6, std::vector<vec3>(n));
  for (int c = 0; c < 6; ++c) {
    std::vector<vec3> e(n, vec3{});
    vec3 unit{};
    unit[c % 3] = 1.0;
    e[c < 3 ? 0 : n - 1] = unit;
    ycols[c] = f.solve(e);
  }

  // V^T w = [B^T w_{n-1}; B w_0]
  auto vt_apply = [&](const std::vector<vec3> &w, double out[6]) {
    vec3 top = matvec(transpose(b), w[n - 1]);
    vec3 bot = matvec(b, w[0]);
    for (int i = 0; i < 3; ++i) {
      out[i] = top[i];
      out[3 + i] = bot[i];
    }
  };

  double k[6][6], vy[6];
  for (int c = 0; c < 6; ++c) {
    double col[6];
    vt_apply(ycols[c], col);
    for (int r = 0; r < 6; ++r) k[r][c] = (r == c ? 1.0 : 0.0) + col[r];
  }
  vt_apply(y, vy);
  double w[6];
  if (!solve6(k, vy, w)) return false;

  x = y;
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < 6; ++c) x[i] -= w[c] * ycols[c][i];
  return true;
}

} // namespace lfe
