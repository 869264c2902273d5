#pragma once
#include <array>
#include <cmath>

namespace lfe {

struct vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double &operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  vec3 &operator+=(const vec3 &b) { x += b.x; y += b.y; z += b.z; return *this; }
  vec3 &operator-=(const vec3 &b) { x -= b.x; y -= b.y; z -= b.z; return *this; }
  vec3 &operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline vec3 operator+(vec3 a, const vec3 &b) { return a += b; }
inline vec3 operator-(vec3 a, const vec3 &b) { return a -= b; }
inline vec3 operator*(double s, vec3 a) { return a *= s; }
inline vec3 operator*(vec3 a, double s) { return a *= s; }
inline vec3 operator/(vec3 a, double s) { return a *= (1.0 / s); }
inline vec3 operator-(const vec3 &a) { return {-a.x, -a.y, -a.z}; }

inline double dot(const vec3 &a, const vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm2(const vec3 &a) { return dot(a, a); }
inline double norm(const vec3 &a) { return std::sqrt(norm2(a)); }
inline vec3 cross(const vec3 &a, const vec3 &b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// rows-major 3x3 matrix
struct mat3 {
  std::array<vec3, 3> row{};

  static mat3 identity() {
    mat3 m;
    m.row[0] = {1, 0, 0};
    m.row[1] = {0, 1, 0};
    m.row[2] = {0, 0, 1};
    return m;
  }
  static mat3 zero() { return mat3{}; }

  double &operator()(int i, int j) { return row[i][j]; }
  double operator()(int i, int j) const { return row[i][j]; }

  mat3 &operator+=(const mat3 &b) {
    for (int i = 0; i < 3; ++i) row[i] += b.row[i];
    return *this;
  }
  mat3 &operator-=(const mat3 &b) {
    for (int i = 0; i < 3; ++i) row[i] -= b.row[i];
    return *this;
  }
  mat3 &operator*=(double s) {
    for (auto &r : row) r *= s;
    return *this;
  }
};

inline mat3 operator+(mat3 a, const mat3 &b) { return a += b; }
inline mat3 operator-(mat3 a, const mat3 &b) { return a -= b; }
inline mat3 operator*(double s, mat3 a) { return a *= s; }
inline mat3 operator*(mat3 a, double s) { return a *= s; }

inline vec3 matvec(const mat3 &m, const vec3 &v) {
  return {dot(m.row[0], v), dot(m.row[1], v), dot(m.row[2], v)};
}

inline mat3 transpose(const mat3 &m) {
  mat3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = m(j, i);
  return t;
}

inline mat3 outer(const vec3 &a, const vec3 &b) {
  mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = a[i] * b[j];
  return m;
}

inline mat3 matmul(const mat3 &a, const mat3 &b) {
  mat3 c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

// Frobenius norm, an upper bound on the spectral norm
inline double frob_norm(const mat3 &m) {
  double s = 0;
  for (int i = 0; i < 3; ++i) s += norm2(m.row[i]);
  return std::sqrt(s);
}

// spectral norm via a few power iterations on m^T m (deterministic start)
inline double spectral_norm(const mat3 &m) {
  mat3 g = matmul(transpose(m), m);
  vec3 v{1.0, 0.7, 0.41};
  double lam = 0;
  for (int it = 0; it < 60; ++it) {
    vec3 w = matvec(g, v);
    double n = norm(w);
    if (n == 0) return 0;
    v = w / n;
    lam = n;
  }
  return std::sqrt(lam);
}

// solve a 3x3 linear system by Gaussian elimination with partial pivoting
// returns false when the pivot collapses
inline bool solve3(const mat3 &a_in, const vec3 &b_in, vec3 &x) {
  double a[3][4];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) a[i][j] = a_in(i, j);
    a[i][3] = b_in[i];
  }
  for (int c = 0; c < 3; ++c) {
    int p = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
    if (std::fabs(a[p][c]) < 1e-300) return false;
    if (p != c)
      for (int j = 0; j < 4; ++j) std::swap(a[p][j], a[c][j]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      double f = a[r][c] / a[c][c];
      for (int j = c; j < 4; ++j) a[r][j] -= f * a[c][j];
    }
  }
  x = {a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]};
  return true;
}

} // namespace lfe
