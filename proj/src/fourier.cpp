#include "lfe/fourier.hpp"

#include <cmath>
#include <stdexcept>

#include "lfe/rng.hpp"

namespace lfe {

using cd = std::complex<double>;

static bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

static void fft_radix2(std::vector<cd> &v, bool inverse) {
  const std::size_t n = v.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = two_pi / double(len) * (inverse ? 1.0 : -1.0);
    cd wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cd w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        cd u = v[i + k], t = v[i + k + len / 2] * w;
        v[i + k] = u + t;
        v[i + k + len / 2] = u - t;
        w *= wl;
      }
    }
  }
}

static std::vector<cd> dft_direct(const std::vector<cd> &in, bool inverse) {
  const std::size_t n = in.size();
  std::vector<cd> out(n);
  double sgn = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    cd s = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double ang = sgn * two_pi * double(j) * double(k) / double(n);
      s += in[j] * cd(std::cos(ang), std::sin(ang));
    }
    out[k] = s;
  }
  return out;
}

std::vector<cd> dft(std::vector<cd> in) {
  if (in.empty()) return in;
  if (is_pow2(in.size())) {
    fft_radix2(in, false);
    return in;
  }
  return dft_direct(in, false);
}

std::vector<cd> idft(std::vector<cd> in) {
  if (in.empty()) return in;
  if (is_pow2(in.size())) {
    fft_radix2(in, true);
  } else {
    in = dft_direct(in, true);
  }
  double s = 1.0 / double(in.size());
  for (auto &c : in) c *= s;
  return in;
}

vec3 fourier_trajectory::eval(double t) const {
  vec3 v = a0;
  for (int j = 1; j <= mode_count; ++j) {
    double c = std::cos(j * t), s = std::sin(j * t);
    v += c * a[j - 1] + s * b[j - 1];
  }
  return v;
}

vec3 fourier_trajectory::eval_derivative(double t) const {
  vec3 v{};
  for (int j = 1; j <= mode_count; ++j) {
    double c = std::cos(j * t), s = std::sin(j * t);
    v += double(j) * (c * b[j - 1] - s * a[j - 1]);
  }
  return v;
}

fourier_trajectory fourier_trajectory::derivative() const {
  fourier_trajectory d;
  d.mode_count = mode_count;
  d.a0 = vec3{};
  d.a.resize(mode_count);
  d.b.resize(mode_count);
  for (int j = 1; j <= mode_count; ++j) {
    d.a[j - 1] = double(j) * b[j - 1];
    d.b[j - 1] = -double(j) * a[j - 1];
  }
  return d;
}

fourier_trajectory nodes_to_fourier(const std::vector<vec3> &nodes, int mode_count) {
  const int n = int(nodes.size());
  if (n < 1) throw std::invalid_argument("nodes_to_fourier: empty input");
  if (2 * mode_count >= n) throw std::invalid_argument("nodes_to_fourier: need 2M < N");
  fourier_trajectory f;
  f.mode_count = mode_count;
  f.a.resize(mode_count);
  f.b.resize(mode_count);
  for (int comp = 0; comp < 3; ++comp) {
    std::vector<cd> in(n);
    for (int i = 0; i < n; ++i) in[i] = nodes[i][comp];
    auto out = dft(std::move(in));
    f.a0[comp] = out[0].real() / n;
    for (int j = 1; j <= mode_count; ++j) {
      f.a[j - 1][comp] = 2.0 * out[j].real() / n;
      f.b[j - 1][comp] = -2.0 * out[j].imag() / n;
    }
  }
  return f;
}

std::vector<vec3> fourier_to_nodes(const fourier_trajectory &f, int node_count) {
  std::vector<vec3> nodes(node_count);
  double h = two_pi / node_count;
  for (int i = 0; i < node_count; ++i) nodes[i] = f.eval(i * h);
  return nodes;
}

} // namespace lfe
