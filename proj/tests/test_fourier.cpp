#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "lfe/fourier.hpp"
#include "lfe/rng.hpp"

using namespace lfe;
using cplx = std::complex<double>;

namespace {

// direct O(N^2) transform as the oracle for the fast path
std::vector<cplx> dft_direct(const std::vector<cplx> &in) {
  const int n = int(in.size());
  std::vector<cplx> out(n);
  for (int k = 0; k < n; ++k) {
    cplx s = 0;
    for (int j = 0; j < n; ++j) s += in[j] * std::exp(cplx(0, -two_pi * j * k / n));
    out[k] = s;
  }
  return out;
}

} // namespace

TEST_CASE("dft matches direct summation") {
  rng gen(11);
  for (int n : {8, 16, 12, 7, 64}) {
    std::vector<cplx> in(n);
    for (auto &z : in) z = cplx(gen.normal(), gen.normal());
    auto fast = dft(in);
    auto slow = dft_direct(in);
    REQUIRE(fast.size() == in.size());
    for (int k = 0; k < n; ++k) CHECK(std::abs(fast[k] - slow[k]) < 1e-10);
  }
}

TEST_CASE("dft of a delta is all ones") {
  std::vector<cplx> in(4, 0.0);
  in[0] = 1.0;
  auto out = dft(in);
  for (auto &z : out) CHECK(std::abs(z - cplx(1, 0)) < 1e-14);
}

TEST_CASE("dft of a shifted delta walks the unit circle") {
  std::vector<cplx> in(4, 0.0);
  in[1] = 1.0;
  auto out = dft(in);
  CHECK(std::abs(out[0] - cplx(1, 0)) < 1e-14);
  CHECK(std::abs(out[1] - cplx(0, -1)) < 1e-14);
  CHECK(std::abs(out[2] - cplx(-1, 0)) < 1e-14);
  CHECK(std::abs(out[3] - cplx(0, 1)) < 1e-14);
}

TEST_CASE("idft inverts dft") {
  rng gen(12);
  for (int n : {16, 10, 128}) {
    std::vector<cplx> in(n);
    for (auto &z : in) z = cplx(gen.normal(), gen.normal());
    auto back = idft(dft(in));
    for (int k = 0; k < n; ++k) CHECK(std::abs(back[k] - in[k]) < 1e-12);
  }
}

TEST_CASE("parseval") {
  rng gen(13);
  const int n = 32;
  std::vector<cplx> in(n);
  double time_energy = 0;
  for (auto &z : in) {
    z = cplx(gen.normal(), gen.normal());
    time_energy += std::norm(z);
  }
  auto out = dft(in);
  double freq_energy = 0;
  for (auto &z : out) freq_energy += std::norm(z);
  CHECK(freq_energy == doctest::Approx(n * time_energy).epsilon(1e-12));
}

TEST_CASE("fourier_trajectory eval and derivative") {
  fourier_trajectory f;
  f.mode_count = 2;
  f.a0 = {1.0, 0.0, -2.0};
  f.a = {vec3{0.5, 0, 0}, vec3{0, 0.25, 0}};
  f.b = {vec3{0, -1.0, 0}, vec3{0, 0, 0.125}};

  // hand evaluation at t = pi/3
  double t = two_pi / 6.0;
  vec3 v = f.eval(t);
  CHECK(v.x == doctest::Approx(1.0 + 0.5 * std::cos(t) + 0.0).epsilon(1e-14));
  CHECK(v.y == doctest::Approx(-1.0 * std::sin(t) + 0.25 * std::cos(2 * t)).epsilon(1e-14));
  CHECK(v.z == doctest::Approx(-2.0 + 0.125 * std::sin(2 * t)).epsilon(1e-14));

  vec3 dv = f.eval_derivative(t);
  CHECK(dv.x == doctest::Approx(-0.5 * std::sin(t)).epsilon(1e-14));
  CHECK(dv.y == doctest::Approx(-1.0 * std::cos(t) - 0.5 * std::sin(2 * t)).epsilon(1e-14));
  CHECK(dv.z == doctest::Approx(0.25 * std::cos(2 * t)).epsilon(1e-14));

  // derivative() must agree with eval_derivative pointwise
  fourier_trajectory g = f.derivative();
  for (double s : {0.0, 0.7, 2.9, 5.5}) {
    vec3 a = g.eval(s), b = f.eval_derivative(s);
    CHECK(norm(a - b) < 1e-13);
  }
}

TEST_CASE("nodes_to_fourier recovers a trigonometric polynomial") {
  rng gen(14);
  fourier_trajectory f;
  f.mode_count = 3;
  f.a0 = gen.normal3();
  for (int j = 0; j < 3; ++j) {
    f.a.push_back(gen.normal3());
    f.b.push_back(gen.normal3());
  }
  const int n = 16;
  auto nodes = fourier_to_nodes(f, n);
  fourier_trajectory back = nodes_to_fourier(nodes, 3);
  CHECK(norm(back.a0 - f.a0) < 1e-13);
  for (int j = 0; j < 3; ++j) {
    CHECK(norm(back.a[j] - f.a[j]) < 1e-13);
    CHECK(norm(back.b[j] - f.b[j]) < 1e-13);
  }
}

TEST_CASE("nodes_to_fourier rejects underresolved requests") {
  std::vector<vec3> nodes(8);
  CHECK_THROWS_AS(nodes_to_fourier(nodes, 4), std::invalid_argument);
  CHECK_NOTHROW(nodes_to_fourier(nodes, 3));
}

TEST_CASE("fourier_to_nodes samples the series") {
  fourier_trajectory f;
  f.mode_count = 1;
  f.a = {vec3{1, 0, 0}};
  f.b = {vec3{0, 1, 0}};
  auto nodes = fourier_to_nodes(f, 8);
  REQUIRE(nodes.size() == 8);
  for (int i = 0; i < 8; ++i) {
    double t = two_pi * i / 8.0;
    CHECK(norm(nodes[i] - vec3{std::cos(t), std::sin(t), 0}) < 1e-14);
  }
}
