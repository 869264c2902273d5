#pragma once
#include <complex>
#include <vector>

#include "lfe/vec3.hpp"

namespace lfe {

// Trigonometric polynomial q(t) = a0 + sum_{j=1..M} a_j cos(jt) + b_j sin(jt).
struct fourier_trajectory {
  int mode_count = 0;
  vec3 a0;
  std::vector<vec3> a, b; // coefficient j stored at index j-1

  vec3 eval(double t) const;
  vec3 eval_derivative(double t) const;
  fourier_trajectory derivative() const;
};

// forward transform, no scaling: out_k = sum_j in_j e^{-2pi i jk/N}
// radix-2 FFT for power-of-two lengths, direct summation otherwise
std::vector<std::complex<double>> dft(std::vector<std::complex<double>> in);
// inverse transform with 1/N scaling
std::vector<std::complex<double>> idft(std::vector<std::complex<double>> in);

// nodal samples at t_i = 2pi i/N to truncated Fourier series (requires 2M < N)
fourier_trajectory nodes_to_fourier(const std::vector<vec3> &nodes, int mode_count);
// sample the series at N uniform nodes
std::vector<vec3> fourier_to_nodes(const fourier_trajectory &f, int node_count);

} // namespace lfe
