#pragma once
#include <vector>

#include "lfe/vec3.hpp"

namespace lfe {

// Solves the symmetric cyclic tridiagonal system with constant diagonal alpha,
// constant off-diagonal beta (including the two wrap corners). Thomas
// elimination on a rank-one modification.
std::vector<double> cyclic_tridiag_solve(double alpha, double beta,
                                         const std::vector<double> &rhs);

// Symmetric cyclic block tridiagonal matrix with 3x3 blocks.
// diag[i] is block (i,i); upper[i] is block (i, i+1) for i < n-1 and
// upper[n-1] is the wrap block (n-1, 0). Blocks (j, i) are transposes.
struct block_tridiag {
  std::vector<mat3> diag;
  std::vector<mat3> upper;

  int n() const { return int(diag.size()); }
  block_tridiag &axpy(double s, const block_tridiag &other);
  std::vector<vec3> apply(const std::vector<vec3> &x) const;
};

// Solves M x = rhs for the cyclic structure above: block Thomas on the
// acyclic part plus a rank-6 Woodbury correction for the wrap coupling.
// Returns false when a pivot collapses.
bool cyclic_block_solve(const block_tridiag &m, const std::vector<vec3> &rhs,
                        std::vector<vec3> &x);

} // namespace lfe
