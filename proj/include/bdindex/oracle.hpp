#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <vector>

#include "bdindex/dense.hpp"
#include "bdindex/graph.hpp"
#include "bdindex/types.hpp"

namespace bdindex {

// Ground-truth biharmonic distance b(s,t) = (e_s - e_t)^T L^{2+} (e_s - e_t)
// via one dense solve of (L + J/n) y = e_s - e_t. Debug oracle, n <= 4096.
double pseudoinverse_bd(const Graph& g, vertex_t s, vertex_t t);

// Same ground truth but amortized over many queries: factors (L + J/n) once
// and caches per-vertex solution columns on demand. Thread-safe.
class PseudoinverseBD {
 public:
  explicit PseudoinverseBD(const Graph& g);

  double bd(vertex_t s, vertex_t t) const;

  // y_s = (L + J/n)^{-1} e_s; differences of two columns give L^+ (e_s - e_t).
  const std::vector<double>& column(vertex_t s) const;

  vertex_t num_vertices() const { return n_; }

 private:
  vertex_t n_ = 0;
  DenseMatrix chol_;
  mutable std::mutex mutex_;
  mutable std::vector<std::vector<double>> columns_;
};

// b(s,t) from the grounded Laplacian L_v (row/column v removed):
// z = L_v^{-1}(e_s - e_t), b = |z|^2 - (1/n)(1^T z)^2. Works for any ground
// vertex v, including v == s or v == t (that coordinate is simply absent).
// Debug oracle, n <= 4096.
double grounded_bd(const Graph& g, vertex_t ground, vertex_t s, vertex_t t);

// Truncated-series estimate from degree-normalized random-walk visit sums:
// delta_T = sum_{i=0..T} (e_s - e_t)^T P^i D^{-1} with P = D^{-1} A, then
// b_T = |delta_T|^2 - (1/n)(1^T delta_T)^2. Debug oracle, n <= 1024.
double truncated_walk_bd(const Graph& g, vertex_t s, vertex_t t, std::uint64_t steps);

// Runs the walk series on a doubling schedule starting at T = 64 n until the
// estimates at T, 2T, and 2T+1 all agree within 1e-8 relative; returns the
// last estimate. The odd checkpoint matters: a period-2 alternating component
// (bipartite graph, endpoints on opposite sides) looks identical at every
// even T, so only a parity-crossing comparison exposes it. Throws
// Error(no_convergence) when the step cap is hit.
double converged_walk_bd(const Graph& g, vertex_t s, vertex_t t);

// Telescoping-decomposition self-check: eliminates `order` (a permutation of
// V \ {ground}) one cut vertex at a time, forming each rank-one update
// M_c = m~ m~^T / S_c, and after every step compares the accumulated sum plus
// the residual block inverse against the dense L_ground^{-1}. If removing
// `ground` disconnects the graph, entries of L_ground^{-1} joining different
// components must vanish and are folded into the deviation. Returns the
// worst absolute deviation seen. Debug oracle, n <= 256.
double cut_decomposition_check(const Graph& g, vertex_t ground,
                               std::span<const vertex_t> order);

}  // namespace bdindex
