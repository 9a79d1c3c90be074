#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bdindex/graph.hpp"
#include "bdindex/types.hpp"

namespace bdindex {

// Row-major dense matrix of doubles. Only what the debug oracles and the
// per-node direct solves need; no BLAS dependency.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// In-place Cholesky A = L*L^T of a symmetric positive-definite matrix.
// Reads the lower triangle, writes L into it (upper triangle is left stale).
// Throws Error(singular_matrix) on a non-positive pivot.
void cholesky_factor(DenseMatrix& a);

// Solves L*L^T x = b in place given the factor from cholesky_factor.
void cholesky_solve(const DenseMatrix& l, std::span<double> x);

// Full combinatorial Laplacian L = D - A as a dense matrix.
DenseMatrix laplacian_dense(const Graph& g);

// Principal submatrix of the full Laplacian on `vertices` (in the given
// order). Diagonal entries keep the FULL weighted degree of each vertex.
DenseMatrix laplacian_submatrix(const Graph& g, std::span<const vertex_t> vertices);

// Grounded Laplacian: full Laplacian with row/column `ground` deleted.
// Vertex v maps to row (v < ground ? v : v - 1).
DenseMatrix grounded_laplacian_dense(const Graph& g, vertex_t ground);

}  // namespace bdindex
