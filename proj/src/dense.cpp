#include "bdindex/dense.hpp"

#include <cmath>

namespace bdindex {

void cholesky_factor(DenseMatrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double* ri = a.row(i);
    for (std::size_t j = 0; j <= i; ++j) {
      const double* rj = a.row(j);
      double s = ri[j];
      for (std::size_t k = 0; k < j; ++k) s -= ri[k] * rj[k];
      if (i == j) {
        if (s <= 0.0 || !std::isfinite(s))
          throw Error(ErrorKind::singular_matrix,
                      "Cholesky pivot " + std::to_string(i) + " is not positive");
        ri[j] = std::sqrt(s);
      } else {
        ri[j] = s / rj[j];
      }
    }
  }
}

void cholesky_solve(const DenseMatrix& l, std::span<double> x) {
  const std::size_t n = l.rows();
  // Forward: L y = b.
  for (std::size_t i = 0; i < n; ++i) {
    const double* ri = l.row(i);
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= ri[k] * x[k];
    x[i] = s / ri[i];
  }
  // Backward: L^T x = y, expressed as row-contiguous updates.
  for (std::size_t i = n; i-- > 0;) {
    const double* ri = l.row(i);
    double xi = x[i] / ri[i];
    x[i] = xi;
    for (std::size_t k = 0; k < i; ++k) x[k] -= ri[k] * xi;
  }
}

DenseMatrix laplacian_dense(const Graph& g) {
  const std::size_t n = g.num_vertices();
  DenseMatrix l(n, n, 0.0);
  for (vertex_t v = 0; v < n; ++v) {
    l(v, v) = g.degree(v);
    for (const auto& e : g.neighbors(v)) l(v, e.id) = -e.weight;
  }
  return l;
}

DenseMatrix laplacian_submatrix(const Graph& g, std::span<const vertex_t> vertices) {
  const std::size_t k = vertices.size();
  std::vector<std::uint32_t> pos(g.num_vertices(), static_cast<std::uint32_t>(-1));
  for (std::size_t i = 0; i < k; ++i) pos[vertices[i]] = static_cast<std::uint32_t>(i);
  DenseMatrix l(k, k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    vertex_t v = vertices[i];
    l(i, i) = g.degree(v);
    for (const auto& e : g.neighbors(v))
      if (pos[e.id] != static_cast<std::uint32_t>(-1)) l(i, pos[e.id]) = -e.weight;
  }
  return l;
}

DenseMatrix grounded_laplacian_dense(const Graph& g, vertex_t ground) {
  const vertex_t n = g.num_vertices();
  if (ground >= n)
    throw Error(ErrorKind::out_of_range, "ground vertex out of range");
  std::vector<vertex_t> keep;
  keep.reserve(n - 1);
  for (vertex_t v = 0; v < n; ++v)
    if (v != ground) keep.push_back(v);
  return laplacian_submatrix(g, keep);
}

}  // namespace bdindex
