#include "bdindex/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bdindex {

namespace {

constexpr vertex_t kDenseGuard = 4096;
constexpr vertex_t kWalkGuard = 1024;
constexpr vertex_t kCutGuard = 256;

void check_guard(const Graph& g, vertex_t limit, const char* what) {
  if (g.num_vertices() > limit)
    throw Error(ErrorKind::size_guard,
                std::string(what) + " is a debug oracle capped at n=" +
                    std::to_string(limit) + ", got n=" +
                    std::to_string(g.num_vertices()));
}

void check_vertex(const Graph& g, vertex_t v) {
  if (v >= g.num_vertices())
    throw Error(ErrorKind::out_of_range, "vertex id " + std::to_string(v) +
                                             " out of range for n=" +
                                             std::to_string(g.num_vertices()));
}

// Cholesky factor of (L + J/n); SPD exactly when g is connected.
DenseMatrix factor_completed_laplacian(const Graph& g) {
  const std::size_t n = g.num_vertices();
  DenseMatrix a = laplacian_dense(g);
  const double shift = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) += shift;
  try {
    cholesky_factor(a);
  } catch (const Error&) {
    throw Error(ErrorKind::singular_matrix,
                "completed Laplacian is singular; input graph is disconnected");
  }
  return a;
}

double project_and_square(std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sum = 0.0;
  for (double& v : y) {
    v -= mean;
    sum += v * v;
  }
  return sum;
}

}  // namespace

double pseudoinverse_bd(const Graph& g, vertex_t s, vertex_t t) {
  check_guard(g, kDenseGuard, "pseudoinverse_bd");
  check_vertex(g, s);
  check_vertex(g, t);
  if (s == t) return 0.0;
  const std::size_t n = g.num_vertices();
  DenseMatrix chol = factor_completed_laplacian(g);
  std::vector<double> y(n, 0.0);
  y[s] = 1.0;
  y[t] = -1.0;
  cholesky_solve(chol, y);
  return project_and_square(y);
}

PseudoinverseBD::PseudoinverseBD(const Graph& g) : n_(g.num_vertices()) {
  check_guard(g, kDenseGuard, "PseudoinverseBD");
  chol_ = factor_completed_laplacian(g);
  columns_.resize(n_);
}

const std::vector<double>& PseudoinverseBD::column(vertex_t s) const {
  if (s >= n_)
    throw Error(ErrorKind::out_of_range, "vertex id out of range");
  std::lock_guard<std::mutex> lock(mutex_);
  auto& col = columns_[s];
  if (col.empty()) {
    col.assign(n_, 0.0);
    col[s] = 1.0;
    cholesky_solve(chol_, col);
  }
  return col;
}

double PseudoinverseBD::bd(vertex_t s, vertex_t t) const {
  if (s >= n_ || t >= n_)
    throw Error(ErrorKind::out_of_range, "vertex id out of range");
  if (s == t) return 0.0;
  const auto& cs = column(s);
  const auto& ct = column(t);
  std::vector<double> y(n_);
  for (vertex_t i = 0; i < n_; ++i) y[i] = cs[i] - ct[i];
  return project_and_square(y);
}

double grounded_bd(const Graph& g, vertex_t ground, vertex_t s, vertex_t t) {
  check_guard(g, kDenseGuard, "grounded_bd");
  check_vertex(g, ground);
  check_vertex(g, s);
  check_vertex(g, t);
  if (s == t) return 0.0;
  const vertex_t n = g.num_vertices();
  DenseMatrix lv = grounded_laplacian_dense(g, ground);
  cholesky_factor(lv);
  std::vector<double> z(n - 1, 0.0);
  auto pos = [&](vertex_t v) { return v < ground ? v : v - 1; };
  if (s != ground) z[pos(s)] = 1.0;
  if (t != ground) z[pos(t)] = -1.0;
  cholesky_solve(lv, z);
  double sum2 = 0.0, sum1 = 0.0;
  for (double v : z) {
    sum2 += v * v;
    sum1 += v;
  }
  return sum2 - sum1 * sum1 / static_cast<double>(n);
}

namespace {

// Shared engine for the walk-series estimates: accumulates
// delta = sum_{i=0..T} (e_s - e_t)^T P^i D^{-1} incrementally and lets the
// caller evaluate the distance expression at checkpoints.
class WalkSeries {
 public:
  WalkSeries(const Graph& g, vertex_t s, vertex_t t)
      : g_(g), r_(g.num_vertices(), 0.0), delta_(g.num_vertices(), 0.0) {
    r_[s] += 1.0;
    r_[t] -= 1.0;
  }

  // Runs accumulation steps i = steps_done .. target inclusive, keeping the
  // invariant r_ == P^steps_done r so the series can resume at any point.
  void advance_to(std::uint64_t target) {
    const vertex_t n = g_.num_vertices();
    std::vector<double> next(n);
    while (steps_done_ <= target) {
      for (vertex_t v = 0; v < n; ++v) delta_[v] += r_[v] / g_.degree(v);
      std::fill(next.begin(), next.end(), 0.0);
      for (vertex_t v = 0; v < n; ++v) {
        if (r_[v] == 0.0) continue;
        const double coef = r_[v] / g_.degree(v);
        for (const auto& e : g_.neighbors(v)) next[e.id] += coef * e.weight;
      }
      r_.swap(next);
      ++steps_done_;
    }
  }

  double estimate() const {
    double sum2 = 0.0, sum1 = 0.0;
    for (double v : delta_) {
      sum2 += v * v;
      sum1 += v;
    }
    return sum2 - sum1 * sum1 / static_cast<double>(delta_.size());
  }

 private:
  const Graph& g_;
  std::vector<double> r_;
  std::vector<double> delta_;
  std::uint64_t steps_done_ = 0;  // number of i-values already accumulated
};

}  // namespace

double truncated_walk_bd(const Graph& g, vertex_t s, vertex_t t, std::uint64_t steps) {
  check_guard(g, kWalkGuard, "truncated_walk_bd");
  check_vertex(g, s);
  check_vertex(g, t);
  if (s == t) return 0.0;
  WalkSeries series(g, s, t);
  series.advance_to(steps);
  return series.estimate();
}

double converged_walk_bd(const Graph& g, vertex_t s, vertex_t t) {
  check_guard(g, kWalkGuard, "converged_walk_bd");
  check_vertex(g, s);
  check_vertex(g, t);
  if (s == t) return 0.0;
  constexpr std::uint64_t kStepCap = 1u << 22;
  std::uint64_t target = 64ull * g.num_vertices();
  WalkSeries series(g, s, t);
  series.advance_to(target);
  double prev = series.estimate();
  while (true) {
    target *= 2;
    if (target > kStepCap)
      throw Error(ErrorKind::no_convergence,
                  "walk series did not settle within " +
                      std::to_string(kStepCap) +
                      " steps (slow mixing or an alternating component)");
    series.advance_to(target);
    const double cur = series.estimate();
    // Also compare against step target+1: estimates of equal parity agree on
    // a period-2 alternating component, so the doubling comparison alone
    // (even vs. even) would declare a bogus limit on bipartite graphs.
    series.advance_to(target + 1);
    const double odd = series.estimate();
    if (std::abs(cur - prev) < 1e-8 * std::max(std::abs(cur), 1e-12) &&
        std::abs(odd - cur) < 1e-8 * std::max(std::abs(odd), 1e-12))
      return odd;
    prev = cur;
  }
}

double cut_decomposition_check(const Graph& g, vertex_t ground,
                               std::span<const vertex_t> order) {
  check_guard(g, kCutGuard, "cut_decomposition_check");
  check_vertex(g, ground);
  const vertex_t n = g.num_vertices();
  const std::size_t r = n - 1;

  // Frame: V \ {ground} in ascending order.
  std::vector<vertex_t> frame;
  frame.reserve(r);
  for (vertex_t v = 0; v < n; ++v)
    if (v != ground) frame.push_back(v);
  std::vector<std::uint32_t> frame_pos(n, static_cast<std::uint32_t>(-1));
  for (std::size_t i = 0; i < r; ++i) frame_pos[frame[i]] = static_cast<std::uint32_t>(i);

  if (order.size() != r)
    throw Error(ErrorKind::out_of_range,
                "elimination order must be a permutation of the non-ground vertices");
  std::vector<char> in_order(n, 0);
  for (vertex_t c : order) {
    check_vertex(g, c);
    if (c == ground || in_order[c])
      throw Error(ErrorKind::out_of_range,
                  "elimination order must be a permutation of the non-ground vertices");
    in_order[c] = 1;
  }

  auto invert = [](DenseMatrix a) {
    cholesky_factor(a);
    const std::size_t k = a.rows();
    DenseMatrix inv(k, k, 0.0);
    std::vector<double> col(k);
    for (std::size_t j = 0; j < k; ++j) {
      std::fill(col.begin(), col.end(), 0.0);
      col[j] = 1.0;
      cholesky_solve(a, col);
      for (std::size_t i = 0; i < k; ++i) inv(i, j) = col[i];
    }
    return inv;
  };

  DenseMatrix ref = invert(grounded_laplacian_dense(g, ground));
  double max_dev = 0.0;

  // Block structure under a cut vertex: entries of L_ground^{-1} joining
  // different components of G - ground must be zero.
  {
    std::vector<std::uint32_t> comp(n, 0);
    std::uint32_t num_comp = 0;
    for (vertex_t v0 : frame) {
      if (comp[v0] != 0) continue;
      ++num_comp;
      std::vector<vertex_t> queue{v0};
      comp[v0] = num_comp;
      for (std::size_t i = 0; i < queue.size(); ++i)
        for (const auto& e : g.neighbors(queue[i]))
          if (e.id != ground && comp[e.id] == 0) {
            comp[e.id] = num_comp;
            queue.push_back(e.id);
          }
    }
    if (num_comp > 1)
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
          if (comp[frame[i]] != comp[frame[j]])
            max_dev = std::max(max_dev, std::abs(ref(i, j)));
  }

  DenseMatrix acc(r, r, 0.0);
  std::vector<char> remaining(n, 0);
  for (vertex_t v : frame) remaining[v] = 1;

  std::vector<double> m_ext(r);
  for (std::size_t step = 0; step < order.size(); ++step) {
    vertex_t c = order[step];
    remaining[c] = 0;

    std::vector<vertex_t> rest;
    rest.reserve(r - step - 1);
    for (vertex_t v : frame)
      if (remaining[v]) rest.push_back(v);

    // m = L_rest^{-1} a_c, S = d_c - a_c^T m  (full weighted degree d_c).
    std::vector<double> a(rest.size(), 0.0);
    {
      std::vector<std::uint32_t> rest_pos(n, static_cast<std::uint32_t>(-1));
      for (std::size_t i = 0; i < rest.size(); ++i)
        rest_pos[rest[i]] = static_cast<std::uint32_t>(i);
      for (const auto& e : g.neighbors(c))
        if (rest_pos[e.id] != static_cast<std::uint32_t>(-1))
          a[rest_pos[e.id]] = e.weight;
    }
    std::vector<double> m(a);
    DenseMatrix l_rest = laplacian_submatrix(g, rest);
    if (!rest.empty()) {
      DenseMatrix f = l_rest;
      cholesky_factor(f);
      cholesky_solve(f, m);
    }
    double s_c = g.degree(c);
    for (std::size_t i = 0; i < rest.size(); ++i) s_c -= a[i] * m[i];
    if (s_c <= 0.0)
      throw Error(ErrorKind::numerical_breakdown,
                  "non-positive Schur complement at cut vertex " + std::to_string(c));

    // Accumulate M_c = m~ m~^T / S_c over the frame (m extended by 1 at c).
    std::fill(m_ext.begin(), m_ext.end(), 0.0);
    for (std::size_t i = 0; i < rest.size(); ++i) m_ext[frame_pos[rest[i]]] = m[i];
    m_ext[frame_pos[c]] = 1.0;
    for (std::size_t i = 0; i < r; ++i) {
      if (m_ext[i] == 0.0) continue;
      const double mi = m_ext[i] / s_c;
      for (std::size_t j = 0; j < r; ++j) acc(i, j) += mi * m_ext[j];
    }

    // Compare ref against acc + (residual block inverse padded to the frame).
    DenseMatrix resid(r, r, 0.0);
    if (!rest.empty()) {
      DenseMatrix inv_rest = invert(std::move(l_rest));
      for (std::size_t i = 0; i < rest.size(); ++i)
        for (std::size_t j = 0; j < rest.size(); ++j)
          resid(frame_pos[rest[i]], frame_pos[rest[j]]) = inv_rest(i, j);
    }
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j)
        max_dev = std::max(max_dev, std::abs(ref(i, j) - acc(i, j) - resid(i, j)));
  }
  return max_dev;
}

}  // namespace bdindex
