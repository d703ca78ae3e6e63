#include "perslay/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace perslay {

double linf_distance(const DiagramPoint& a, const DiagramPoint& b) {
  return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

double diagonal_distance(const DiagramPoint& p) { return 0.5 * std::abs(p.death - p.birth); }

namespace {

// Augmented bipartite problem: left = A then projections of B, right = B then
// projections of A. A point may only use its own projection slot; matching to
// another projection never costs less.
struct Augmented {
  std::size_t n, m;
  const std::vector<DiagramPoint>& a;
  const std::vector<DiagramPoint>& b;

  std::size_t size() const { return n + m; }

  /// Cost of pairing left i with right j, or +inf when not allowed.
  double cost(std::size_t i, std::size_t j) const {
    const bool left_real = i < n, right_real = j < m;
    if (left_real && right_real) return linf_distance(a[i], b[j]);
    if (left_real) return j - m == i ? diagonal_distance(a[i]) : INFINITY;
    if (right_real) return i - n == j ? diagonal_distance(b[j]) : INFINITY;
    return 0.0;
  }
};

/// Kuhn augmenting paths restricted to edges with cost <= threshold.
bool perfect_matching_exists(const Augmented& g, double threshold) {
  const std::size_t N = g.size();
  std::vector<std::vector<std::size_t>> adj(N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (g.cost(i, j) <= threshold) adj[i].push_back(j);

  constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> match_right(N, kFree);
  std::vector<unsigned> seen(N, 0);
  unsigned stamp = 0;

  // Iterative DFS to keep deep augmenting paths off the call stack.
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  std::vector<std::size_t> path_right;
  for (std::size_t root = 0; root < N; ++root) {
    ++stamp;
    stack.assign(1, {root, 0});
    path_right.clear();
    bool found = false;
    while (!stack.empty() && !found) {
      auto& [u, next] = stack.back();
      if (next == adj[u].size()) {
        stack.pop_back();
        if (!path_right.empty()) path_right.pop_back();
        continue;
      }
      const std::size_t v = adj[u][next++];
      if (seen[v] == stamp) continue;
      seen[v] = stamp;
      path_right.push_back(v);
      if (match_right[v] == kFree) {
        found = true;
      } else {
        stack.emplace_back(match_right[v], 0);
      }
    }
    if (!found) return false;
    for (std::size_t k = 0; k < path_right.size(); ++k) match_right[path_right[k]] = stack[k].first;
  }
  return true;
}

}  // namespace

double bottleneck(const PersistenceDiagram& da, const PersistenceDiagram& db) {
  const Augmented g{da.size(), db.size(), da.points, db.points};
  if (g.size() == 0) return 0.0;
  std::vector<double> candidates{0.0};
  for (std::size_t i = 0; i < g.n; ++i) candidates.push_back(diagonal_distance(g.a[i]));
  for (std::size_t j = 0; j < g.m; ++j) candidates.push_back(diagonal_distance(g.b[j]));
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.m; ++j) candidates.push_back(linf_distance(g.a[i], g.b[j]));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // Matching everything to the diagonal is always feasible, so the largest
  // diagonal distance bounds the answer.
  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (perfect_matching_exists(g, candidates[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return candidates[lo];
}

std::vector<std::size_t> hungarian(const std::vector<double>& cost, std::size_t n) {
  if (cost.size() != n * n) throw std::invalid_argument("hungarian: cost matrix must be n x n");
  // Potentials formulation with 1-based sentinel column 0.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), INFINITY);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = INFINITY;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

double wasserstein(const PersistenceDiagram& da, const PersistenceDiagram& db, double s) {
  if (!(s >= 1.0) || !std::isfinite(s)) throw std::invalid_argument("wasserstein: s must satisfy 1 <= s < inf");
  const std::size_t n = da.size(), m = db.size(), N = n + m;
  if (N == 0) return 0.0;
  // Every projection slot is interchangeable, so diagonal costs are uniform.
  std::vector<double> cost(N * N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      double c = 0.0;
      if (i < n && j < m) c = linf_distance(da.points[i], db.points[j]);
      else if (i < n) c = diagonal_distance(da.points[i]);
      else if (j < m) c = diagonal_distance(db.points[j]);
      cost[i * N + j] = std::pow(c, s);
    }
  const auto assignment = hungarian(cost, N);
  std::vector<double> chosen;
  chosen.reserve(N);
  for (std::size_t i = 0; i < N; ++i) chosen.push_back(cost[i * N + assignment[i]]);
  // Summation in ascending order makes the value independent of row order.
  std::sort(chosen.begin(), chosen.end());
  double total = 0.0;
  for (double c : chosen) total += c;
  return std::pow(total, 1.0 / s);
}

double bottleneck_by_kind(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  double worst = 0.0;
  for (auto kind : {PointKind::Ord0, PointKind::Rel1, PointKind::Ext0, PointKind::Ext1, PointKind::H0,
                    PointKind::H1}) {
    if (a.count(kind) == 0 && b.count(kind) == 0) continue;
    worst = std::max(worst, bottleneck(a.only(kind), b.only(kind)));
  }
  return worst;
}

}  // namespace perslay
