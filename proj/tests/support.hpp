// Hand-rolled generators shared by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "perslay/diagram.hpp"
#include "perslay/graph.hpp"
#include "perslay/rng.hpp"

namespace perslay::testing {

/// Erdos-Renyi graph G(n, p).
inline Graph random_graph(Rng& rng, int n, double p) {
  Graph g(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (rng.bernoulli(p)) g.add_edge(a, b);
  return g;
}

/// Values drawn from a small integer palette (to force ties) or uniform.
inline VertexFunction random_function(Rng& rng, std::size_t n, bool ties) {
  VertexFunction f{std::vector<double>(n)};
  for (std::size_t v = 0; v < n; ++v)
    f[v] = ties ? static_cast<double>(rng.below(4)) : rng.uniform(-1.0, 1.0);
  return f;
}

/// Random points with death >= birth, coordinates in [lo, hi].
inline PersistenceDiagram random_diagram(Rng& rng, std::size_t n, double lo = 0.0, double hi = 1.0,
                                         PointKind kind = PointKind::H1) {
  PersistenceDiagram dg;
  for (std::size_t i = 0; i < n; ++i) {
    double a = rng.uniform(lo, hi), b = rng.uniform(lo, hi);
    if (a > b) std::swap(a, b);
    dg.points.push_back({a, b, kind});
  }
  return dg;
}

inline bool same_points(std::vector<DiagramPoint> a, std::vector<DiagramPoint> b) {
  std::sort(a.begin(), a.end(), point_less);
  std::sort(b.begin(), b.end(), point_less);
  return a == b;
}

}  // namespace perslay::testing
