#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace perslay {

/// Undirected edge with endpoints stored as (min, max).
struct Edge {
  int u = 0;
  int v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph with optional positive edge weights.
///
/// Construction validates the invariants: no self-loops, no duplicate edges,
/// endpoints in [0, n) and strictly positive weights. Violations throw
/// std::invalid_argument.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n_vertices) : n_(n_vertices) {}
  Graph(std::size_t n_vertices, std::span<const std::pair<int, int>> edges);
  Graph(std::size_t n_vertices, std::span<const std::pair<int, int>> edges,
        std::span<const double> weights);

  void add_edge(int a, int b, double weight = 1.0);

  std::size_t n_vertices() const { return n_; }
  std::size_t n_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Neighbour lists, rebuilt on demand.
  std::vector<std::vector<int>> adjacency() const;

  /// Number of connected components.
  std::size_t component_count() const;

  /// Same topology, new weights (one per edge, same order as edges()).
  Graph with_weights(std::span<const double> weights) const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> weights_;
};

/// Real value per vertex.
struct VertexFunction {
  std::vector<double> values;

  VertexFunction() = default;
  explicit VertexFunction(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);
  int find(int x);
  /// Returns false when already joined.
  bool unite(int a, int b);

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

}  // namespace perslay
