#include "perslay/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace perslay {

Graph::Graph(std::size_t n_vertices, std::span<const std::pair<int, int>> edges)
    : n_(n_vertices) {
  for (const auto& [a, b] : edges) add_edge(a, b);
}

Graph::Graph(std::size_t n_vertices, std::span<const std::pair<int, int>> edges,
             std::span<const double> weights)
    : n_(n_vertices) {
  if (weights.size() != edges.size())
    throw std::invalid_argument("Graph: weight count does not match edge count");
  for (std::size_t i = 0; i < edges.size(); ++i)
    add_edge(edges[i].first, edges[i].second, weights[i]);
}

void Graph::add_edge(int a, int b, double weight) {
  const auto n = static_cast<int>(n_);
  if (a < 0 || b < 0 || a >= n || b >= n)
    throw std::invalid_argument("Graph: edge endpoint out of range (" + std::to_string(a) +
                                ", " + std::to_string(b) + ")");
  if (a == b) throw std::invalid_argument("Graph: self-loop at vertex " + std::to_string(a));
  if (!(weight > 0.0) || !std::isfinite(weight))
    throw std::invalid_argument("Graph: edge weight must be positive and finite");
  Edge e{std::min(a, b), std::max(a, b)};
  if (std::find(edges_.begin(), edges_.end(), e) != edges_.end())
    throw std::invalid_argument("Graph: duplicate edge (" + std::to_string(e.u) + ", " +
                                std::to_string(e.v) + ")");
  edges_.push_back(e);
  weights_.push_back(weight);
}

std::vector<std::vector<int>> Graph::adjacency() const {
  std::vector<std::vector<int>> adj(n_);
  for (const auto& e : edges_) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  return adj;
}

std::size_t Graph::component_count() const {
  UnionFind uf(n_);
  std::size_t count = n_;
  for (const auto& e : edges_)
    if (uf.unite(e.u, e.v)) --count;
  return count;
}

Graph Graph::with_weights(std::span<const double> weights) const {
  if (weights.size() != edges_.size())
    throw std::invalid_argument("Graph::with_weights: size mismatch");
  Graph g(n_);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (!(weights[i] > 0.0)) throw std::invalid_argument("Graph: edge weight must be positive");
    g.edges_.push_back(edges_[i]);
    g.weights_.push_back(weights[i]);
  }
  return g;
}

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

int UnionFind::find(int x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool UnionFind::unite(int a, int b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

}  // namespace perslay
