#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "perslay/graph.hpp"

namespace perslay {

/// Simplex of dimension 0, 1 or 2 with sorted vertices (unused slots are -1).
struct Simplex {
  int dim = 0;
  std::array<int, 3> vertices{-1, -1, -1};
  double value = 0.0;

  static Simplex vertex(int a, double value);
  static Simplex edge(int a, int b, double value);
  static Simplex triangle(int a, int b, int c, double value);

  std::span<const int> verts() const { return {vertices.data(), static_cast<std::size_t>(dim + 1)}; }
};

/// Sublevel complexes enter simplices by increasing value, superlevel ones by
/// decreasing value. Values always hold the original function thresholds.
enum class FiltrationDirection { Ascending, Descending };

/// Simplicial complex of dimension <= 2 stored in filtration order.
///
/// The order is the lexicographic sort of (key, dimension, vertex tuple),
/// where key is the value for ascending filtrations and its negation for
/// descending ones. Construction rejects missing faces and faces entering
/// after their cofaces.
class FilteredComplex {
 public:
  FilteredComplex() = default;
  explicit FilteredComplex(std::vector<Simplex> simplices,
                           FiltrationDirection direction = FiltrationDirection::Ascending);

  const std::vector<Simplex>& simplices() const { return simplices_; }
  std::size_t size() const { return simplices_.size(); }
  const Simplex& operator[](std::size_t i) const { return simplices_[i]; }
  FiltrationDirection direction() const { return direction_; }

  /// Sort key used for ordering (value or -value).
  double key(std::size_t i) const;

  /// Boundary of simplex i as ascending positions in the filtration order.
  const std::vector<std::size_t>& boundary(std::size_t i) const { return boundaries_[i]; }

  int max_dimension() const;
  double max_value() const;

 private:
  std::vector<Simplex> simplices_;
  std::vector<std::vector<std::size_t>> boundaries_;
  FiltrationDirection direction_ = FiltrationDirection::Ascending;
};

/// Vertex value f(v), edge value max of endpoints.
FilteredComplex lower_star(const Graph& g, const VertexFunction& f);

/// Vertex value f(v), edge value min of endpoints, filtered by decreasing value.
FilteredComplex upper_star(const Graph& g, const VertexFunction& f);

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
  friend auto operator<=>(const Point2&, const Point2&) = default;
};

/// 2D triangulation. Triangles are counter-clockwise index triples into
/// `points`; edges are sorted pairs.
struct Triangulation {
  std::vector<Point2> points;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> triangles;
};

/// Removes points closer than `tolerance` (infinity norm) to an earlier
/// point in (x, y) order. Output is sorted by (x, y).
std::vector<Point2> deduplicate_points(std::span<const Point2> points, double tolerance = 1e-12);

/// Bowyer-Watson Delaunay triangulation with points inserted in (x, y)
/// order. Fewer than 3 distinct points or collinear input produce vertices and
/// the chain of edges between consecutive sorted points only.
Triangulation delaunay_2d(std::span<const Point2> points);

/// Positive when d lies strictly inside the circle through a, b, c (ccw).
double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d);
double orientation(const Point2& a, const Point2& b, const Point2& c);

/// Alpha filtration on a Delaunay triangulation, values are squared radii.
FilteredComplex alpha_filtration(const Triangulation& tri);

}  // namespace perslay
