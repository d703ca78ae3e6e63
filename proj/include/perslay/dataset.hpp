#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "perslay/diagram.hpp"
#include "perslay/filtration.hpp"
#include "perslay/graph.hpp"

namespace perslay {

/// Labelled graphs or labelled point clouds; exactly one of the two lists is
/// populated.
struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  std::vector<std::vector<Point2>> clouds;
  std::vector<std::size_t> labels;        // 0-based, contiguous
  std::vector<std::string> label_names;   // original token of each class
  std::vector<std::vector<long>> node_labels;  // optional, unused by the model

  std::size_t size() const { return labels.size(); }
  std::size_t classes() const { return label_names.size(); }
  bool has_graphs() const { return !graphs.empty(); }
};

/// Lines of the adjacency file that were skipped while loading.
struct LoadReport {
  std::size_t self_loops = 0;
  std::size_t mirrored = 0;    // reverse direction of an edge already read
  std::size_t duplicates = 0;  // same direction repeated
};

/// Reads `<name>_A.txt`, `<name>_graph_indicator.txt` and
/// `<name>_graph_labels.txt` (plus `<name>_node_labels.txt` when present)
/// from `dir`. Throws std::runtime_error naming the file and line on
/// malformed input.
Dataset load_benchmark(const std::string& dir, const std::string& name, LoadReport* report = nullptr);

/// Parameters of the five orbit classes.
inline constexpr double kOrbitRates[5] = {2.5, 3.5, 4.0, 4.1, 4.3};

/// Iterates 1..n of x' = x + r y (1 - y) mod 1, y' = y + r x' (1 - x') mod 1.
std::vector<Point2> generate_orbit(double r, double x0, double y0, std::size_t n);

/// per_class orbits for each rate, starting points uniform in [0,1)^2.
/// Items are ordered class by class.
Dataset build_orbit_dataset(std::size_t per_class, std::size_t points, std::uint64_t seed);

/// Orbit clouds as text: `orbit_labels.txt` with one class per line and
/// `orbit_points.txt` with `item x y` lines at 17 significant digits.
void save_orbit_dataset(const std::string& dir, const Dataset& ds);
Dataset load_orbit_dataset(const std::string& dir);

/// The k points farthest from the diagonal; ties keep the lexicographically
/// smaller point. A diagram with at most k points is returned unchanged;
/// otherwise the result is sorted with point_less.
PersistenceDiagram prom(const PersistenceDiagram& dg, std::size_t k);

}  // namespace perslay
