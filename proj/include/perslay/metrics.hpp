#pragma once

#include <cstddef>
#include <vector>

#include "perslay/diagram.hpp"

namespace perslay {

/// Infinity-norm displacement between two points.
double linf_distance(const DiagramPoint& a, const DiagramPoint& b);

/// Infinity-norm distance to the diagonal, |death - birth| / 2.
double diagonal_distance(const DiagramPoint& p);

/// Bottleneck distance with infinity-norm ground cost. Points are compared
/// regardless of kind; restrict both diagrams to one kind first.
double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b);

/// s-Wasserstein distance (sum cost^s)^(1/s) with infinity-norm ground cost.
/// Throws std::invalid_argument unless 1 <= s < infinity.
double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, double s);

/// Largest per-kind bottleneck distance over every kind present in either.
double bottleneck_by_kind(const PersistenceDiagram& a, const PersistenceDiagram& b);

/// Minimum-cost perfect assignment on a square row-major matrix. Returns the
/// column assigned to each row.
std::vector<std::size_t> hungarian(const std::vector<double>& cost, std::size_t n);

}  // namespace perslay
