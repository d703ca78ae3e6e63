#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "perslay/diagram.hpp"
#include "perslay/filtration.hpp"
#include "perslay/graph.hpp"

namespace perslay {

/// Birth/death positions in filtration order; death is empty for essential
/// classes.
struct PersistencePair {
  std::size_t birth = 0;
  std::optional<std::size_t> death;
};

/// Z/2 column reduction. With `clearing`, columns are processed by decreasing
/// dimension and columns known to be positive are skipped. Pairs come out
/// sorted by birth position.
std::vector<PersistencePair> reduce(const FilteredComplex& fc, bool clearing = true);

/// H0 (and H1 when max_dim == 1) diagram. Zero-length finite pairs are
/// dropped; essential classes die at the largest filtration value.
PersistenceDiagram ordinary_persistence(const FilteredComplex& fc, int max_dim);

/// Extended persistence via reduction of the coned graph. Reference
/// implementation.
///
/// Conventions: Ord0 = (f at the younger minimum, f at the merging edge),
/// Rel1 = (f at the merging edge, f at the younger maximum), Ext0 = (min, max)
/// per component, Ext1 = (ascending value, descending value) so death <=
/// birth. Ord0/Rel1 points on the diagonal are dropped, Ext0/Ext1 ones kept.
PersistenceDiagram extended_persistence_cone(const Graph& g, const VertexFunction& f);

/// Same diagram as extended_persistence_cone, computed with two union-find
/// sweeps and a Z/2 elimination over ascending non-tree edges.
PersistenceDiagram extended_persistence_fast(const Graph& g, const VertexFunction& f);

}  // namespace perslay
