#include "perslay/persistence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iterator>
#include <numeric>
#include <stdexcept>

namespace perslay {

std::vector<PersistencePair> reduce(const FilteredComplex& fc, bool clearing) {
  const std::size_t n = fc.size();
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::vector<std::size_t>> columns(n);
  std::vector<std::size_t> column_with_low(n, kNone);
  std::vector<std::size_t> death_of(n, kNone);
  std::vector<char> is_death(n, 0);
  std::vector<char> cleared(n, 0);

  auto reduce_column = [&](std::size_t j) {
    std::vector<std::size_t> col = fc.boundary(j);
    std::vector<std::size_t> scratch;
    while (!col.empty()) {
      const std::size_t other = column_with_low[col.back()];
      if (other == kNone) break;
      scratch.clear();
      std::set_symmetric_difference(col.begin(), col.end(), columns[other].begin(), columns[other].end(),
                                    std::back_inserter(scratch));
      col.swap(scratch);
    }
    if (col.empty()) return;
    const std::size_t low = col.back();
    column_with_low[low] = j;
    death_of[low] = j;
    is_death[j] = 1;
    if (clearing) cleared[low] = 1;
    columns[j] = std::move(col);
  };

  if (clearing) {
    for (int dim = fc.max_dimension(); dim >= 1; --dim)
      for (std::size_t j = 0; j < n; ++j)
        if (fc[j].dim == dim && !cleared[j]) reduce_column(j);
  } else {
    for (std::size_t j = 0; j < n; ++j) reduce_column(j);
  }

  std::vector<PersistencePair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_death[i]) continue;
    PersistencePair p{i, std::nullopt};
    if (death_of[i] != kNone) p.death = death_of[i];
    pairs.push_back(p);
  }
  return pairs;
}

PersistenceDiagram ordinary_persistence(const FilteredComplex& fc, int max_dim) {
  if (max_dim != 0 && max_dim != 1) throw std::invalid_argument("ordinary_persistence: max_dim must be 0 or 1");
  PersistenceDiagram dg;
  dg.provenance = "ordinary persistence; essential death = max filtration value";
  if (fc.size() == 0) return dg;
  const double top = fc.max_value();
  for (const auto& pair : reduce(fc)) {
    const Simplex& b = fc[pair.birth];
    if (b.dim > max_dim) continue;
    const PointKind kind = b.dim == 0 ? PointKind::H0 : PointKind::H1;
    if (pair.death) {
      const double death = fc[*pair.death].value;
      if (death == b.value) continue;
      dg.points.push_back({b.value, death, kind});
    } else {
      dg.points.push_back({b.value, top, kind});
    }
  }
  return dg;
}

namespace {

void check_function(const Graph& g, const VertexFunction& f) {
  if (f.size() != g.n_vertices())
    throw std::invalid_argument("extended persistence: function length does not match vertex count");
  for (double x : f.values)
    if (!std::isfinite(x)) throw std::invalid_argument("extended persistence: non-finite vertex value");
}

constexpr const char* kExtendedProvenance = "extended persistence (lower-star up, upper-star down)";

}  // namespace

PersistenceDiagram extended_persistence_cone(const Graph& g, const VertexFunction& f) {
  check_function(g, f);
  PersistenceDiagram dg;
  dg.provenance = kExtendedProvenance;
  const int n = static_cast<int>(g.n_vertices());
  if (n == 0) return dg;

  // Filtration values are integer ranks so ascending and reflected descending
  // values never collide; the apex comes first.
  std::vector<double> levels = f.values;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const int k = static_cast<int>(levels.size());
  auto rank = [&](double x) {
    return static_cast<int>(std::lower_bound(levels.begin(), levels.end(), x) - levels.begin());
  };
  const int apex = n;
  const double top = 2.0 * k;

  std::vector<Simplex> simplices;
  simplices.push_back(Simplex::vertex(apex, -1.0));
  for (int v = 0; v < n; ++v) {
    simplices.push_back(Simplex::vertex(v, rank(f[v])));
    simplices.push_back(Simplex::edge(v, apex, top - rank(f[v])));
  }
  for (const auto& e : g.edges()) {
    simplices.push_back(Simplex::edge(e.u, e.v, std::max(rank(f[e.u]), rank(f[e.v]))));
    simplices.push_back(Simplex::triangle(e.u, e.v, apex, top - std::min(rank(f[e.u]), rank(f[e.v]))));
  }
  const FilteredComplex fc(std::move(simplices));

  auto coned = [apex](const Simplex& s) { return s.vertices[s.dim] == apex; };
  auto level = [&](const Simplex& s) {
    const int r = static_cast<int>(std::lround(s.value));
    return coned(s) ? levels[2 * k - r] : levels[r];
  };

  for (const auto& pair : reduce(fc)) {
    const Simplex& b = fc[pair.birth];
    if (!pair.death) {
      if (!(b.dim == 0 && b.vertices[0] == apex))
        throw std::logic_error("extended_persistence_cone: unexpected essential class");
      continue;
    }
    const Simplex& d = fc[*pair.death];
    const double lb = level(b), ld = level(d);
    if (!coned(b) && b.dim == 0 && !coned(d)) {
      if (lb != ld) dg.points.push_back({lb, ld, PointKind::Ord0});
    } else if (!coned(b) && b.dim == 0) {
      dg.points.push_back({lb, ld, PointKind::Ext0});
    } else if (!coned(b) && b.dim == 1) {
      dg.points.push_back({lb, ld, PointKind::Ext1});
    } else if (coned(b) && b.dim == 1 && d.dim == 2) {
      if (lb != ld) dg.points.push_back({ld, lb, PointKind::Rel1});
    } else {
      throw std::logic_error("extended_persistence_cone: unexpected pair type");
    }
  }
  return dg;
}

namespace {

/// Union-find tracking the elder vertex of each component.
class ElderForest {
 public:
  template <class Older>
  ElderForest(std::size_t n, Older older) : uf_(n), elder_(n), older_(older) {
    std::iota(elder_.begin(), elder_.end(), 0);
  }

  int elder(int v) { return elder_[uf_.find(v)]; }

  /// Returns the vertex whose component dies, or -1 when already joined.
  int merge(int a, int b) {
    const int ea = elder(a), eb = elder(b);
    if (uf_.find(a) == uf_.find(b)) return -1;
    const bool a_older = older_(ea, eb);
    uf_.unite(a, b);
    elder_[uf_.find(a)] = a_older ? ea : eb;
    return a_older ? eb : ea;
  }

 private:
  UnionFind uf_;
  std::vector<int> elder_;
  std::function<bool(int, int)> older_;
};

struct BitRow {
  std::vector<std::uint64_t> words;

  explicit BitRow(std::size_t bits) : words((bits + 63) / 64, 0) {}
  void flip(std::size_t i) { words[i / 64] ^= std::uint64_t{1} << (i % 64); }
  void add(const BitRow& other) {
    for (std::size_t w = 0; w < words.size(); ++w) words[w] ^= other.words[w];
  }
  /// Highest set bit, or -1.
  long top() const {
    for (std::size_t w = words.size(); w-- > 0;)
      if (words[w]) return static_cast<long>(w * 64 + 63 - std::countl_zero(words[w]));
    return -1;
  }
};

}  // namespace

PersistenceDiagram extended_persistence_fast(const Graph& g, const VertexFunction& f) {
  check_function(g, f);
  PersistenceDiagram dg;
  dg.provenance = kExtendedProvenance;
  const std::size_t n = g.n_vertices();
  if (n == 0) return dg;
  const auto& edges = g.edges();
  const std::size_t m = edges.size();
  auto hi = [&](const Edge& e) { return std::max(f[e.u], f[e.v]); };
  auto lo = [&](const Edge& e) { return std::min(f[e.u], f[e.v]); };

  // Ascending sweep: Ord0 by the elder rule; cycle-closing edges are indexed
  // in ascending order and span the cycle space.
  std::vector<std::size_t> up(m);
  std::iota(up.begin(), up.end(), 0);
  std::sort(up.begin(), up.end(), [&](std::size_t a, std::size_t b) {
    if (hi(edges[a]) != hi(edges[b])) return hi(edges[a]) < hi(edges[b]);
    return edges[a] < edges[b];
  });
  ElderForest rising(n, [&](int a, int b) { return f[a] != f[b] ? f[a] < f[b] : a < b; });
  std::vector<long> cycle_id(m, -1);
  std::vector<std::size_t> cycle_edge;
  for (std::size_t e : up) {
    const int dead = rising.merge(edges[e].u, edges[e].v);
    if (dead < 0) {
      cycle_id[e] = static_cast<long>(cycle_edge.size());
      cycle_edge.push_back(e);
    } else if (f[dead] != hi(edges[e])) {
      dg.points.push_back({f[dead], hi(edges[e]), PointKind::Ord0});
    }
  }

  // Components.
  UnionFind comps(n);
  for (const auto& e : edges) comps.unite(e.u, e.v);
  std::vector<double> cmin(n, INFINITY), cmax(n, -INFINITY);
  for (std::size_t v = 0; v < n; ++v) {
    const int r = comps.find(static_cast<int>(v));
    cmin[r] = std::min(cmin[r], f[v]);
    cmax[r] = std::max(cmax[r], f[v]);
  }
  for (std::size_t v = 0; v < n; ++v)
    if (comps.find(static_cast<int>(v)) == static_cast<int>(v)) dg.points.push_back({cmin[v], cmax[v], PointKind::Ext0});

  // Descending sweep: Rel1 by the elder rule on superlevel sets.
  std::vector<std::size_t> down(m);
  std::iota(down.begin(), down.end(), 0);
  std::sort(down.begin(), down.end(), [&](std::size_t a, std::size_t b) {
    if (lo(edges[a]) != lo(edges[b])) return lo(edges[a]) > lo(edges[b]);
    return edges[a] < edges[b];
  });
  ElderForest falling(n, [&](int a, int b) { return f[a] != f[b] ? f[a] > f[b] : a < b; });
  std::vector<std::vector<std::pair<int, std::size_t>>> tree(n);
  std::vector<std::size_t> closing;
  for (std::size_t e : down) {
    const int dead = falling.merge(edges[e].u, edges[e].v);
    if (dead < 0) {
      closing.push_back(e);
      continue;
    }
    tree[edges[e].u].emplace_back(edges[e].v, e);
    tree[edges[e].v].emplace_back(edges[e].u, e);
    if (f[dead] != lo(edges[e])) dg.points.push_back({lo(edges[e]), f[dead], PointKind::Rel1});
  }
  if (closing.empty()) return dg;

  // Root the descending forest for path queries.
  std::vector<int> parent(n, -1), depth(n, -1);
  std::vector<std::size_t> parent_edge(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    if (depth[s] >= 0) continue;
    depth[s] = 0;
    std::vector<int> stack{static_cast<int>(s)};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& [w, e] : tree[v]) {
        if (depth[w] >= 0) continue;
        depth[w] = depth[v] + 1;
        parent[w] = v;
        parent_edge[w] = e;
        stack.push_back(w);
      }
    }
  }

  // Each closing edge spans a cycle with the forest path; its reduced
  // coordinates over the ascending cycle basis pick the ascending edge that
  // pairs with it.
  const std::size_t beta1 = cycle_edge.size();
  std::vector<std::optional<BitRow>> reduced(beta1);
  for (std::size_t e : closing) {
    BitRow row(beta1);
    auto touch = [&](std::size_t edge) {
      if (cycle_id[edge] >= 0) row.flip(static_cast<std::size_t>(cycle_id[edge]));
    };
    touch(e);
    int a = edges[e].u, b = edges[e].v;
    while (a != b) {
      if (depth[a] < depth[b]) std::swap(a, b);
      touch(parent_edge[a]);
      a = parent[a];
    }
    long pivot = row.top();
    while (pivot >= 0 && reduced[pivot]) {
      row.add(*reduced[pivot]);
      pivot = row.top();
    }
    if (pivot < 0) throw std::logic_error("extended_persistence_fast: dependent cycle");
    dg.points.push_back({hi(edges[cycle_edge[pivot]]), lo(edges[e]), PointKind::Ext1});
    reduced[pivot] = std::move(row);
  }
  return dg;
}

}  // namespace perslay
