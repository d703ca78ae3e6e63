#include "perslay/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace perslay {

Simplex Simplex::vertex(int a, double value) { return Simplex{0, {a, -1, -1}, value}; }

Simplex Simplex::edge(int a, int b, double value) {
  if (a > b) std::swap(a, b);
  return Simplex{1, {a, b, -1}, value};
}

Simplex Simplex::triangle(int a, int b, int c, double value) {
  std::array<int, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  return Simplex{2, v, value};
}

FilteredComplex::FilteredComplex(std::vector<Simplex> simplices, FiltrationDirection direction)
    : simplices_(std::move(simplices)), direction_(direction) {
  const double sign = direction_ == FiltrationDirection::Ascending ? 1.0 : -1.0;
  std::sort(simplices_.begin(), simplices_.end(), [sign](const Simplex& a, const Simplex& b) {
    const double ka = sign * a.value;
    const double kb = sign * b.value;
    if (ka != kb) return ka < kb;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.vertices < b.vertices;
  });

  std::map<std::array<int, 3>, std::size_t> position;
  for (std::size_t i = 0; i < simplices_.size(); ++i) {
    const auto& s = simplices_[i];
    if (s.dim < 0 || s.dim > 2) throw std::invalid_argument("FilteredComplex: dimension must be 0, 1 or 2");
    if (!std::isfinite(s.value)) throw std::invalid_argument("FilteredComplex: non-finite filtration value");
    if (!position.emplace(s.vertices, i).second)
      throw std::invalid_argument("FilteredComplex: duplicate simplex");
  }

  boundaries_.resize(simplices_.size());
  for (std::size_t i = 0; i < simplices_.size(); ++i) {
    const auto& s = simplices_[i];
    if (s.dim == 0) continue;
    auto& bd = boundaries_[i];
    for (int drop = 0; drop <= s.dim; ++drop) {
      std::array<int, 3> face{-1, -1, -1};
      int k = 0;
      for (int j = 0; j <= s.dim; ++j)
        if (j != drop) face[k++] = s.vertices[j];
      const auto it = position.find(face);
      if (it == position.end())
        throw std::invalid_argument("FilteredComplex: missing face of simplex at position " +
                                    std::to_string(i));
      if (it->second > i)
        throw std::invalid_argument("FilteredComplex: non-monotone filtration, face enters after coface at position " +
                                    std::to_string(i));
      bd.push_back(it->second);
    }
    std::sort(bd.begin(), bd.end());
  }
}

double FilteredComplex::key(std::size_t i) const {
  return direction_ == FiltrationDirection::Ascending ? simplices_[i].value : -simplices_[i].value;
}

int FilteredComplex::max_dimension() const {
  int d = -1;
  for (const auto& s : simplices_) d = std::max(d, s.dim);
  return d;
}

double FilteredComplex::max_value() const {
  double m = -INFINITY;
  for (const auto& s : simplices_) m = std::max(m, s.value);
  return m;
}

namespace {

FilteredComplex star_filtration(const Graph& g, const VertexFunction& f, bool lower) {
  if (f.size() != g.n_vertices())
    throw std::invalid_argument("star filtration: function length does not match vertex count");
  std::vector<Simplex> simplices;
  simplices.reserve(g.n_vertices() + g.n_edges());
  for (std::size_t v = 0; v < g.n_vertices(); ++v) {
    if (!std::isfinite(f[v])) throw std::invalid_argument("star filtration: non-finite vertex value");
    simplices.push_back(Simplex::vertex(static_cast<int>(v), f[v]));
  }
  for (const auto& e : g.edges()) {
    const double value = lower ? std::max(f[e.u], f[e.v]) : std::min(f[e.u], f[e.v]);
    simplices.push_back(Simplex::edge(e.u, e.v, value));
  }
  return FilteredComplex(std::move(simplices),
                         lower ? FiltrationDirection::Ascending : FiltrationDirection::Descending);
}

}  // namespace

FilteredComplex lower_star(const Graph& g, const VertexFunction& f) { return star_filtration(g, f, true); }

FilteredComplex upper_star(const Graph& g, const VertexFunction& f) { return star_filtration(g, f, false); }

}  // namespace perslay
