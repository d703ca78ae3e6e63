#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "perslay/filtration.hpp"

namespace perslay {

namespace {

constexpr double kIncircleEpsilon = 1e-9;
constexpr double kSuperScale = 1e3;

std::uint64_t directed_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

bool all_collinear(std::span<const Point2> pts) {
  for (std::size_t i = 2; i < pts.size(); ++i)
    if (std::abs(orientation(pts[0], pts[1], pts[i])) > kIncircleEpsilon) return false;
  return true;
}

Triangulation degenerate(std::vector<Point2> pts) {
  Triangulation tri;
  tri.points = std::move(pts);
  for (std::size_t i = 1; i < tri.points.size(); ++i)
    tri.edges.push_back({static_cast<int>(i - 1), static_cast<int>(i)});
  return tri;
}

}  // namespace

double orientation(const Point2& a, const Point2& b, const Point2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

std::vector<Point2> deduplicate_points(std::span<const Point2> points, double tolerance) {
  std::vector<Point2> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Point2> out;
  out.reserve(sorted.size());
  for (const auto& p : sorted) {
    bool duplicate = false;
    // Points within tolerance in x are contiguous at the tail of `out`.
    for (auto it = out.rbegin(); it != out.rend() && p.x - it->x <= tolerance; ++it) {
      if (std::abs(p.y - it->y) <= tolerance) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out.push_back(p);
  }
  return out;
}

Triangulation delaunay_2d(std::span<const Point2> input) {
  std::vector<Point2> pts = deduplicate_points(input);
  const std::size_t n = pts.size();
  if (n < 3) return degenerate(std::move(pts));

  // Predicates run on coordinates rescaled to the unit box.
  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const auto& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double extent = std::max({max_x - min_x, max_y - min_y, std::numeric_limits<double>::min()});
  std::vector<Point2> q(n + 3);
  for (std::size_t i = 0; i < n; ++i) q[i] = {(pts[i].x - min_x) / extent, (pts[i].y - min_y) / extent};
  if (all_collinear(std::span<const Point2>(q.data(), n))) return degenerate(std::move(pts));

  const int s0 = static_cast<int>(n), s1 = s0 + 1, s2 = s0 + 2;
  q[s0] = {0.5 - 2.0 * kSuperScale, -kSuperScale};
  q[s1] = {0.5 + 2.0 * kSuperScale, -kSuperScale};
  q[s2] = {0.5, 2.0 * kSuperScale};

  std::vector<std::array<int, 3>> tris;
  std::vector<char> alive;
  std::unordered_map<std::uint64_t, int> owner;  // directed edge -> triangle

  auto add_triangle = [&](int a, int b, int c) {
    const int id = static_cast<int>(tris.size());
    tris.push_back({a, b, c});
    alive.push_back(1);
    owner[directed_key(a, b)] = id;
    owner[directed_key(b, c)] = id;
    owner[directed_key(c, a)] = id;
  };
  auto remove_triangle = [&](int id) {
    alive[id] = 0;
    const auto& t = tris[id];
    for (int k = 0; k < 3; ++k) {
      auto it = owner.find(directed_key(t[k], t[(k + 1) % 3]));
      if (it != owner.end() && it->second == id) owner.erase(it);
    }
  };
  auto neighbour = [&](int a, int b) {
    auto it = owner.find(directed_key(b, a));
    return it == owner.end() ? -1 : it->second;
  };

  add_triangle(s0, s1, s2);

  for (int i = 0; i < static_cast<int>(n); ++i) {
    const Point2& p = q[i];
    int start = -1;
    for (int t = 0; t < static_cast<int>(tris.size()) && start < 0; ++t) {
      if (!alive[t]) continue;
      const auto& tr = tris[t];
      if (orientation(q[tr[0]], q[tr[1]], p) >= 0.0 && orientation(q[tr[1]], q[tr[2]], p) >= 0.0 &&
          orientation(q[tr[2]], q[tr[0]], p) >= 0.0)
        start = t;
    }
    if (start < 0) throw std::logic_error("delaunay_2d: point location failed");

    // Cavity: triangles whose circumcircle strictly contains p, grown from the
    // containing triangle so it stays connected.
    std::set<int> cavity{start};
    std::vector<int> stack{start};
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      const auto& tr = tris[t];
      for (int k = 0; k < 3; ++k) {
        const int nb = neighbour(tr[k], tr[(k + 1) % 3]);
        if (nb < 0 || cavity.count(nb)) continue;
        const auto& nt = tris[nb];
        if (incircle(q[nt[0]], q[nt[1]], q[nt[2]], p) > kIncircleEpsilon) {
          cavity.insert(nb);
          stack.push_back(nb);
        }
      }
    }

    // Grow the cavity until every boundary edge sees p strictly on its left.
    std::vector<std::array<int, 2>> boundary;
    for (bool grown = true; grown;) {
      grown = false;
      boundary.clear();
      for (int t : cavity) {
        const auto& tr = tris[t];
        for (int k = 0; k < 3; ++k) {
          const int a = tr[k], b = tr[(k + 1) % 3];
          const int nb = neighbour(a, b);
          if (nb >= 0 && cavity.count(nb)) continue;
          if (orientation(q[a], q[b], p) <= 0.0 && nb >= 0) {
            cavity.insert(nb);
            grown = true;
            break;
          }
          boundary.push_back({a, b});
        }
        if (grown) break;
      }
    }

    for (int t : cavity) remove_triangle(t);
    for (const auto& [a, b] : boundary) add_triangle(a, b, i);
  }

  Triangulation out;
  out.points = std::move(pts);
  std::set<std::array<int, 2>> edges;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    if (!alive[t]) continue;
    const auto& tr = tris[t];
    if (tr[0] >= s0 || tr[1] >= s0 || tr[2] >= s0) continue;
    out.triangles.push_back(tr);
    for (int k = 0; k < 3; ++k) {
      const int a = tr[k], b = tr[(k + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(out.triangles.begin(), out.triangles.end());
  out.edges.assign(edges.begin(), edges.end());
  return out;
}

FilteredComplex alpha_filtration(const Triangulation& tri) {
  const auto& pts = tri.points;
  std::vector<Simplex> simplices;
  for (std::size_t v = 0; v < pts.size(); ++v) simplices.push_back(Simplex::vertex(static_cast<int>(v), 0.0));

  // Opposite vertices and circumradii of the triangles incident to each edge.
  std::map<std::array<int, 2>, std::vector<std::pair<int, double>>> incident;
  for (const auto& t : tri.triangles) {
    const Point2 &a = pts[t[0]], &b = pts[t[1]], &c = pts[t[2]];
    const double bx = b.x - a.x, by = b.y - a.y, cx = c.x - a.x, cy = c.y - a.y;
    const double d = 2.0 * (bx * cy - by * cx);
    const double ux = (cy * (bx * bx + by * by) - by * (cx * cx + cy * cy)) / d;
    const double uy = (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by)) / d;
    const double r2 = ux * ux + uy * uy;
    simplices.push_back(Simplex::triangle(t[0], t[1], t[2], r2));
    for (int k = 0; k < 3; ++k) {
      const int p = t[k], q = t[(k + 1) % 3], opposite = t[(k + 2) % 3];
      incident[{std::min(p, q), std::max(p, q)}].emplace_back(opposite, r2);
    }
  }

  for (const auto& e : tri.edges) {
    const Point2 &a = pts[e[0]], &b = pts[e[1]];
    const double mx = 0.5 * (a.x + b.x), my = 0.5 * (a.y + b.y);
    const double half2 = 0.25 * ((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
    double value = half2;
    const auto it = incident.find(e);
    if (it != incident.end()) {
      bool gabriel = true;
      double min_tri = INFINITY;
      for (const auto& [opp, r2] : it->second) {
        const double dx = pts[opp].x - mx, dy = pts[opp].y - my;
        if (dx * dx + dy * dy < half2 * (1.0 - 1e-12)) gabriel = false;
        min_tri = std::min(min_tri, r2);
      }
      // Rounding can put a Gabriel half-length a hair above the circumradius.
      value = gabriel ? std::min(half2, min_tri) : min_tri;
    }
    simplices.push_back(Simplex::edge(e[0], e[1], value));
  }
  return FilteredComplex(std::move(simplices));
}

}  // namespace perslay
