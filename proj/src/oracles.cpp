#include "perslay/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace perslay {

namespace {

std::array<double, 2> upper(const DiagramPoint& p) {
  return p.death < p.birth ? std::array<double, 2>{p.death, p.birth} : std::array<double, 2>{p.birth, p.death};
}

double tent(const std::array<double, 2>& p, double t) { return std::max(0.0, p[1] - std::abs(t - p[0])); }

}  // namespace

std::vector<double> landscape_oracle(const PersistenceDiagram& dg, std::size_t k, const std::vector<double>& samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (double t : samples) {
    std::vector<double> values;
    for (const auto& p : dg.points) values.push_back(tent(upper(p), t));
    std::sort(values.begin(), values.end(), std::greater<>());
    out.push_back(k >= 1 && k <= values.size() ? values[k - 1] : 0.0);
  }
  return out;
}

std::vector<double> silhouette_oracle(const PersistenceDiagram& dg, const PointWeight& w,
                                      const std::vector<double>& samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (double t : samples) {
    double s = 0.0;
    for (const auto& p : dg.points) {
      const auto q = upper(p);
      s += w(q[0], q[1]) * tent(q, t);
    }
    out.push_back(s);
  }
  return out;
}

std::vector<double> image_oracle(const PersistenceDiagram& dg, const PointWeight& w, double sigma,
                                 const std::vector<std::array<double, 2>>& centers) {
  std::vector<double> out;
  out.reserve(centers.size());
  for (const auto& c : centers) {
    double s = 0.0;
    for (const auto& p : dg.points) {
      const auto q = upper(p);
      const double r2 = (q[0] - c[0]) * (q[0] - c[0]) + (q[1] - c[1]) * (q[1] - c[1]);
      s += w(q[0], q[1]) * std::exp(-r2 / (2.0 * sigma * sigma));
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace perslay
