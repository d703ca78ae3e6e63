#include <cmath>

#include "brute_force.hpp"
#include "doctest.h"
#include "perslay/metrics.hpp"
#include "support.hpp"

using namespace perslay;
using namespace perslay::testing;

namespace {

PersistenceDiagram dg(std::vector<std::pair<double, double>> pts) {
  PersistenceDiagram d;
  for (auto [b, e] : pts) d.points.push_back({b, e, PointKind::H1});
  return d;
}

}  // namespace

TEST_CASE("bottleneck examples") {
  const auto a = dg({{0, 2}, {0.5, 1.5}, {1, 4}});
  CHECK(bottleneck(a, a) == 0.0);
  CHECK(bottleneck(dg({{0, 2}}), dg({})) == 1.0);
  CHECK(bottleneck(dg({{0, 2}, {0, 4}}), dg({{0, 2}})) == 2.0);
  CHECK(bottleneck(dg({}), dg({})) == 0.0);
}

TEST_CASE("wasserstein examples") {
  const auto a = dg({{0, 2}, {0.5, 1.5}, {1, 4}});
  CHECK(wasserstein(a, a, 1.0) == 0.0);
  CHECK(wasserstein(a, a, 2.0) == 0.0);
  CHECK(wasserstein(dg({{0, 2}}), dg({}), 1.0) == 1.0);
  CHECK(wasserstein(dg({{0, 2}}), dg({{0, 2}, {1, 3}}), 1.0) == 1.0);
  CHECK(wasserstein(dg({{0, 2}}), dg({{0, 2}, {1, 3}}), 2.0) == 1.0);
  CHECK_THROWS_AS(wasserstein(a, a, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(wasserstein(a, a, INFINITY), std::invalid_argument);
}

TEST_CASE("hungarian solves a known assignment") {
  const std::vector<double> cost{4, 1, 3, 2, 0, 5, 3, 2, 2};
  const auto a = hungarian(cost, 3);
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) total += cost[i * 3 + a[i]];
  CHECK(total == 5.0);
}

TEST_CASE("distances equal exhaustive enumeration") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_diagram(rng, rng.below(6));
    const auto b = random_diagram(rng, rng.below(6));
    CHECK(bottleneck(a, b) == brute_bottleneck(a, b));
    CHECK(wasserstein(a, b, 1.0) == brute_wasserstein(a, b, 1.0));
    CHECK(wasserstein(a, b, 2.0) == doctest::Approx(brute_wasserstein(a, b, 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("metric axioms on random diagrams") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_diagram(rng, rng.below(7));
    const auto b = random_diagram(rng, rng.below(7));
    const auto c = random_diagram(rng, rng.below(7));
    CHECK(bottleneck(a, b) == bottleneck(b, a));
    CHECK(wasserstein(a, b, 1.0) == wasserstein(b, a, 1.0));
    CHECK(bottleneck(a, c) <= bottleneck(a, b) + bottleneck(b, c) + 1e-9);
    CHECK(wasserstein(a, c, 1.0) <= wasserstein(a, b, 1.0) + wasserstein(b, c, 1.0) + 1e-9);
    CHECK(wasserstein(a, c, 2.0) <= wasserstein(a, b, 2.0) + wasserstein(b, c, 2.0) + 1e-9);
    // Shuffled copy is the same multiset.
    auto shuffled = a;
    rng.shuffle(shuffled.points);
    CHECK(bottleneck(a, shuffled) == 0.0);
    CHECK(wasserstein(a, shuffled, 1.0) == 0.0);
    if (!a.empty()) {
      auto moved = a;
      moved.points[0].death += 0.25;
      CHECK(bottleneck(a, moved) > 0.0);
    }
  }
}

TEST_CASE("large s approaches the bottleneck") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_diagram(rng, 1 + rng.below(8));
    const auto b = random_diagram(rng, 1 + rng.below(8));
    const double bd = bottleneck(a, b);
    CHECK(std::abs(wasserstein(a, b, 64.0) - bd) <= 0.05 * bd);
  }
}

TEST_CASE("per-kind bottleneck takes the worst kind") {
  PersistenceDiagram a, b;
  a.points = {{0, 2, PointKind::Ord0}, {0, 1, PointKind::Ext0}};
  b.points = {{0, 2, PointKind::Ext0}};
  // Ord0: (0,2) vs nothing = 1; Ext0: (0,1) vs (0,2) = 1.
  CHECK(bottleneck_by_kind(a, b) == 1.0);
  b.points.push_back({3, 0, PointKind::Ext1});
  CHECK(bottleneck_by_kind(a, b) == 1.5);
}
