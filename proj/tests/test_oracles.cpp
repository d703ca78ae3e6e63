#include <cmath>

#include "doctest.h"
#include "perslay/layer.hpp"
#include "perslay/oracles.hpp"
#include "support.hpp"

using namespace perslay;
using namespace perslay::testing;

TEST_CASE("oracle examples") {
  PersistenceDiagram one;
  one.points = {{1, 3, PointKind::H1}};
  CHECK(landscape_oracle(one, 1, {2.0}) == std::vector<double>{2.0});
  CHECK(landscape_oracle(one, 2, {2.0}) == std::vector<double>{0.0});
  const auto unit = [](double, double) { return 1.0; };
  CHECK(silhouette_oracle(one, unit, {0.5, 2.0, 7.0}) == landscape_oracle(one, 1, {0.5, 2.0, 7.0}));
  CHECK(image_oracle(one, unit, 0.3, {{1.0, 3.0}}) == std::vector<double>{1.0});

  const PersistenceDiagram empty;
  CHECK(landscape_oracle(empty, 1, {0.0, 1.0}) == std::vector<double>{0.0, 0.0});
  CHECK(silhouette_oracle(empty, unit, {0.0}) == std::vector<double>{0.0});
  CHECK(image_oracle(empty, unit, 1.0, {{0, 0}}) == std::vector<double>{0.0});

  // Points below the diagonal are reflected.
  PersistenceDiagram below;
  below.points = {{3, 1, PointKind::Ext1}};
  CHECK(landscape_oracle(below, 1, {2.0}) == landscape_oracle(one, 1, {2.0}));
}

TEST_CASE("layer configurations reproduce the oracles") {
  Rng rng(17);
  const auto id = DiagramNormalizer::identity();
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = random_diagram(rng, rng.below(8));
    const std::size_t k = 1 + rng.below(3);

    Channel tri;
    tri.transform.kind = TransformKind::Triangle;
    tri.transform.samples = Tensor({6});
    for (double& t : tri.transform.samples.data) t = rng.uniform(0.0, 1.0);
    tri.op = {OpKind::TopK, k};
    const auto top = forward(tri, d, id);
    for (std::size_t r = 1; r <= k; ++r) {
      const auto ref = landscape_oracle(d, r, tri.transform.samples.data);
      for (std::size_t j = 0; j < ref.size(); ++j) CHECK(std::abs(top[j * k + r - 1] - ref[j]) <= 1e-12);
    }

    tri.op = {OpKind::Sum, 1};
    tri.weight.kind = WeightKind::Grid;
    tri.weight.side = 3;
    tri.weight.grid = Tensor({3, 3});
    for (double& g : tri.weight.grid.data) g = rng.uniform(0.0, 2.0);
    const auto w = [&](double x, double y) { return tri.weight(x, y); };
    const auto sil = forward(tri, d, id);
    const auto sref = silhouette_oracle(d, w, tri.transform.samples.data);
    for (std::size_t j = 0; j < sref.size(); ++j) CHECK(std::abs(sil[j] - sref[j]) <= 1e-12);

    Channel img = build_channel(parse_channel_spec("Im(5,(),3,sum)"), rng);
    img.weight.grid = tri.weight.grid;
    std::vector<std::array<double, 2>> centers;
    for (std::size_t c = 0; c < 25; ++c) centers.push_back({img.transform.centers[2 * c], img.transform.centers[2 * c + 1]});
    const auto im = forward(img, d, id);
    const auto iref = image_oracle(d, w, img.transform.sigma[0], centers);
    for (std::size_t j = 0; j < iref.size(); ++j) CHECK(std::abs(im[j] - iref[j]) <= 1e-12);
  }
}
