#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "perslay/cache.hpp"
#include "perslay/config.hpp"
#include "perslay/dataset.hpp"
#include "perslay/experiment.hpp"
#include "support.hpp"

using namespace perslay;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("perslay_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void two_triangles(const fs::path& dir, const std::string& edges) {
  write(dir / "T_A.txt", edges);
  write(dir / "T_graph_indicator.txt", "1\n1\n1\n2\n2\n2\n");
  write(dir / "T_graph_labels.txt", "5\n-1\n");
}

}  // namespace

TEST_CASE("benchmark format") {
  TempDir tmp;
  two_triangles(tmp.path, "1, 2\n2, 1\n2, 3\n3, 1\n4, 5\n5, 6\n6, 4\n4, 4\n5, 6\n");
  LoadReport rep;
  const auto ds = load_benchmark(tmp.path.string(), "T", &rep);
  REQUIRE(ds.size() == 2);
  CHECK(ds.graphs[0].n_vertices() == 3);
  CHECK(ds.graphs[0].n_edges() == 3);
  CHECK(ds.graphs[1].n_edges() == 3);
  CHECK(ds.labels == std::vector<std::size_t>{1, 0});
  CHECK(ds.label_names == std::vector<std::string>{"-1", "5"});
  CHECK(rep.self_loops == 1);
  CHECK(rep.mirrored == 1);
  CHECK(rep.duplicates == 1);
}

TEST_CASE("benchmark errors name the line") {
  TempDir tmp;
  auto message = [&](const std::string& edges) {
    two_triangles(tmp.path, edges);
    try {
      load_benchmark(tmp.path.string(), "T");
    } catch (const std::runtime_error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("1, 2\n2, x\n").find("T_A.txt:2") != std::string::npos);
  CHECK(message("1, 2\n\n1, 9\n").find("T_A.txt:3") != std::string::npos);
  CHECK(message("1, 4\n").find("two different graphs") != std::string::npos);
  CHECK(message("1 2\n").find("T_A.txt:1") != std::string::npos);
  CHECK_THROWS_AS(load_benchmark(tmp.path.string(), "Missing"), std::runtime_error);
}

TEST_CASE("MUTAG statistics") {
  const auto ds = load_benchmark(PERSLAY_DATA_DIR "/MUTAG", "MUTAG");
  CHECK(ds.size() == 188);
  CHECK(ds.classes() == 2);
  double nodes = 0;
  for (const auto& g : ds.graphs) nodes += g.n_vertices();
  CHECK(std::abs(nodes / 188 - 17.93) <= 0.01);
  CHECK(ds.node_labels.size() == 188);
}

TEST_CASE("orbit recursion") {
  const auto fixed = generate_orbit(4.1, 0.0, 0.0, 5);
  for (const auto& p : fixed) CHECK(p == Point2{0.0, 0.0});
  const auto o = generate_orbit(3.5, 0.5, 0.5, 3);
  CHECK(o[0].x == 0.375);
  CHECK(o[0].y == 0.3203125);
  for (const auto& p : generate_orbit(4.3, 0.123, 0.77, 500)) {
    CHECK(p.x >= 0.0);
    CHECK(p.x < 1.0);
    CHECK(p.y >= 0.0);
    CHECK(p.y < 1.0);
  }
  CHECK(std::vector<double>(std::begin(kOrbitRates), std::end(kOrbitRates)) ==
        std::vector<double>{2.5, 3.5, 4.0, 4.1, 4.3});
}

TEST_CASE("orbit datasets are seed-deterministic") {
  const auto a = build_orbit_dataset(3, 40, 9), b = build_orbit_dataset(3, 40, 9), c = build_orbit_dataset(3, 40, 10);
  CHECK(a.size() == 15);
  CHECK(a.clouds == b.clouds);
  CHECK(a.clouds != c.clouds);
  CHECK(a.labels == std::vector<std::size_t>{0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4});
  TempDir t1, t2;
  save_orbit_dataset(t1.path.string(), a);
  save_orbit_dataset(t2.path.string(), b);
  CHECK(slurp(t1.path / "orbit_points.txt") == slurp(t2.path / "orbit_points.txt"));
  const auto back = load_orbit_dataset(t1.path.string());
  CHECK(back.clouds == a.clouds);
  CHECK(back.labels == a.labels);
}

TEST_CASE("prom keeps the most persistent points") {
  PersistenceDiagram d;
  d.points = {{0, 1, PointKind::H1}, {0, 5, PointKind::H1}, {2, 3, PointKind::H1}};
  const auto one = prom(d, 1);
  REQUIRE(one.size() == 1);
  CHECK(one.points[0] == DiagramPoint{0, 5, PointKind::H1});
  // Tie between (0,1) and (2,3): the lexicographically smaller survives.
  CHECK(prom(d, 2).points == std::vector<DiagramPoint>{{0, 1, PointKind::H1}, {0, 5, PointKind::H1}});
  CHECK(prom(d, 3).points == d.points);
  CHECK(prom(d, 10).points == d.points);
  CHECK(prom(d, 0).empty());
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("diagram cache reuse and recovery") {
  TempDir tmp;
  const auto ds = load_benchmark(PERSLAY_DATA_DIR "/MUTAG", "MUTAG");
  Dataset small = ds;
  small.graphs.resize(6);
  small.labels.resize(6);
  std::ostringstream warnings;
  const DiagramPipeline p10{DiagramPipeline::Source::GraphHks, 10.0};
  const DiagramCache cache(tmp.path, "MUTAG", p10.descriptor(), &warnings);

  CacheStats st;
  const auto first = ensure_diagrams(small, p10, cache, 2, &st);
  CHECK(st.computed == 6);
  CHECK(st.hits == 0);
  const auto second = ensure_diagrams(small, p10, cache, 2, &st);
  CHECK(st.computed == 0);
  CHECK(st.hits == 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t k = 0; k < 4; ++k) CHECK(first[i][k].points == second[i][k].points);
  CHECK(fs::exists(cache.path(0, PointKind::Ext1)));

  // A different diffusion time lives in its own directory.
  const DiagramPipeline p1{DiagramPipeline::Source::GraphHks, 1.0};
  const DiagramCache cache1(tmp.path, "MUTAG", p1.descriptor(), &warnings);
  CHECK(cache1.directory() != cache.directory());
  ensure_diagrams(small, p1, cache1, 1, &st);
  CHECK(st.computed == 6);
  ensure_diagrams(small, p10, cache, 1, &st);
  CHECK(st.computed == 0);

  // Hand-damaged file: recomputed with a warning.
  write(cache.path(3, PointKind::Ord0), "garbage header\nOrd0 1 x\n");
  const auto repaired = ensure_diagrams(small, p10, cache, 1, &st);
  CHECK(st.computed == 1);
  CHECK(warnings.str().find("3.Ord0.dgm") != std::string::npos);
  CHECK(repaired[3][0].points == first[3][0].points);
  CHECK(load_cached(small, p10, cache).has_value());

  // Wrong descriptor in the header is stale.
  auto dg = load_diagram(cache.path(2, PointKind::Ext0).string());
  dg.provenance = "something else";
  save_diagram(cache.path(2, PointKind::Ext0).string(), dg);
  CHECK_FALSE(load_cached(small, p10, cache).has_value());
  ensure_diagrams(small, p10, cache, 1, &st);
  CHECK(st.computed == 1);
}

TEST_CASE("run config parsing") {
  const auto c = parse_run_config(
      "# MUTAG\n"
      "dataset = MUTAG\n"
      "hks = hks0.1, hks10\n"
      "channel = Im(20,(10,2),10,sum)\n"
      "channel.Ext1 = Pm(5,5,10,sum)\n"
      "prom = 500\n"
      "optimizer = adam(0.01, 0.9, 100)   # inline comment\n"
      "standardize = batch\n"
      "normalize_quantile = 0.999\n"
      "seed = 42\n");
  CHECK(c.hks_times == std::vector<double>{0.1, 10});
  CHECK(c.channel_for(PointKind::Ext1).family == ChannelSpec::Family::Projection);
  CHECK(c.channel_for(PointKind::Ord0).family == ChannelSpec::Family::Image);
  CHECK(c.prom == std::optional<std::size_t>{500});
  CHECK(c.optimizer.epochs == 100);
  CHECK(c.optimizer.ema_decay == 0.9);
  CHECK(c.seed == 42);
  CHECK(c.standardize == Standardization::batch);
  CHECK(c.normalize_quantile == 0.999);
  CHECK(c.active_kinds().size() == 4);

  const auto again = parse_run_config(format_run_config(c));
  CHECK(format_run_config(again) == format_run_config(c));

  CHECK_THROWS_WITH_AS(parse_run_config("dataset = X\nlearning_rate = 3\n"), doctest::Contains("line 2"),
                       std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config("prom = many\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config("channel = Im(20)\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config("kinds = H2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config("no equals sign\n"), std::invalid_argument);
  CHECK(parse_run_config("prom = none\n").prom == std::nullopt);
  CHECK(parse_run_config("standardize = true\n").standardize == Standardization::batch);
  CHECK(parse_run_config("standardize = false\n").standardize == Standardization::none);
  CHECK(RunConfig{}.standardize == Standardization::side);
  CHECK_THROWS_AS(parse_run_config("standardize = maybe\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config("normalize_quantile = 0\n"), std::invalid_argument);
}

TEST_CASE("prepared samples follow the config") {
  RunConfig cfg;
  cfg.data_dir = PERSLAY_DATA_DIR "/MUTAG";
  cfg.hks_times = {0.1, 10};
  cfg.kinds = {PointKind::Ext0, PointKind::Ext1};
  cfg.eigenvalues = 8;
  cfg.prom = 1;
  auto ds = load_dataset(cfg);
  ds.graphs.resize(5);
  ds.labels.resize(5);
  DiagramTable table;
  for (const auto& p : pipelines(cfg)) {
    std::vector<std::vector<PersistenceDiagram>> items;
    for (std::size_t i = 0; i < 5; ++i) {
      const auto all = p.compute(ds, i);
      std::vector<PersistenceDiagram> per;
      for (PointKind k : p.kinds()) per.push_back(all.only(k));
      items.push_back(per);
    }
    table.push_back(items);
  }
  const auto prep = prepare(cfg, ds, table);
  CHECK(prep.model.channels.size() == 4);
  CHECK(prep.slot_names[3] == "t=10 Ext1");
  CHECK(prep.model.spectral_dim == 8 + 2 * 11);
  for (const auto& s : prep.samples) {
    CHECK(s.spectral.size() == 30);
    for (const auto& d : s.diagrams) CHECK(d.size() <= 1);
  }
}
