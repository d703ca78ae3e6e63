// Acceptance checks. Run as `acceptance <n>...` (or `acceptance all`); prints
// one PASS/FAIL line per criterion and exits non-zero when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "brute_force.hpp"
#include "commands.hpp"
#include "perslay/experiment.hpp"
#include "perslay/layer.hpp"
#include "perslay/metrics.hpp"
#include "perslay/model.hpp"
#include "perslay/oracles.hpp"
#include "perslay/persistence.hpp"
#include "perslay/protocol.hpp"
#include "perslay/spectral.hpp"
#include "support.hpp"

using namespace perslay;
using namespace perslay::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double elapsed(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

const fs::path kWork = PERSLAY_WORK_DIR;

RunConfig fixture_config(const std::string& name) {
  RunConfig cfg = load_run_config(std::string(PERSLAY_SOURCE_DIR) + "/configs/" + name);
  if (cfg.is_graph()) cfg.data_dir = std::string(PERSLAY_DATA_DIR) + "/" + cfg.dataset;
  else cfg.data_dir = (kWork / "data" / cfg.dataset).string();
  cfg.cache_dir = (kWork / "cache").string();
  cfg.output_dir = (kWork / "results" / cfg.dataset).string();
  return cfg;
}

ProtocolConfig protocol_of(const RunConfig& cfg) {
  ProtocolConfig pc;
  pc.repeats = cfg.repeats;
  pc.folds = cfg.folds;
  pc.holdout = cfg.protocol == "holdout";
  pc.train_fraction = cfg.train_fraction;
  pc.seed = cfg.seed;
  pc.threads = cfg.threads;
  return pc;
}

/// Diagrams through the cache, exactly as the CLI computes them.
ProtocolResult run_config(const RunConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  DiagramTable table;
  for (const auto& p : pipelines(cfg)) table.push_back(ensure_diagrams(ds, p, make_cache(cfg, p, &std::cerr), cfg.threads));
  const auto prep = prepare(cfg, ds, table);
  return run_protocol(prep.samples, prep.model, cfg.optimizer, protocol_of(cfg));
}

// 1. The union-find extended persistence equals the cone-complex reduction.
Outcome oracle_equivalence() {
  const auto start = Clock::now();
  Rng rng(20240101);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(12));
    const Graph g = random_graph(rng, n, rng.uniform(0.1, 0.7));
    const auto f = random_function(rng, static_cast<std::size_t>(n), trial % 3 == 0);
    if (!same_multiset(extended_persistence_cone(g, f), extended_persistence_fast(g, f))) ++mismatches;
  }
  const double secs = elapsed(start);
  return {mismatches == 0 && secs < 60.0, format("1000 graphs, %d mismatches, %.1f s (limit 60 s)", mismatches, secs)};
}

// 2. Heat-kernel diagrams move at most 2|t - t'| in bottleneck distance.
Outcome hks_lipschitz() {
  const auto start = Clock::now();
  Rng rng(2);
  int violations = 0;
  double worst = -INFINITY;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(24));
    const Graph g = random_graph(rng, n, rng.uniform(0.1, 0.5));
    const auto spec = eigendecompose(normalized_laplacian(g));
    for (int pair = 0; pair < 10; ++pair) {
      const double t = rng.uniform(0.01, 10.0);
      const double t2 = pair % 2 ? std::max(1e-3, t + rng.uniform(-0.5, 0.5)) : rng.uniform(0.01, 10.0);
      const double d = bottleneck_by_kind(extended_persistence_fast(g, hks(spec, t)),
                                          extended_persistence_fast(g, hks(spec, t2)));
      const double bound = 2.0 * std::abs(t - t2);
      worst = std::max(worst, d - bound);
      if (d > bound + 1e-9) ++violations;
    }
  }
  const double secs = elapsed(start);
  return {violations == 0 && secs < 120.0,
          format("2000 (t,t') pairs, %d violations, max d_B - 2|t-t'| = %.3g, %.1f s (limit 120 s)", violations,
                 worst, secs)};
}

// 3. Per-kind bottleneck distance is at most the sup-norm of f - g.
Outcome sup_norm_stability() {
  Rng rng(3);
  int violations = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(16));
    const Graph g = random_graph(rng, n, rng.uniform(0.1, 0.6));
    const auto f = random_function(rng, static_cast<std::size_t>(n), trial % 4 == 0);
    VertexFunction h = f;
    const double eps = rng.uniform(0.0, 0.5);
    for (std::size_t v = 0; v < h.size(); ++v)
      if (trial % 5 != 0 || rng.bernoulli(0.3)) h[v] += rng.uniform(-eps, eps);
    double sup = 0.0;
    for (std::size_t v = 0; v < h.size(); ++v) sup = std::max(sup, std::abs(f[v] - h[v]));
    const auto df = extended_persistence_fast(g, f), dh = extended_persistence_fast(g, h);
    for (PointKind k : kExtendedKinds) {
      const double d = bottleneck(df.only(k), dh.only(k));
      if (sup > 0) worst_ratio = std::max(worst_ratio, d / sup);
      if (d > sup + 1e-9) ++violations;
    }
  }
  return {violations == 0, format("500 trials x 4 kinds, %d violations, max d_B / |f-g|_inf = %.6f", violations,
                                  worst_ratio)};
}

// 4. Matching-based distances equal exhaustive enumeration; triangle inequality.
Outcome metric_correctness() {
  Rng rng(4);
  int mismatches = 0, violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_diagram(rng, rng.below(6)), b = random_diagram(rng, rng.below(6));
    if (bottleneck(a, b) != brute_bottleneck(a, b)) ++mismatches;
    if (wasserstein(a, b, 1.0) != brute_wasserstein(a, b, 1.0)) ++mismatches;
    if (wasserstein(a, b, 2.0) != brute_wasserstein(a, b, 2.0)) ++mismatches;
  }
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_diagram(rng, rng.below(8)), b = random_diagram(rng, rng.below(8)),
               c = random_diagram(rng, rng.below(8));
    if (bottleneck(a, c) > bottleneck(a, b) + bottleneck(b, c) + 1e-9) ++violations;
    for (double s : {1.0, 2.0})
      if (wasserstein(a, c, s) > wasserstein(a, b, s) + wasserstein(b, c, s) + 1e-9) ++violations;
  }
  return {mismatches == 0 && violations == 0,
          format("200 pairs x {bottleneck, W1, W2}: %d differ from enumeration; 200 triples: %d triangle violations",
                 mismatches, violations)};
}

// 5. PersLay configurations reproduce landscapes, silhouettes and images.
Outcome vectorization_equivalences() {
  Rng rng(5);
  const auto id = DiagramNormalizer::identity();
  double dev_land = 0, dev_sil = 0, dev_img = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = random_diagram(rng, rng.below(12));
    const std::size_t k = 1 + rng.below(4);
    Channel tri;
    tri.transform.kind = TransformKind::Triangle;
    tri.transform.samples = Tensor({10});
    for (double& t : tri.transform.samples.data) t = rng.uniform(0.0, 1.0);
    tri.op = {OpKind::TopK, k};
    const auto top = forward(tri, d, id);
    for (std::size_t r = 1; r <= k; ++r) {
      const auto ref = landscape_oracle(d, r, tri.transform.samples.data);
      for (std::size_t j = 0; j < ref.size(); ++j) dev_land = std::max(dev_land, std::abs(top[j * k + r - 1] - ref[j]));
    }

    tri.op = {OpKind::Sum, 1};
    tri.weight.kind = WeightKind::Grid;
    tri.weight.side = 4;
    tri.weight.grid = Tensor({4, 4});
    for (double& g : tri.weight.grid.data) g = rng.uniform(0.0, 2.0);
    const auto w = [&](double x, double y) { return tri.weight(x, y); };
    const auto sil = forward(tri, d, id);
    const auto sref = silhouette_oracle(d, w, tri.transform.samples.data);
    for (std::size_t j = 0; j < sref.size(); ++j) dev_sil = std::max(dev_sil, std::abs(sil[j] - sref[j]));

    Channel img = build_channel(parse_channel_spec("Im(6,(),4,sum)"), rng);
    img.weight.grid = tri.weight.grid;
    img.transform.sigma[0] = rng.uniform(0.05, 0.5);
    std::vector<std::array<double, 2>> centers;
    for (std::size_t c = 0; c < 36; ++c) centers.push_back({img.transform.centers[2 * c], img.transform.centers[2 * c + 1]});
    const auto im = forward(img, d, id);
    const auto iref = image_oracle(d, w, img.transform.sigma[0], centers);
    for (std::size_t j = 0; j < iref.size(); ++j) dev_img = std::max(dev_img, std::abs(im[j] - iref[j]));
  }
  const bool ok = dev_land <= 1e-6 && dev_sil <= 1e-6 && dev_img <= 1e-6;
  return {ok, format("100 diagrams each, max |dev| landscape %.3g, silhouette %.3g, image %.3g (limit 1e-6)", dev_land,
                     dev_sil, dev_img)};
}

// 6. Analytic gradients of every trainable tensor against central differences.
Outcome gradient_checks() {
  Rng rng(6);
  const char* pool[] = {"Im(4,(2,2),3,sum)", "Im(3,(),2,max)",  "Pm(4,3,2,sum)", "Pm(3,2,0,max)",
                        "Pm(3,2,2,top-2)",   "Tm(5,2,sum)",     "Tm(4,0,top-2)", "Tm(4,3,min)"};
  std::map<std::string, std::size_t> checked;
  double worst = 0.0;
  std::string worst_name;
  for (int trial = 0; trial < 100; ++trial) {
    ModelConfig cfg;
    const std::size_t nch = 1 + rng.below(2);
    for (std::size_t c = 0; c < nch; ++c) cfg.channels.push_back(parse_channel_spec(pool[rng.below(std::size(pool))]));
    cfg.spectral_dim = rng.below(3);
    cfg.classes = 2 + rng.below(2);
    cfg.standardize = static_cast<Standardization>(rng.below(3));
    Model m = build_model(cfg, rng);
    // Random parameters: the initial triangle samples sit exactly on the
    // normalized extremes 0 and 1, where the tents have a kink.
    for (auto& [name, t] : m.parameters()) {
      if (name.ends_with("weight.grid"))
        for (double& x : t->data) x = rng.uniform(0.5, 1.5);
      if (name.ends_with("transform.samples"))
        for (double& x : t->data) x = rng.uniform(0.0, 1.0);
    }
    std::vector<Sample> batch(3 + rng.below(3));
    for (auto& s : batch) {
      for (std::size_t c = 0; c < nch; ++c) s.diagrams.push_back(random_diagram(rng, 1 + rng.below(5), -0.5, 1.5));
      for (std::size_t i = 0; i < cfg.spectral_dim; ++i) s.spectral.push_back(rng.uniform(-1.0, 1.0));
      s.label = rng.below(cfg.classes);
    }
    std::vector<const Sample*> ptrs;
    for (const auto& s : batch) ptrs.push_back(&s);
    fit_side_statistics(m, ptrs);
    std::vector<const PersistenceDiagram*> fit;
    for (const auto& s : batch) fit.push_back(&s.diagrams[0]);
    std::vector<DiagramNormalizer> norms(nch, DiagramNormalizer::identity());
    norms[0] = DiagramNormalizer::fit(fit);

    const auto lg = loss_and_grads(m, ptrs, norms);
    auto params = m.parameters();
    const auto grads = lg.grads.parameters();
    for (std::size_t t = 0; t < params.size(); ++t) {
      Tensor& p = *params[t].second;
      if (!p.trainable) continue;
      const auto& name = params[t].first;
      const std::string family = name.starts_with("channel") ? name.substr(name.find('.') + 1) : name;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double h = 1e-6, orig = p[i];
        p[i] = orig + h;
        const double up = loss_and_grads(m, ptrs, norms).loss;
        p[i] = orig - h;
        const double down = loss_and_grads(m, ptrs, norms).loss;
        p[i] = orig;
        const double numeric = (up - down) / (2 * h), analytic = (*grads[t].second)[i];
        const double rel = std::abs(numeric - analytic) / std::max({std::abs(numeric), std::abs(analytic), 1e-4});
        if (rel > worst) {
          worst = rel;
          worst_name = params[t].first;
        }
        ++checked[family];
      }
    }
  }
  std::string families;
  for (const auto& [name, n] : checked) families += (families.empty() ? "" : ", ") + name + ":" + std::to_string(n);
  return {worst < 1e-4, format("100 models, worst relative error %.3g at %s (limit 1e-4); scalars checked per tensor: %s",
                               worst, worst_name.c_str(), families.c_str())};
}

// 7. With w(p) = (|d - b| / 2) x profile and a bounded Lipschitz phi the layer
// is 1-Lipschitz from W1 to the sup norm.
Outcome d1_stability() {
  Rng rng(7);
  const auto id = DiagramNormalizer::identity();
  auto clamp_point = [](double b, double d) {
    b = std::clamp(b, 0.0, 1.0);
    d = std::clamp(d, 0.0, 1.0);
    return std::pair{std::min(b, d), std::max(b, d)};
  };
  int violations = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Channel ch;
    ch.transform.kind = TransformKind::Gaussian;
    const std::size_t q = 1 + rng.below(8);
    ch.transform.centers = Tensor({q, 2});
    for (double& c : ch.transform.centers.data) c = rng.uniform(0.0, 1.0);
    ch.transform.sigma = Tensor({1}, rng.uniform(1.0, 2.0));
    ch.weight.kind = WeightKind::DiagonalPower;
    ch.weight.power = 1.0;
    if (trial % 2 == 0) {
      ch.weight.profile = ProfileKind::Constant;
      ch.weight.profile_value = rng.uniform(0.0, 0.5);
    } else {
      ch.weight.profile = ProfileKind::Tent;
      ch.weight.tent_center = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
      ch.weight.tent_scale = rng.uniform(1.0, 3.0);
      ch.weight.tent_height = 0.5;
    }
    ch.op = {OpKind::Sum, 1};

    const auto d1 = random_diagram(rng, rng.below(10));
    PersistenceDiagram d2;
    const double delta = rng.uniform(0.0, 0.2);
    for (const auto& p : d1.points) {
      if (rng.bernoulli(0.15)) continue;
      const auto [b, d] = clamp_point(p.birth + rng.uniform(-delta, delta), p.death + rng.uniform(-delta, delta));
      d2.points.push_back({b, d, p.kind});
    }
    for (std::size_t extra = rng.below(3); extra > 0; --extra) {
      const double m = rng.uniform(0.0, 1.0);
      const auto [b, d] = clamp_point(m - rng.uniform(0.0, 0.1), m + rng.uniform(0.0, 0.1));
      d2.points.push_back({b, d, PointKind::H1});
    }
    const auto a = forward(ch, d1, id), b = forward(ch, d2, id);
    double sup = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) sup = std::max(sup, std::abs(a[j] - b[j]));
    const double w1 = wasserstein(d1, d2, 1.0);
    if (w1 > 0) worst_ratio = std::max(worst_ratio, sup / w1);
    if (sup > w1 + 1e-9) ++violations;
  }
  return {violations == 0,
          format("200 pairs, %d violations, max |PersLay(d1)-PersLay(d2)|_inf / W1 = %.4f", violations, worst_ratio)};
}

// 8. MUTAG 10 x 10-fold.
Outcome mutag_reproduction() {
  const auto start = Clock::now();
  const auto r = run_config(fixture_config("mutag.cfg"));
  const double mean = 100.0 * r.mean;
  return {mean >= 85.0 && mean <= 94.0, format("mean %.1f%% (+-%.1f), max %.1f%% over %zu repeats, %.0f s (target 85.0 to 94.0)",
                                               mean, 100.0 * r.std, 100.0 * r.max, r.repeat_accuracy.size(),
                                               elapsed(start))};
}

// 9. ORBIT500 holdout.
Outcome orbit_desk_scale() {
  const auto start = Clock::now();
  const auto r = run_config(fixture_config("orbit500.cfg"));
  const double mean = 100.0 * r.mean, secs = elapsed(start);
  return {mean >= 60.0 && secs <= 1200.0,
          format("mean %.1f%% (+-%.1f) over %zu holdout runs, %.0f s (target >= 60%%, <= 1200 s)", mean, 100.0 * r.std,
                 r.repeat_accuracy.size(), secs)};
}

// 10. MUTAG averages of the dataset statistics table.
Outcome mutag_statistics() {
  const Dataset ds = load_benchmark(std::string(PERSLAY_DATA_DIR) + "/MUTAG", "MUTAG");
  double nodes = 0, betti1 = 0;
  for (const auto& g : ds.graphs) {
    nodes += static_cast<double>(g.n_vertices());
    betti1 += static_cast<double>(g.n_edges()) - static_cast<double>(g.n_vertices()) +
              static_cast<double>(g.component_count());
  }
  nodes /= ds.size();
  betti1 /= ds.size();
  const bool ok = std::abs(nodes - 17.93) <= 0.05 && std::abs(betti1 - 2.86) <= 0.05;
  return {ok, format("%zu graphs, average nodes %.3f (17.93), average beta1 %.3f (2.86), tolerance 0.05", ds.size(),
                     nodes, betti1)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 11. The ablation grid runs to completion, deterministically.
Outcome ablation_parity() {
  const auto start = Clock::now();
  RunConfig cfg = fixture_config("ablation.cfg");
  std::ostringstream log;
  if (cli::cmd_diagrams(cfg, log, std::cerr) != 0) return {false, "diagram computation failed"};
  std::string outputs[2];
  for (int run = 0; run < 2; ++run) {
    cfg.output_dir = (kWork / ("ablation_run" + std::to_string(run))).string();
    fs::remove_all(cfg.output_dir);
    if (cli::cmd_ablation(cfg, log, std::cerr) != 0) return {false, "ablation command failed"};
    outputs[run] = slurp(fs::path(cfg.output_dir) / "ablation.csv") + slurp(fs::path(cfg.output_dir) / "ablation_table.csv");
  }
  const auto table = slurp(fs::path(cfg.output_dir) / "ablation_table.csv");
  std::size_t rows = 0;
  for (char c : slurp(fs::path(cfg.output_dir) / "ablation.csv")) rows += c == '\n';
  const bool shaped = table.rfind("metric,None,2x2,5x5,10x10,20x20,50x50,Gaussian,line,triangle,Sum,Max\n", 0) == 0 &&
                      std::count(table.begin(), table.end(), '\n') == 3;
  const bool ok = rows == 1 + 6 * 3 * 2 && shaped && outputs[0] == outputs[1];
  return {ok, format("%zu combinations, table columns %s, identical reruns %s, %.0f s", rows - 1, shaped ? "ok" : "WRONG",
                     outputs[0] == outputs[1] ? "yes" : "NO", elapsed(start))};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

const Criterion kCriteria[] = {
    {1, "oracle equivalence of extended persistence", oracle_equivalence},
    {2, "heat-kernel 2-Lipschitz bound", hks_lipschitz},
    {3, "sup-norm stability per kind", sup_norm_stability},
    {4, "metric correctness", metric_correctness},
    {5, "vectorization equivalences", vectorization_equivalences},
    {6, "gradient checks", gradient_checks},
    {7, "d1 continuity bound", d1_stability},
    {8, "MUTAG reproduction", mutag_reproduction},
    {9, "ORBIT500 desk scale", orbit_desk_scale},
    {10, "MUTAG dataset statistics", mutag_statistics},
    {11, "ablation harness", ablation_parity},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "all") {
      for (const auto& c : kCriteria) wanted.push_back(c.id);
    } else {
      wanted.push_back(std::atoi(argv[i]));
    }
  }
  if (wanted.empty()) {
    std::cerr << "usage: acceptance all | <criterion number>...\n";
    return 2;
  }
  fs::create_directories(kWork);
  int failures = 0;
  for (int id : wanted) {
    const auto it = std::find_if(std::begin(kCriteria), std::end(kCriteria), [&](const Criterion& c) { return c.id == id; });
    if (it == std::end(kCriteria)) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    Outcome o;
    try {
      o = it->run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << "criterion " << id << " (" << it->name << "): " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
