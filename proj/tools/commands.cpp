#include "commands.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "perslay/cache.hpp"
#include "perslay/experiment.hpp"
#include "perslay/metrics.hpp"
#include "perslay/persistence.hpp"
#include "perslay/protocol.hpp"
#include "perslay/spectral.hpp"

namespace perslay::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::optional<Dataset> read_dataset(const RunConfig& cfg, std::ostream& err) {
  try {
    LoadReport rep;
    auto ds = load_dataset(cfg, &rep);
    if (rep.self_loops || rep.mirrored || rep.duplicates)
      err << "note: dropped " << rep.self_loops << " self-loops, " << rep.duplicates << " duplicate edges; "
          << rep.mirrored << " edges were listed in both directions\n";
    return ds;
  } catch (const std::exception& e) {
    err << "error: cannot read dataset " << cfg.dataset << " from " << cfg.data_dir << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

bool make_output_dir(const fs::path& dir, std::ostream& err) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const auto probe = dir / ".write_probe";
  const bool ok = !ec && static_cast<bool>(std::ofstream(probe));
  fs::remove(probe, ec);
  if (!ok) err << "error: cannot write to " << dir.string() << "\n";
  return ok;
}

/// Cached diagrams for every pipeline, or nullopt with a message when any is
/// missing.
std::optional<DiagramTable> cached_table(const RunConfig& cfg, const Dataset& ds, std::ostream& err) {
  DiagramTable table;
  for (const auto& p : pipelines(cfg)) {
    const auto cache = make_cache(cfg, p, &err);
    auto got = load_cached(ds, p, cache);
    if (!got) {
      err << "error: diagrams missing from " << cache.directory().string()
          << "; run `perslay diagrams --config <file>` first\n";
      return std::nullopt;
    }
    table.push_back(std::move(*got));
  }
  return table;
}

DiagramTable computed_table(const RunConfig& cfg, const Dataset& ds, std::ostream& err) {
  DiagramTable table;
  for (const auto& p : pipelines(cfg)) table.push_back(ensure_diagrams(ds, p, make_cache(cfg, p, &err), cfg.threads));
  return table;
}

ProtocolConfig protocol_config(const RunConfig& cfg) {
  ProtocolConfig pc;
  pc.repeats = cfg.repeats;
  pc.folds = cfg.folds;
  pc.holdout = cfg.protocol == "holdout";
  pc.train_fraction = cfg.train_fraction;
  pc.seed = cfg.seed;
  pc.threads = cfg.threads;
  return pc;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> out;
  if (n == 1) return {lo};
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(i) / (n - 1)));
  return out;
}

std::string file_safe(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.') c = '_';
  return s;
}

void write_grid(const fs::path& path, const WeightFunction& w) {
  std::ofstream f(path);
  f << std::setprecision(10);
  // Row i holds cells with floor(birth * N) = i, column j floor(death * N) = j.
  for (std::size_t i = 0; i < w.side; ++i) {
    for (std::size_t j = 0; j < w.side; ++j) f << (j ? "," : "") << w.grid.data[i * w.side + j];
    f << "\n";
  }
}

double train_accuracy(const ProtocolResult& r) {
  double s = 0;
  for (const auto& f : r.folds) s += f.train_acc;
  return r.folds.empty() ? 0.0 : s / r.folds.size();
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

}  // namespace

int cmd_diagrams(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto ds = read_dataset(cfg, err);
  if (!ds) return kExitUnreadable;
  for (const auto& p : pipelines(cfg)) {
    const auto start = Clock::now();
    const auto cache = make_cache(cfg, p, &err);
    if (!make_output_dir(cache.directory(), err)) return kExitUnreadable;
    CacheStats st;
    try {
      ensure_diagrams(*ds, p, cache, cfg.threads, &st);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitUnreadable;
    }
    char line[256];
    std::snprintf(line, sizeof line, "%s: %zu items, %zu cached, %zu computed, %zu files, %.2f s", p.descriptor().c_str(),
                  ds->size(), st.hits, st.computed, ds->size() * p.kinds().size(), seconds_since(start));
    out << line << "\n  -> " << cache.directory().string() << "\n";
  }
  return kExitOk;
}

int cmd_train(RunConfig cfg, const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.constant_weight) {
    cfg.channel.grid = 0;
    for (auto& [k, spec] : cfg.channel_overrides) spec.grid = 0;
  }
  const auto ds = read_dataset(cfg, err);
  if (!ds) return kExitUnreadable;
  const auto table = cached_table(cfg, *ds, err);
  if (!table) return kExitNoCache;
  const fs::path dir = cfg.output_dir;
  if (!make_output_dir(dir / "params", err)) return kExitUnreadable;

  const auto prep = prepare(cfg, *ds, *table);
  const auto start = Clock::now();
  ProtocolHooks hooks;
  hooks.on_fold = [&](const FoldResult& f, const TrainedModel& tm) {
    char line[160];
    std::snprintf(line, sizeof line, "repeat %zu fold %zu: train %.3f test %.3f loss %.4f -> %.4f (%.0f s)\n", f.repeat,
                  f.fold, f.train_acc, f.test_acc, f.initial_loss, f.final_loss, seconds_since(start));
    out << line << std::flush;
    if (f.fold == 0) {
      std::ofstream p(dir / "params" / ("repeat" + std::to_string(f.repeat) + ".txt"));
      write_parameters(p, tm.model);
    }
  };
  const auto result = run_protocol(prep.samples, prep.model, cfg.optimizer, protocol_config(cfg), hooks);

  std::ofstream csv(dir / "results.csv");
  write_results_csv(csv, result);
  std::ofstream summary(dir / "summary.csv");
  summary << "dataset,mean,std,max,repeats\n"
          << cfg.dataset << "," << percent(result.mean) << "," << percent(result.std) << "," << percent(result.max)
          << "," << result.repeat_accuracy.size() << "\n";
  std::ofstream(dir / "config.cfg") << format_run_config(cfg);
  if (!csv || !summary) {
    err << "error: cannot write results to " << dir.string() << "\n";
    return kExitUnreadable;
  }
  out << cfg.dataset << ": " << summary_line(result) << "\n";
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const fs::path path = fs::path(cfg.output_dir) / "results.csv";
  std::ifstream in(path);
  if (!in) {
    err << "error: " << path.string() << " not found; run `perslay train --config <file>` first\n";
    return kExitNoCache;
  }
  std::string line;
  std::getline(in, line);
  if (line != "repeat,fold,train_acc,test_acc") {
    err << "error: " << path.string() << ": unexpected header\n";
    return kExitUnreadable;
  }
  std::map<std::size_t, std::vector<double>> by_repeat;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::size_t repeat = 0, fold = 0;
    double train = 0, test = 0;
    if (std::sscanf(line.c_str(), "%zu,%zu,%lf,%lf", &repeat, &fold, &train, &test) != 4) {
      err << "error: " << path.string() << ":" << number << ": malformed row\n";
      return kExitUnreadable;
    }
    by_repeat[repeat].push_back(test);
  }
  ProtocolResult r;
  for (const auto& [repeat, accs] : by_repeat)
    r.repeat_accuracy.push_back(std::accumulate(accs.begin(), accs.end(), 0.0) / accs.size());
  if (r.repeat_accuracy.empty()) {
    err << "error: " << path.string() << " has no rows\n";
    return kExitUnreadable;
  }
  double sq = 0;
  for (double a : r.repeat_accuracy) {
    r.mean += a / r.repeat_accuracy.size();
    r.max = std::max(r.max, a);
  }
  for (double a : r.repeat_accuracy) sq += (a - r.mean) * (a - r.mean);
  r.std = std::sqrt(sq / r.repeat_accuracy.size());
  out << "repeat,test_acc\n";
  std::size_t i = 0;
  for (const auto& [repeat, accs] : by_repeat) out << repeat << "," << percent(r.repeat_accuracy[i++]) << "\n";
  out << "Mean,Max\n" << percent(r.mean) << " (+-" << percent(r.std) << ")," << percent(r.max) << "\n";
  return kExitOk;
}

int cmd_dist(const std::string& a, const std::string& b, const std::string& metric, double s, std::ostream& out,
             std::ostream& err) {
  PersistenceDiagram da, db;
  try {
    da = load_diagram(a);
    db = load_diagram(b);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnreadable;
  }
  // Kind of a diagram, "" when empty, "mixed" when it holds several.
  auto kind_of = [](const PersistenceDiagram& d) -> std::string {
    if (d.points.empty()) return "";
    for (const auto& p : d.points)
      if (p.kind != d.points.front().kind) return "mixed";
    return std::string(to_string(d.points.front().kind));
  };
  const auto ka = kind_of(da), kb = kind_of(db);
  if (ka == "mixed" || kb == "mixed" || (!ka.empty() && !kb.empty() && ka != kb)) {
    err << "error: kind mismatch: " << a << " holds " << (ka.empty() ? "nothing" : ka) << ", " << b << " holds "
        << (kb.empty() ? "nothing" : kb) << "\n";
    return kExitKindMismatch;
  }
  double d = 0;
  if (metric == "bottleneck") {
    d = bottleneck(da, db);
  } else if (metric == "ws") {
    if (!(s >= 1.0)) {
      err << "error: --s must be at least 1\n";
      return kExitFailure;
    }
    d = wasserstein(da, db, s);
  } else {
    err << "error: unknown metric '" << metric << "'\n";
    return kExitFailure;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", d);
  out << buf << "\n";
  return kExitOk;
}

int cmd_orbit_gen(std::size_t per_class, std::size_t points, std::uint64_t seed, const std::string& dir,
                  std::ostream& out, std::ostream& err) {
  if (!make_output_dir(dir, err)) return kExitUnreadable;
  const auto ds = build_orbit_dataset(per_class, points, seed);
  try {
    save_orbit_dataset(dir, ds);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnreadable;
  }
  out << "wrote " << ds.size() << " orbits of " << points << " points to " << dir << "\n";
  return kExitOk;
}

int cmd_diagnostics(const RunConfig& cfg, const DiagnosticsOptions& opt, std::ostream& out, std::ostream& err) {
  const auto ds = read_dataset(cfg, err);
  if (!ds) return kExitUnreadable;
  const fs::path dir = fs::path(cfg.output_dir) / "diagnostics";
  if (!make_output_dir(dir, err)) return kExitUnreadable;

  if (ds->has_graphs()) {
    if (opt.graph >= ds->size()) {
      err << "error: --graph " << opt.graph << " out of range\n";
      return kExitFailure;
    }
    const Graph& g = ds->graphs[opt.graph];
    const auto spec = eigendecompose(normalized_laplacian(g));
    const double t_ref = cfg.hks_times.front();
    const auto ref = extended_persistence_fast(g, hks(spec, t_ref));
    std::ofstream f(dir / "tsweep.csv");
    f << "t,bottleneck,bound\n" << std::setprecision(12);
    for (double t : log_grid(opt.t_min, opt.t_max, opt.steps)) {
      const auto dg = extended_persistence_fast(g, hks(spec, t));
      f << t << "," << bottleneck_by_kind(ref, dg) << "," << 2.0 * std::abs(t - t_ref) << "\n";
    }
    out << "t sweep of graph " << opt.graph << " against t=" << t_ref << " -> " << (dir / "tsweep.csv").string() << "\n";

    if (opt.accuracy_steps > 0) {
      std::ofstream acc(dir / "accuracy_vs_t.csv");
      acc << "t,train_acc,test_acc,max\n";
      for (double t : log_grid(opt.t_min, opt.t_max, opt.accuracy_steps)) {
        RunConfig c = cfg;
        c.hks_times = {t};
        const auto prep = prepare(c, *ds, computed_table(c, *ds, err));
        const auto r = run_protocol(prep.samples, prep.model, c.optimizer, protocol_config(c));
        acc << t << "," << percent(train_accuracy(r)) << "," << percent(r.mean) << "," << percent(r.max) << "\n";
        out << "t=" << t << ": " << summary_line(r) << "\n" << std::flush;
      }
    }
  }

  // Grid weights before and after one training run on every item.
  const auto prep = prepare(cfg, *ds, computed_table(cfg, *ds, err));
  std::vector<std::size_t> all(ds->size());
  std::iota(all.begin(), all.end(), 0);
  Rng init = Rng::derive(cfg.seed, 1);
  const Model before = build_model(prep.model, init);
  const auto trained = train_model(prep.model, cfg.optimizer, prep.samples, all, cfg.seed);
  for (std::size_t c = 0; c < before.channels.size(); ++c) {
    if (before.channels[c].weight.kind != WeightKind::Grid) continue;
    const auto name = file_safe(prep.slot_names[c]);
    write_grid(dir / ("grid_before_" + name + ".csv"), before.channels[c].weight);
    write_grid(dir / ("grid_after_" + name + ".csv"), trained.model.channels[c].weight);
    out << "grid weights of " << prep.slot_names[c] << " -> grid_{before,after}_" << name << ".csv\n";
  }
  return kExitOk;
}

std::vector<AblationCell> ablation_cells(const ChannelSpec& base) {
  std::vector<AblationCell> out;
  for (std::size_t grid : kAblationGrids) {
    for (const char* phi : {"Gaussian", "line", "triangle"}) {
      for (const char* op : {"sum", "max"}) {
        ChannelSpec s;
        if (std::string(phi) == "Gaussian")
          s = base.family == ChannelSpec::Family::Image ? base : parse_channel_spec("Im(20,(),10,sum)");
        else if (std::string(phi) == "line")
          s = parse_channel_spec("Pm(25,25,10,sum)");
        else
          s = parse_channel_spec("Tm(25,10,sum)");
        s.grid = grid;
        s.op = parse_op(op);
        out.push_back({phi, op, grid, s});
      }
    }
  }
  return out;
}

int cmd_ablation(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto ds = read_dataset(cfg, err);
  if (!ds) return kExitUnreadable;
  const auto table = cached_table(cfg, *ds, err);
  if (!table) return kExitNoCache;
  const fs::path dir = cfg.output_dir;
  if (!make_output_dir(dir, err)) return kExitUnreadable;

  struct Row {
    AblationCell cell;
    double train, test, seconds;
  };
  std::vector<Row> rows;
  for (const auto& cell : ablation_cells(cfg.channel)) {
    RunConfig c = cfg;
    c.channel = cell.spec;
    c.channel_overrides.clear();
    const auto prep = prepare(c, *ds, *table);
    const auto start = Clock::now();
    const auto r = run_protocol(prep.samples, prep.model, c.optimizer, protocol_config(c));
    rows.push_back({cell, train_accuracy(r), r.mean, seconds_since(start)});
    out << cell.spec.to_string() << ": train " << percent(rows.back().train) << " test " << percent(r.mean) << " ("
        << static_cast<int>(rows.back().seconds) << " s)\n"
        << std::flush;
  }

  std::ofstream full(dir / "ablation.csv"), times(dir / "ablation_times.csv"), shaped(dir / "ablation_table.csv");
  full << "phi,op,grid,channel,train_acc,test_acc\n";
  times << "phi,op,grid,seconds\n";
  for (const auto& r : rows) {
    const auto grid = r.cell.grid ? std::to_string(r.cell.grid) : std::string("none");
    full << r.cell.phi << "," << r.cell.op << "," << grid << ",\"" << r.cell.spec.to_string() << "\","
         << percent(r.train) << "," << percent(r.test) << "\n";
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
    times << r.cell.phi << "," << r.cell.op << "," << grid << "," << secs << "\n";
  }

  // One column per varied hyper-parameter, the others held at the reference
  // setting (Gaussian, sum, the configured grid size).
  const std::size_t ref_grid = cfg.channel.family == ChannelSpec::Family::Image ? cfg.channel.grid : 10;
  auto find = [&](const std::string& phi, const std::string& op, std::size_t grid) -> const Row& {
    for (const auto& r : rows)
      if (r.cell.phi == phi && r.cell.op == op && r.cell.grid == grid) return r;
    throw std::logic_error("ablation cell missing");
  };
  std::vector<std::pair<std::string, const Row*>> cols;
  for (std::size_t g : kAblationGrids)
    cols.push_back({g ? std::to_string(g) + "x" + std::to_string(g) : "None", &find("Gaussian", "sum", g)});
  for (const char* phi : {"Gaussian", "line", "triangle"}) cols.push_back({phi, &find(phi, "sum", ref_grid)});
  cols.push_back({"Sum", &find("Gaussian", "sum", ref_grid)});
  cols.push_back({"Max", &find("Gaussian", "max", ref_grid)});
  shaped << "metric";
  for (const auto& [name, row] : cols) shaped << "," << name;
  shaped << "\ntrain_acc";
  for (const auto& [name, row] : cols) shaped << "," << percent(row->train);
  shaped << "\ntest_acc";
  for (const auto& [name, row] : cols) shaped << "," << percent(row->test);
  shaped << "\n";
  if (!full || !times || !shaped) {
    err << "error: cannot write ablation results to " << dir.string() << "\n";
    return kExitUnreadable;
  }
  out << "ablation -> " << (dir / "ablation_table.csv").string() << "\n";
  return kExitOk;
}

}  // namespace perslay::cli
