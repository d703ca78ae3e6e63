#include "perslay/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <stdexcept>

#include "perslay/spectral.hpp"

namespace perslay {

Dataset load_dataset(const RunConfig& cfg, LoadReport* report) {
  if (cfg.is_graph()) return load_benchmark(cfg.data_dir, cfg.dataset, report);
  if (std::filesystem::exists(std::filesystem::path(cfg.data_dir) / "orbit_labels.txt")) {
    auto ds = load_orbit_dataset(cfg.data_dir);
    ds.name = cfg.dataset;
    return ds;
  }
  auto ds = build_orbit_dataset(cfg.orbit_per_class, cfg.orbit_points, cfg.seed);
  ds.name = cfg.dataset;
  return ds;
}

std::vector<DiagramPipeline> pipelines(const RunConfig& cfg) {
  std::vector<DiagramPipeline> out;
  if (cfg.is_graph()) {
    for (double t : cfg.hks_times) out.push_back({DiagramPipeline::Source::GraphHks, t});
  } else {
    out.push_back({DiagramPipeline::Source::OrbitAlpha, 0.0});
  }
  return out;
}

DiagramCache make_cache(const RunConfig& cfg, const DiagramPipeline& p, std::ostream* warnings) {
  return DiagramCache(cfg.cache_dir, cfg.dataset, p.descriptor(), warnings);
}

PreparedData prepare(const RunConfig& cfg, const Dataset& ds, const DiagramTable& diagrams) {
  const auto pipes = pipelines(cfg);
  if (diagrams.size() != pipes.size()) throw std::invalid_argument("prepare: one diagram table per pipeline expected");
  const auto active = cfg.active_kinds();
  PreparedData out;
  out.samples.resize(ds.size());
  struct Slot {
    std::size_t pipe, kind_index;
  };
  std::vector<Slot> slots;
  for (std::size_t p = 0; p < pipes.size(); ++p) {
    const auto kinds = pipes[p].kinds();
    for (PointKind k : active) {
      const auto it = std::find(kinds.begin(), kinds.end(), k);
      if (it == kinds.end())
        throw std::invalid_argument("kind " + std::string(to_string(k)) + " is not produced by this source");
      slots.push_back({p, static_cast<std::size_t>(it - kinds.begin())});
      out.model.channels.push_back(cfg.channel_for(k));
      char name[64];
      if (pipes[p].source == DiagramPipeline::Source::GraphHks)
        std::snprintf(name, sizeof name, "t=%g %s", pipes[p].t, std::string(to_string(k)).c_str());
      else
        std::snprintf(name, sizeof name, "%s", std::string(to_string(k)).c_str());
      out.slot_names.push_back(name);
    }
  }
  for (std::size_t i = 0; i < ds.size(); ++i) {
    Sample& s = out.samples[i];
    s.label = ds.labels[i];
    for (const auto& slot : slots) {
      const auto& dg = diagrams[slot.pipe].at(i).at(slot.kind_index);
      s.diagrams.push_back(cfg.prom ? prom(dg, *cfg.prom) : dg);
    }
    if (ds.has_graphs() && cfg.eigenvalues > 0) {
      const auto spec = eigendecompose(normalized_laplacian(ds.graphs[i]));
      std::vector<VertexFunction> h;
      for (double t : cfg.hks_times) h.push_back(hks(spec, t));
      s.spectral = spectral_features(spec, h, cfg.eigenvalues);
    }
  }
  out.model.spectral_dim = out.samples.empty() ? 0 : out.samples.front().spectral.size();
  out.model.classes = std::max<std::size_t>(2, ds.classes());
  out.model.standardize = cfg.standardize;
  out.model.normalize_quantile = cfg.normalize_quantile;
  return out;
}

}  // namespace perslay
