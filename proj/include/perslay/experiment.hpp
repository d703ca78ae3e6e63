#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "perslay/cache.hpp"
#include "perslay/config.hpp"
#include "perslay/dataset.hpp"
#include "perslay/model.hpp"

namespace perslay {

/// Benchmark graphs from data_dir, or an orbit dataset read from data_dir
/// (generated from orbit_per_class / orbit_points / seed when absent).
Dataset load_dataset(const RunConfig& cfg, LoadReport* report = nullptr);

/// One pipeline per hks time for graphs, a single alpha pipeline for orbits.
std::vector<DiagramPipeline> pipelines(const RunConfig& cfg);

DiagramCache make_cache(const RunConfig& cfg, const DiagramPipeline& p, std::ostream* warnings);

/// Diagrams per pipeline, per item, per pipeline kind.
using DiagramTable = std::vector<std::vector<std::vector<PersistenceDiagram>>>;

struct PreparedData {
  std::vector<Sample> samples;
  ModelConfig model;
  std::vector<std::string> slot_names;  // e.g. "t=10 Ext1"
};

/// Builds one channel slot per (pipeline, active kind), applies prom and
/// attaches the spectral side features of graph datasets.
PreparedData prepare(const RunConfig& cfg, const Dataset& ds, const DiagramTable& diagrams);

}  // namespace perslay
