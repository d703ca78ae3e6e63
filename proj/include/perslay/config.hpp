#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "perslay/diagram.hpp"
#include "perslay/layer.hpp"
#include "perslay/optim.hpp"

namespace perslay {

/// Experiment settings read from a `key = value` file. `#` starts a comment.
///
/// Keys:
///   dataset      name of the dataset (benchmark prefix, or ORBIT)
///   source       graph | orbit
///   data_dir     directory holding the benchmark files or orbit dataset
///   hks          diffusion times, e.g. `hks10` or `0.1, 10`
///   kinds        diagram kinds fed to the model, default all of the source
///   channel      channel spec used for every kind
///   channel.<K>  per-kind override, e.g. `channel.Ext1 = Pm(25,25,10,sum)`
///   prom         k or `none`
///   optimizer    adam(lr, decay, epochs)
///   batch        minibatch size
///   eigenvalues  padded eigenvalue count P of the side features (0 disables
///                the side features altogether)
///   standardize  none | batch | side (true and false read as batch and none)
///   normalize_quantile  upper quantile of the diagram scaling range, (0, 1]
///   protocol     kfold | holdout
///   repeats, folds, train_fraction
///   orbit_per_class, orbit_points   generated when data_dir has no dataset
///   seed, output_dir, cache_dir, threads
struct RunConfig {
  std::string dataset = "MUTAG";
  std::string source = "graph";
  std::string data_dir = "data/MUTAG";
  std::vector<double> hks_times{10.0};
  std::vector<PointKind> kinds;
  ChannelSpec channel = parse_channel_spec("Im(20,(10,2),10,sum)");
  std::map<PointKind, ChannelSpec> channel_overrides;
  std::optional<std::size_t> prom;
  OptimizerConfig optimizer = parse_adam("adam(0.01,0.9,100)");
  std::size_t eigenvalues = 50;
  Standardization standardize = Standardization::side;
  double normalize_quantile = 1.0;
  std::string protocol = "kfold";
  std::size_t repeats = 10;
  std::size_t folds = 10;
  double train_fraction = 0.7;
  std::size_t orbit_per_class = 100;
  std::size_t orbit_points = 300;
  std::uint64_t seed = 0;
  std::string output_dir = "results";
  std::string cache_dir = "cache";
  std::size_t threads = 0;

  bool is_graph() const { return source == "graph"; }
  /// Kinds actually used: `kinds` or every kind of the source.
  std::vector<PointKind> active_kinds() const;
  ChannelSpec channel_for(PointKind k) const;
};

/// Throws std::invalid_argument naming the line for unknown keys or bad
/// values.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
/// Canonical text form; parse_run_config(format_run_config(c)) reproduces c.
std::string format_run_config(const RunConfig& cfg);

}  // namespace perslay
