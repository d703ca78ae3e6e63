#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "perslay/config.hpp"

namespace perslay::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     // bad usage or config
inline constexpr int kExitUnreadable = 2;  // dataset unreadable or output unwritable
inline constexpr int kExitNoCache = 3;     // diagrams not computed yet
inline constexpr int kExitKindMismatch = 4;

/// Computes every missing diagram of the configured dataset into the cache.
int cmd_diagrams(const RunConfig& cfg, std::ostream& out, std::ostream& err);

struct TrainOptions {
  /// Replaces every grid weight by w = 1 (the `None` ablation column).
  bool constant_weight = false;
};

/// Full protocol on cached diagrams. Writes results.csv, summary.csv and one
/// parameter dump per repeat (the model of its first fold) to output_dir.
int cmd_train(RunConfig cfg, const TrainOptions& opt, std::ostream& out, std::ostream& err);

/// Re-reads output_dir/results.csv and reports per-repeat accuracy together
/// with the Mean and Max summary.
int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Prints the distance between two diagram files with 12 significant digits.
/// metric is "bottleneck" or "ws" (order s).
int cmd_dist(const std::string& a, const std::string& b, const std::string& metric, double s, std::ostream& out,
             std::ostream& err);

int cmd_orbit_gen(std::size_t per_class, std::size_t points, std::uint64_t seed, const std::string& dir,
                  std::ostream& out, std::ostream& err);

struct DiagnosticsOptions {
  std::size_t graph = 0;        // item used by the t sweep
  double t_min = 0.01;
  double t_max = 100.0;
  std::size_t steps = 25;       // log-spaced t values of the bottleneck sweep
  std::size_t accuracy_steps = 5;  // log-spaced t values of the accuracy sweep, 0 skips it
};

/// Writes tsweep.csv, accuracy_vs_t.csv and grid_{before,after}_<slot>.csv
/// under output_dir/diagnostics.
int cmd_diagnostics(const RunConfig& cfg, const DiagnosticsOptions& opt, std::ostream& out, std::ostream& err);

/// Grid size x point transformation x op sweep. Writes ablation.csv (one
/// row per combination), ablation_table.csv (grid-size, transformation and op
/// columns) and ablation_times.csv under output_dir.
int cmd_ablation(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// The ablation combinations for a base channel, as channel specs keyed by
/// (phi name, op name, grid).
struct AblationCell {
  std::string phi;
  std::string op;
  std::size_t grid;
  ChannelSpec spec;
};
std::vector<AblationCell> ablation_cells(const ChannelSpec& base);
inline constexpr std::size_t kAblationGrids[] = {0, 2, 5, 10, 20, 50};

}  // namespace perslay::cli
