// perslay: diagrams, training, evaluation and diagnostics from a run config.

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using perslay::RunConfig;

/// Loads the config named by --config and applies the path and seed flags.
struct ConfigFlags {
  std::string path;
  std::string output_dir;
  std::string cache_dir;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* cmd) {
    cmd->add_option("-c,--config", path, "Run config file (key = value lines)")->required();
    cmd->add_option("-o,--out", output_dir, "Override output_dir");
    cmd->add_option("--cache", cache_dir, "Override cache_dir");
    cmd->add_option("--seed", seed, "Override seed");
  }

  RunConfig load() const {
    RunConfig cfg = perslay::load_run_config(path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    if (seed) cfg.seed = *seed;
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  namespace cli = perslay::cli;
  CLI::App app{"PersLay: extended persistence diagrams of graphs and a trainable diagram vectorization"};
  app.require_subcommand(1);

  ConfigFlags diagrams_flags, train_flags, eval_flags, diag_flags, ablation_flags;

  auto* diagrams = app.add_subcommand("diagrams", "Compute and cache the persistence diagrams of a dataset");
  diagrams_flags.add(diagrams);

  auto* train = app.add_subcommand("train", "Run the repeated k-fold (or holdout) protocol on cached diagrams");
  train_flags.add(train);
  std::string weight = "grid";
  train->add_option("--weight", weight, "Weight function: grid (as configured) or none (w = 1)")
      ->check(CLI::IsMember({"grid", "none"}));

  auto* eval = app.add_subcommand("eval", "Summarize output_dir/results.csv (Mean and Max over repeats)");
  eval_flags.add(eval);

  auto* dist = app.add_subcommand("dist", "Distance between two diagram files of one kind");
  std::string file_a, file_b, metric = "bottleneck";
  double order = 1.0;
  dist->add_option("first", file_a, "First diagram file")->required();
  dist->add_option("second", file_b, "Second diagram file")->required();
  dist->add_option("--metric", metric, "bottleneck or ws (Wasserstein)")->check(CLI::IsMember({"bottleneck", "ws"}));
  dist->add_option("--s", order, "Wasserstein order, at least 1");

  auto* orbit = app.add_subcommand("orbit-gen", "Generate a linked-twist-map orbit dataset");
  std::size_t per_class = 100, points = 300;
  std::uint64_t orbit_seed = 0;
  std::string orbit_out;
  orbit->add_option("--per-class", per_class, "Orbits per rate")->capture_default_str();
  orbit->add_option("--points", points, "Points per orbit")->capture_default_str();
  orbit->add_option("--seed", orbit_seed, "Seed for the initial points")->capture_default_str();
  orbit->add_option("--out", orbit_out, "Output directory")->required();

  auto* diag = app.add_subcommand("diagnostics", "t sweep, accuracy against t and grid weight dumps as CSV");
  diag_flags.add(diag);
  cli::DiagnosticsOptions dopt;
  diag->add_option("--graph", dopt.graph, "Item used by the t sweep")->capture_default_str();
  diag->add_option("--t-min", dopt.t_min, "Smallest t")->capture_default_str();
  diag->add_option("--t-max", dopt.t_max, "Largest t")->capture_default_str();
  diag->add_option("--steps", dopt.steps, "Log-spaced t values in the bottleneck sweep")->capture_default_str();
  diag->add_option("--accuracy-steps", dopt.accuracy_steps, "Log-spaced t values in the accuracy sweep (0 skips)")
      ->capture_default_str();

  auto* ablation = app.add_subcommand("ablation", "Grid size x point transformation x op sweep on cached diagrams");
  ablation_flags.add(ablation);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*diagrams) return cli::cmd_diagrams(diagrams_flags.load(), std::cout, std::cerr);
    if (*train) return cli::cmd_train(train_flags.load(), {weight == "none"}, std::cout, std::cerr);
    if (*eval) return cli::cmd_eval(eval_flags.load(), std::cout, std::cerr);
    if (*dist) return cli::cmd_dist(file_a, file_b, metric, order, std::cout, std::cerr);
    if (*orbit) return cli::cmd_orbit_gen(per_class, points, orbit_seed, orbit_out, std::cout, std::cerr);
    if (*diag) return cli::cmd_diagnostics(diag_flags.load(), dopt, std::cout, std::cerr);
    if (*ablation) return cli::cmd_ablation(ablation_flags.load(), std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitFailure;
  }
  return cli::kExitFailure;
}
