#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "perslay/model.hpp"
#include "perslay/optim.hpp"

namespace perslay {

/// Shuffled partition of 0..n-1 into k parts whose sizes differ by at most one.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k, Rng& rng);

/// Reports every statistic fitted during training together with the indices
/// it saw, so callers can check that test items never leak in.
struct FitEvent {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::string what;  // "normalizer", "side", "standardizer", "training"
  std::span<const std::size_t> fit_indices;
  std::span<const std::size_t> test_indices;
};
using FitObserver = std::function<void(const FitEvent&)>;

struct TrainedModel {
  Model model;  // evaluation parameters (the shadow when EMA is on)
  std::vector<DiagramNormalizer> norms;
  Standardizer stats;
  double initial_loss = 0.0;        // full training set, before the first step
  std::vector<double> epoch_loss;   // mean minibatch loss per epoch
};

/// Fits normalizers on `train` only, trains with Adam, then freezes the
/// standardization statistics on `train` with the evaluation parameters.
/// `observer` (optional) receives a FitEvent for each fitted statistic.
TrainedModel train_model(const ModelConfig& mcfg, const OptimizerConfig& ocfg, const std::vector<Sample>& data,
                         std::span<const std::size_t> train, std::uint64_t seed,
                         const std::function<void(const std::string&, std::span<const std::size_t>)>& observer = {});

std::size_t predict(const TrainedModel& tm, const Sample& s);
double accuracy(const TrainedModel& tm, const std::vector<Sample>& data, std::span<const std::size_t> idx);

struct ProtocolConfig {
  std::size_t repeats = 10;
  std::size_t folds = 10;
  /// Single random split per repeat instead of k folds.
  bool holdout = false;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  /// Worker threads over independent folds; 0 picks the hardware count.
  std::size_t threads = 0;
};

struct FoldResult {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

struct ProtocolResult {
  std::vector<FoldResult> folds;       // ordered by (repeat, fold)
  std::vector<double> repeat_accuracy; // mean test accuracy of each repeat
  double mean = 0.0;                   // over repeats
  double std = 0.0;                    // population std over repeats
  double max = 0.0;                    // best repeat
};

struct ProtocolHooks {
  /// Called with a lock held, so it need not be thread-safe.
  FitObserver on_fit;
  /// Called with a lock held after each fold finishes.
  std::function<void(const FoldResult&, const TrainedModel&)> on_fold;
};

/// Repeated k-fold (or holdout) evaluation. Results depend only on the inputs
/// and the seed, never on the thread count.
ProtocolResult run_protocol(const std::vector<Sample>& data, const ModelConfig& mcfg, const OptimizerConfig& ocfg,
                            const ProtocolConfig& pcfg, const ProtocolHooks& hooks = {});

/// `repeat,fold,train_acc,test_acc` rows.
void write_results_csv(std::ostream& out, const ProtocolResult& r);
/// One line: mean, std and max over repeats, in percent.
std::string summary_line(const ProtocolResult& r);

}  // namespace perslay
