#include "perslay/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace perslay {

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k, Rng& rng) {
  if (k == 0 || k > n) throw std::invalid_argument("make_folds: need 1 <= k <= n");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(idx.begin() + pos, idx.begin() + pos + size);
    std::sort(folds[f].begin(), folds[f].end());
    pos += size;
  }
  return folds;
}

namespace {

std::vector<const Sample*> gather(const std::vector<Sample>& data, std::span<const std::size_t> idx) {
  std::vector<const Sample*> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(&data.at(i));
  return out;
}

}  // namespace

TrainedModel train_model(const ModelConfig& mcfg, const OptimizerConfig& ocfg, const std::vector<Sample>& data,
                         std::span<const std::size_t> train, std::uint64_t seed,
                         const std::function<void(const std::string&, std::span<const std::size_t>)>& observer) {
  if (train.empty()) throw std::invalid_argument("train_model: empty training set");
  if (ocfg.batch_size == 0) throw std::invalid_argument("train_model: batch size must be positive");
  auto notify = [&](const char* what) {
    if (observer) observer(what, train);
  };
  Rng init = Rng::derive(seed, 1);
  Rng order = Rng::derive(seed, 2);

  TrainedModel tm;
  const auto samples = gather(data, train);
  for (std::size_t c = 0; c < mcfg.channels.size(); ++c) {
    std::vector<const PersistenceDiagram*> fit;
    for (const Sample* s : samples) fit.push_back(&s->diagrams.at(c));
    tm.norms.push_back(DiagramNormalizer::fit(fit, mcfg.normalize_quantile));
  }
  notify("normalizer");

  Model live = build_model(mcfg, init);
  fit_side_statistics(live, samples);
  notify("side");
  Adam adam(ocfg, live);
  notify("training");
  tm.initial_loss = loss_and_grads(live, samples, tm.norms).loss;

  std::vector<std::size_t> perm(samples.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<const Sample*> batch;
  for (std::size_t epoch = 0; epoch < ocfg.epochs; ++epoch) {
    order.shuffle(perm);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < perm.size(); start += ocfg.batch_size) {
      const std::size_t end = std::min(perm.size(), start + ocfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(samples[perm[i]]);
      auto lg = loss_and_grads(live, batch, tm.norms);
      adam.step(live, lg.grads);
      total += lg.loss;
      ++batches;
    }
    tm.epoch_loss.push_back(total / static_cast<double>(batches));
  }

  tm.model = adam.evaluation_model(live);
  tm.stats = fit_standardizer(tm.model, samples, tm.norms);
  notify("standardizer");
  return tm;
}

std::size_t predict(const TrainedModel& tm, const Sample& s) {
  const auto logits = forward_model(tm.model, s, tm.norms, &tm.stats);
  return static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

double accuracy(const TrainedModel& tm, const std::vector<Sample>& data, std::span<const std::size_t> idx) {
  if (idx.empty()) return 0.0;
  std::size_t hit = 0;
  for (auto i : idx) hit += predict(tm, data.at(i)) == data.at(i).label;
  return static_cast<double>(hit) / static_cast<double>(idx.size());
}

ProtocolResult run_protocol(const std::vector<Sample>& data, const ModelConfig& mcfg, const OptimizerConfig& ocfg,
                            const ProtocolConfig& pcfg, const ProtocolHooks& hooks) {
  if (pcfg.repeats == 0) throw std::invalid_argument("run_protocol: repeats must be positive");
  struct Job {
    std::size_t repeat, fold;
    std::vector<std::size_t> train, test;
  };
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < pcfg.repeats; ++r) {
    Rng split = Rng::derive(pcfg.seed, r);
    if (pcfg.holdout) {
      if (!(pcfg.train_fraction > 0.0 && pcfg.train_fraction < 1.0))
        throw std::invalid_argument("run_protocol: train fraction must be in (0,1)");
      std::vector<std::size_t> idx(data.size());
      std::iota(idx.begin(), idx.end(), 0);
      split.shuffle(idx);
      const auto cut = static_cast<std::size_t>(std::llround(pcfg.train_fraction * static_cast<double>(data.size())));
      Job j{r, 0, {idx.begin(), idx.begin() + cut}, {idx.begin() + cut, idx.end()}};
      std::sort(j.train.begin(), j.train.end());
      std::sort(j.test.begin(), j.test.end());
      jobs.push_back(std::move(j));
      continue;
    }
    const auto folds = make_folds(data.size(), pcfg.folds, split);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      Job j{r, f, {}, folds[f]};
      for (std::size_t g = 0; g < folds.size(); ++g)
        if (g != f) j.train.insert(j.train.end(), folds[g].begin(), folds[g].end());
      std::sort(j.train.begin(), j.train.end());
      jobs.push_back(std::move(j));
    }
  }

  ProtocolResult result;
  result.folds.resize(jobs.size());
  std::mutex lock;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      const Job& job = jobs[k];
      try {
        auto observer = [&](const std::string& what, std::span<const std::size_t> fit) {
          if (!hooks.on_fit) return;
          std::lock_guard<std::mutex> g(lock);
          hooks.on_fit(FitEvent{job.repeat, job.fold, what, fit, job.test});
        };
        const std::uint64_t seed = mix64(pcfg.seed ^ mix64(1 + job.repeat * 1000003ULL + job.fold));
        const TrainedModel tm = train_model(mcfg, ocfg, data, job.train, seed, observer);
        FoldResult fr{job.repeat, job.fold, accuracy(tm, data, job.train), accuracy(tm, data, job.test),
                      tm.initial_loss, tm.epoch_loss.empty() ? tm.initial_loss : tm.epoch_loss.back()};
        result.folds[k] = fr;
        if (hooks.on_fold) {
          std::lock_guard<std::mutex> g(lock);
          hooks.on_fold(fr, tm);
        }
      } catch (...) {
        std::lock_guard<std::mutex> g(lock);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  std::size_t threads = pcfg.threads ? pcfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  result.repeat_accuracy.assign(pcfg.repeats, 0.0);
  std::vector<std::size_t> count(pcfg.repeats, 0);
  for (const auto& f : result.folds) {
    result.repeat_accuracy[f.repeat] += f.test_acc;
    ++count[f.repeat];
  }
  for (std::size_t r = 0; r < pcfg.repeats; ++r) result.repeat_accuracy[r] /= static_cast<double>(count[r]);
  const double n = static_cast<double>(pcfg.repeats);
  result.mean = std::accumulate(result.repeat_accuracy.begin(), result.repeat_accuracy.end(), 0.0) / n;
  double var = 0.0;
  for (double a : result.repeat_accuracy) var += (a - result.mean) * (a - result.mean);
  result.std = std::sqrt(var / n);
  result.max = *std::max_element(result.repeat_accuracy.begin(), result.repeat_accuracy.end());
  return result;
}

void write_results_csv(std::ostream& out, const ProtocolResult& r) {
  out << "repeat,fold,train_acc,test_acc\n";
  char buf[128];
  for (const auto& f : r.folds) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f,%.6f\n", f.repeat, f.fold, f.train_acc, f.test_acc);
    out << buf;
  }
}

std::string summary_line(const ProtocolResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "mean %.1f (+-%.1f) max %.1f over %zu repeats", 100.0 * r.mean, 100.0 * r.std,
                100.0 * r.max, r.repeat_accuracy.size());
  return buf;
}

}  // namespace perslay
