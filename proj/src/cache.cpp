#include "perslay/cache.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "perslay/filtration.hpp"
#include "perslay/persistence.hpp"
#include "perslay/spectral.hpp"

namespace perslay {

namespace fs = std::filesystem;

namespace {
std::mutex warning_lock;

void warn(std::ostream* out, const std::string& text) {
  if (!out) return;
  std::lock_guard<std::mutex> g(warning_lock);
  *out << text;
}
}  // namespace

std::string DiagramPipeline::descriptor() const {
  char buf[160];
  if (source == Source::GraphHks) {
    std::snprintf(buf, sizeof buf, "hks t=%.17g; normalized laplacian; extended persistence (lower-star up, upper-star down)",
                  t);
  } else {
    std::snprintf(buf, sizeof buf, "alpha squared radius; ordinary persistence dims 0-1; essential death = max value");
  }
  return buf;
}

std::vector<PointKind> DiagramPipeline::kinds() const {
  if (source == Source::GraphHks) return {std::begin(kExtendedKinds), std::end(kExtendedKinds)};
  return {std::begin(kOrdinaryKinds), std::end(kOrdinaryKinds)};
}

PersistenceDiagram DiagramPipeline::compute(const Dataset& ds, std::size_t item) const {
  PersistenceDiagram dg;
  if (source == Source::GraphHks) {
    const Graph& g = ds.graphs.at(item);
    const auto f = hks(eigendecompose(normalized_laplacian(g)), t);
    dg = extended_persistence_fast(g, f);
  } else {
    const auto tri = delaunay_2d(ds.clouds.at(item));
    dg = ordinary_persistence(alpha_filtration(tri), 1);
  }
  dg.provenance = descriptor();
  return dg;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

DiagramCache::DiagramCache(fs::path root, std::string dataset, std::string descriptor, std::ostream* warnings)
    : descriptor_(std::move(descriptor)), warnings_(warnings) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(descriptor_)));
  dir_ = std::move(root) / dataset / hex;
}

fs::path DiagramCache::path(std::size_t item, PointKind kind) const {
  return dir_ / (std::to_string(item) + "." + std::string(to_string(kind)) + ".dgm");
}

std::optional<PersistenceDiagram> DiagramCache::fetch(std::size_t item, PointKind kind) const {
  const auto p = path(item, kind);
  std::error_code ec;
  if (!fs::exists(p, ec)) return std::nullopt;
  try {
    auto dg = load_diagram(p.string());
    if (dg.provenance != descriptor_) {
      warn(warnings_, "warning: " + p.string() + ": stale descriptor, recomputing\n");
      return std::nullopt;
    }
    for (const auto& pt : dg.points)
      if (pt.kind != kind) throw std::runtime_error("unexpected kind " + std::string(to_string(pt.kind)));
    return dg;
  } catch (const std::exception& e) {
    warn(warnings_, "warning: " + p.string() + ": unreadable (" + e.what() + "), recomputing\n");
    return std::nullopt;
  }
}

void DiagramCache::store(std::size_t item, PointKind kind, PersistenceDiagram dg) const {
  fs::create_directories(dir_);
  dg.provenance = descriptor_;
  const auto final_path = path(item, kind);
  std::ostringstream id;
  id << std::this_thread::get_id();
  auto tmp = final_path;
  tmp += ".tmp." + id.str();
  save_diagram(tmp.string(), dg);
  fs::rename(tmp, final_path);
}

namespace {

std::optional<std::vector<PersistenceDiagram>> fetch_item(const DiagramPipeline& pipeline, const DiagramCache& cache,
                                                          std::size_t item) {
  std::vector<PersistenceDiagram> out;
  for (PointKind k : pipeline.kinds()) {
    auto dg = cache.fetch(item, k);
    if (!dg) return std::nullopt;
    out.push_back(std::move(*dg));
  }
  return out;
}

}  // namespace

std::vector<std::vector<PersistenceDiagram>> ensure_diagrams(const Dataset& ds, const DiagramPipeline& pipeline,
                                                             const DiagramCache& cache, std::size_t threads,
                                                             CacheStats* stats) {
  std::vector<std::vector<PersistenceDiagram>> out(ds.size());
  std::atomic<std::size_t> next{0}, hits{0}, computed{0};
  std::mutex lock;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t item = next.fetch_add(1);
      if (item >= ds.size()) return;
      try {
        if (auto cached = fetch_item(pipeline, cache, item)) {
          out[item] = std::move(*cached);
          ++hits;
          continue;
        }
        const auto all = pipeline.compute(ds, item);
        for (PointKind k : pipeline.kinds()) {
          auto part = all.only(k);
          cache.store(item, k, part);
          part.provenance = pipeline.descriptor();
          out[item].push_back(std::move(part));
        }
        ++computed;
      } catch (...) {
        std::lock_guard<std::mutex> g(lock);
        if (!failure) failure = std::current_exception();
        next = ds.size();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(1, ds.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  if (stats) *stats = {hits.load(), computed.load()};
  return out;
}

std::optional<std::vector<std::vector<PersistenceDiagram>>> load_cached(const Dataset& ds,
                                                                        const DiagramPipeline& pipeline,
                                                                        const DiagramCache& cache) {
  std::vector<std::vector<PersistenceDiagram>> out;
  for (std::size_t item = 0; item < ds.size(); ++item) {
    auto got = fetch_item(pipeline, cache, item);
    if (!got) return std::nullopt;
    out.push_back(std::move(*got));
  }
  return out;
}

}  // namespace perslay
