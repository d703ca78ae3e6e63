#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "perslay/dataset.hpp"
#include "perslay/diagram.hpp"

namespace perslay {

/// What produces the diagrams of one dataset item.
struct DiagramPipeline {
  enum class Source { GraphHks, OrbitAlpha } source = Source::GraphHks;
  double t = 10.0;  // GraphHks diffusion time

  /// Full description written into every diagram header; two pipelines with
  /// the same descriptor produce the same diagrams.
  std::string descriptor() const;
  std::vector<PointKind> kinds() const;
  /// All kinds of one item in a single diagram.
  PersistenceDiagram compute(const Dataset& ds, std::size_t item) const;
};

std::uint64_t fnv1a64(const std::string& text);

/// On-disk store `<root>/<dataset>/<fnv1a64(descriptor) hex>/<item>.<kind>.dgm`.
/// Files are written to a temporary name and renamed into place.
class DiagramCache {
 public:
  DiagramCache(std::filesystem::path root, std::string dataset, std::string descriptor,
               std::ostream* warnings = nullptr);

  const std::filesystem::path& directory() const { return dir_; }
  std::filesystem::path path(std::size_t item, PointKind kind) const;

  /// nullopt when the file is missing, unreadable or carries another
  /// descriptor; the latter two print a warning.
  std::optional<PersistenceDiagram> fetch(std::size_t item, PointKind kind) const;
  void store(std::size_t item, PointKind kind, PersistenceDiagram dg) const;

 private:
  std::filesystem::path dir_;
  std::string descriptor_;
  std::ostream* warnings_;
};

struct CacheStats {
  std::size_t hits = 0;
  std::size_t computed = 0;
};

/// Diagrams of every item, split by kind (outer index item, inner index in
/// pipeline.kinds() order). Missing or stale entries are computed, in
/// parallel over items, and stored.
std::vector<std::vector<PersistenceDiagram>> ensure_diagrams(const Dataset& ds, const DiagramPipeline& pipeline,
                                                             const DiagramCache& cache, std::size_t threads,
                                                             CacheStats* stats = nullptr);

/// Like ensure_diagrams but never computes; nullopt when any entry is absent.
std::optional<std::vector<std::vector<PersistenceDiagram>>> load_cached(const Dataset& ds,
                                                                        const DiagramPipeline& pipeline,
                                                                        const DiagramCache& cache);

}  // namespace perslay
