#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "perslay/diagram.hpp"
#include "perslay/graph.hpp"
#include "perslay/layer.hpp"
#include "perslay/rng.hpp"
#include "perslay/spectral.hpp"

namespace perslay {

/// One classification example: a diagram per channel slot and a fixed-length
/// side vector that bypasses the channels.
struct Sample {
  std::vector<PersistenceDiagram> diagrams;
  std::vector<double> spectral;
  std::size_t label = 0;
};

/// First `padded_length` eigenvalues (ascending, zero padded), then for each
/// hks function its 11 deciles 0%, 10%, ..., 100% with linear interpolation
/// between order statistics.
std::vector<double> spectral_features(const SpectralDecomposition& spec, std::span<const VertexFunction> hks_values,
                                      std::size_t padded_length);

/// Deciles of a non-empty sample; zeros when empty.
std::vector<double> deciles(std::vector<double> values);

/// Normalization of the concatenated vector before the dense layer.
///   none   raw features
///   batch  every feature: batch statistics while training, training-set
///          statistics at evaluation
///   side   only the spectral side features, with frozen training-set
///          statistics; channel outputs enter the dense layer unscaled
enum class Standardization { none, batch, side };

Standardization parse_standardization(const std::string& text);
std::string standardization_name(Standardization s);

struct ModelConfig {
  std::vector<ChannelSpec> channels;  // one per diagram slot
  std::size_t spectral_dim = 0;
  std::size_t classes = 2;
  Standardization standardize = Standardization::side;
  /// Upper quantile of the diagram normalizer range (1 = plain min-max).
  double normalize_quantile = 1.0;
};

/// Parallel channels, concatenation with the side vector, optional
/// standardization, then a dense softmax classifier.
struct Model {
  std::vector<Channel> channels;
  Tensor dense_w;  // classes x features
  Tensor dense_b;  // classes
  std::size_t spectral_dim = 0;
  std::size_t classes = 0;
  Standardization standardize = Standardization::side;
  /// Frozen side-feature statistics (side mode); empty means identity.
  std::vector<double> side_mean, side_inv_std;

  std::size_t feature_dim() const;
  /// Every tensor, named `channel<i>.<tensor>` or `dense.w` / `dense.b`.
  std::vector<std::pair<std::string, Tensor*>> parameters();
  std::vector<std::pair<std::string, const Tensor*>> parameters() const;
  Model zeros_like() const;
  void project();
};

/// Dense weights drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero bias.
Model build_model(const ModelConfig& cfg, Rng& rng);

/// Fits the side statistics of a side-mode model on `samples`; no-op otherwise.
void fit_side_statistics(Model& m, std::span<const Sample* const> samples);

/// Frozen standardization statistics.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> inv_std;
};

inline constexpr double kStandardizeEpsilon = 1e-5;

/// Concatenated channel outputs and side vector. Throws std::invalid_argument
/// when the sample does not match the model's shape.
std::vector<double> model_features(const Model& m, const Sample& s, std::span<const DiagramNormalizer> norms,
                                   std::vector<ChannelCache>* caches = nullptr);

/// Population mean and 1/sqrt(var + eps) of the features over `samples`.
Standardizer fit_standardizer(const Model& m, std::span<const Sample* const> samples,
                              std::span<const DiagramNormalizer> norms);

/// Class logits. `stats` is ignored unless the model uses batch standardization.
std::vector<double> forward_model(const Model& m, const Sample& s, std::span<const DiagramNormalizer> norms,
                                  const Standardizer* stats);

struct LossAndGrads {
  double loss = 0.0;
  Model grads;
};

/// Mean softmax cross-entropy over the batch in training mode (batch
/// statistics when standardizing) and its exact gradient.
LossAndGrads loss_and_grads(const Model& m, std::span<const Sample* const> batch,
                            std::span<const DiagramNormalizer> norms);

/// Plain-text parameter dump: one `name shape values...` line per tensor.
void write_parameters(std::ostream& out, const Model& m);

}  // namespace perslay
