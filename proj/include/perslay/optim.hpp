#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "perslay/model.hpp"

namespace perslay {

struct OptimizerConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double ema_decay = 0.0;  // 0 disables the shadow copy
  std::size_t epochs = 100;
  std::size_t batch_size = 128;
};

/// Parses `adam(lr, decay, epochs)`. Throws std::invalid_argument.
OptimizerConfig parse_adam(const std::string& text);
std::string to_string(const OptimizerConfig& cfg);

/// Adam with bias correction over every trainable tensor of a model, plus an
/// exponential moving average of the parameters.
class Adam {
 public:
  Adam(const OptimizerConfig& cfg, const Model& model);

  /// Updates `model` in place, re-projects it, then refreshes the shadow.
  void step(Model& model, const Model& grads);

  /// Parameters to evaluate with: the shadow when ema_decay > 0.
  const Model& evaluation_model(const Model& live) const;
  const Model& shadow() const { return shadow_; }
  std::size_t steps() const { return t_; }
  /// First and second moment buffers, in parameter order.
  const std::vector<std::vector<double>>& first_moment() const { return m_; }
  const std::vector<std::vector<double>>& second_moment() const { return v_; }

 private:
  OptimizerConfig cfg_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
  Model shadow_;
};

}  // namespace perslay
