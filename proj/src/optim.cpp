#include "perslay/optim.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace perslay {

OptimizerConfig parse_adam(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  OptimizerConfig cfg;
  if (s.rfind("adam(", 0) != 0 || s.back() != ')')
    throw std::invalid_argument("optimizer: expected adam(lr,decay,epochs), got '" + raw + "'");
  std::istringstream in(s.substr(5, s.size() - 6));
  char c1 = 0, c2 = 0;
  double epochs = 0;
  in >> cfg.learning_rate >> c1 >> cfg.ema_decay >> c2 >> epochs;
  if (!in || c1 != ',' || c2 != ',' || in.peek() != EOF)
    throw std::invalid_argument("optimizer: cannot parse '" + raw + "'");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("optimizer: learning rate must be positive");
  if (!(cfg.ema_decay >= 0.0 && cfg.ema_decay < 1.0)) throw std::invalid_argument("optimizer: decay must be in [0,1)");
  if (!(epochs >= 1.0) || epochs != std::floor(epochs))
    throw std::invalid_argument("optimizer: epochs must be a positive integer");
  cfg.epochs = static_cast<std::size_t>(epochs);
  return cfg;
}

std::string to_string(const OptimizerConfig& cfg) {
  auto shortest = [](double v) {
    char buf[32];
    return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
  };
  return "adam(" + shortest(cfg.learning_rate) + "," + shortest(cfg.ema_decay) + "," + std::to_string(cfg.epochs) + ")";
}

Adam::Adam(const OptimizerConfig& cfg, const Model& model) : cfg_(cfg), shadow_(model) {
  for (const auto& [name, t] : model.parameters()) {
    m_.emplace_back(t->size(), 0.0);
    v_.emplace_back(t->size(), 0.0);
  }
}

void Adam::step(Model& model, const Model& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  auto params = model.parameters();
  const auto gs = grads.parameters();
  if (params.size() != m_.size() || gs.size() != m_.size())
    throw std::invalid_argument("Adam::step: parameter layout changed");
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k].second;
    if (!p.trainable) continue;
    const Tensor& g = *gs[k].second;
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      p[i] -= cfg_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.epsilon);
    }
  }
  model.project();

  const double d = cfg_.ema_decay;
  auto shadow = shadow_.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& s = shadow[k].second->data;
    const auto& p = params[k].second->data;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = d * s[i] + (1.0 - d) * p[i];
  }
  shadow_.project();
}

const Model& Adam::evaluation_model(const Model& live) const { return cfg_.ema_decay > 0.0 ? shadow_ : live; }

}  // namespace perslay
