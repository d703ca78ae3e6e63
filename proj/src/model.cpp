#include "perslay/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace perslay {

std::vector<double> deciles(std::vector<double> values) {
  std::vector<double> out(11, 0.0);
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  const double last = static_cast<double>(values.size() - 1);
  for (int k = 0; k <= 10; ++k) {
    const double pos = last * k / 10.0;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    out[k] = values[lo] + (values[hi] - values[lo]) * frac;
  }
  return out;
}

std::vector<double> spectral_features(const SpectralDecomposition& spec, std::span<const VertexFunction> hks_values,
                                      std::size_t padded_length) {
  std::vector<double> out(padded_length, 0.0);
  const std::size_t keep = std::min(padded_length, spec.eigenvalues.size());
  std::copy_n(spec.eigenvalues.begin(), keep, out.begin());
  for (const auto& h : hks_values) {
    const auto d = deciles(h.values);
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

// ------------------------------------------------------------------ model

Standardization parse_standardization(const std::string& text) {
  if (text == "none" || text == "false") return Standardization::none;
  if (text == "batch" || text == "true") return Standardization::batch;
  if (text == "side") return Standardization::side;
  throw std::invalid_argument("standardize must be none, batch or side, got '" + text + "'");
}

std::string standardization_name(Standardization s) {
  switch (s) {
    case Standardization::none: return "none";
    case Standardization::batch: return "batch";
    case Standardization::side: return "side";
  }
  return "none";
}

std::size_t Model::feature_dim() const {
  std::size_t n = spectral_dim;
  for (const auto& c : channels) n += c.output_dim();
  return n;
}

std::vector<std::pair<std::string, Tensor*>> Model::parameters() {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (std::size_t i = 0; i < channels.size(); ++i)
    for (auto& [name, t] : channels[i].tensors()) out.emplace_back("channel" + std::to_string(i) + "." + name, t);
  out.emplace_back("dense.w", &dense_w);
  out.emplace_back("dense.b", &dense_b);
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> Model::parameters() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (auto& [name, t] : const_cast<Model*>(this)->parameters()) out.emplace_back(name, t);
  return out;
}

Model Model::zeros_like() const {
  Model z = *this;
  for (auto& [name, t] : z.parameters()) std::fill(t->data.begin(), t->data.end(), 0.0);
  return z;
}

void Model::project() {
  for (auto& c : channels) c.project();
}

Model build_model(const ModelConfig& cfg, Rng& rng) {
  if (cfg.classes < 2) throw std::invalid_argument("build_model: need at least two classes");
  Model m;
  for (const auto& spec : cfg.channels) m.channels.push_back(build_channel(spec, rng));
  m.spectral_dim = cfg.spectral_dim;
  m.classes = cfg.classes;
  m.standardize = cfg.standardize;
  const std::size_t f = m.feature_dim();
  if (f == 0) throw std::invalid_argument("build_model: model has no features");
  m.dense_w = Tensor({cfg.classes, f}, 0.0, true);
  const double bound = 1.0 / std::sqrt(static_cast<double>(f));
  for (double& w : m.dense_w.data) w = rng.uniform(-bound, bound);
  m.dense_b = Tensor({cfg.classes}, 0.0, true);
  return m;
}

// ---------------------------------------------------------------- forward

std::vector<double> model_features(const Model& m, const Sample& s, std::span<const DiagramNormalizer> norms,
                                   std::vector<ChannelCache>* caches) {
  if (s.diagrams.size() != m.channels.size())
    throw std::invalid_argument("model: sample has " + std::to_string(s.diagrams.size()) + " diagrams, model has " +
                                std::to_string(m.channels.size()) + " channels");
  if (norms.size() != m.channels.size()) throw std::invalid_argument("model: one normalizer per channel required");
  if (s.spectral.size() != m.spectral_dim)
    throw std::invalid_argument("model: side vector length " + std::to_string(s.spectral.size()) + ", expected " +
                                std::to_string(m.spectral_dim));
  std::vector<double> x;
  x.reserve(m.feature_dim());
  if (caches) caches->resize(m.channels.size());
  for (std::size_t c = 0; c < m.channels.size(); ++c) {
    const auto out = forward(m.channels[c], s.diagrams[c], norms[c], caches ? &(*caches)[c] : nullptr);
    x.insert(x.end(), out.begin(), out.end());
  }
  const std::size_t offset = x.size();
  x.insert(x.end(), s.spectral.begin(), s.spectral.end());
  if (!m.side_mean.empty())
    for (std::size_t f = 0; f < m.spectral_dim; ++f)
      x[offset + f] = (x[offset + f] - m.side_mean[f]) * m.side_inv_std[f];
  return x;
}

void fit_side_statistics(Model& m, std::span<const Sample* const> samples) {
  m.side_mean.clear();
  m.side_inv_std.clear();
  if (m.standardize != Standardization::side || m.spectral_dim == 0 || samples.empty()) return;
  const std::size_t F = m.spectral_dim;
  const double n = static_cast<double>(samples.size());
  std::vector<double> mean(F, 0.0), var(F, 0.0);
  for (const Sample* s : samples)
    for (std::size_t f = 0; f < F; ++f) mean[f] += s->spectral.at(f) / n;
  for (const Sample* s : samples)
    for (std::size_t f = 0; f < F; ++f) var[f] += (s->spectral[f] - mean[f]) * (s->spectral[f] - mean[f]);
  m.side_inv_std.resize(F);
  for (std::size_t f = 0; f < F; ++f) m.side_inv_std[f] = 1.0 / std::sqrt(var[f] / n + kStandardizeEpsilon);
  m.side_mean = std::move(mean);
}

Standardizer fit_standardizer(const Model& m, std::span<const Sample* const> samples,
                              std::span<const DiagramNormalizer> norms) {
  const std::size_t F = m.feature_dim();
  Standardizer st{std::vector<double>(F, 0.0), std::vector<double>(F, 0.0)};
  if (samples.empty()) {
    std::fill(st.inv_std.begin(), st.inv_std.end(), 1.0);
    return st;
  }
  std::vector<std::vector<double>> xs;
  for (const Sample* s : samples) xs.push_back(model_features(m, *s, norms));
  const double n = static_cast<double>(xs.size());
  for (const auto& x : xs)
    for (std::size_t f = 0; f < F; ++f) st.mean[f] += x[f];
  for (double& v : st.mean) v /= n;
  std::vector<double> var(F, 0.0);
  for (const auto& x : xs)
    for (std::size_t f = 0; f < F; ++f) var[f] += (x[f] - st.mean[f]) * (x[f] - st.mean[f]);
  for (std::size_t f = 0; f < F; ++f) st.inv_std[f] = 1.0 / std::sqrt(var[f] / n + kStandardizeEpsilon);
  return st;
}

namespace {

std::vector<double> dense(const Model& m, const std::vector<double>& z) {
  const std::size_t F = z.size();
  std::vector<double> logits(m.classes);
  for (std::size_t c = 0; c < m.classes; ++c) {
    double s = m.dense_b[c];
    const double* row = &m.dense_w.data[c * F];
    for (std::size_t f = 0; f < F; ++f) s += row[f] * z[f];
    logits[c] = s;
  }
  return logits;
}

}  // namespace

std::vector<double> forward_model(const Model& m, const Sample& s, std::span<const DiagramNormalizer> norms,
                                  const Standardizer* stats) {
  auto z = model_features(m, s, norms);
  if (m.standardize == Standardization::batch && stats) {
    if (stats->mean.size() != z.size()) throw std::invalid_argument("forward_model: standardizer width mismatch");
    for (std::size_t f = 0; f < z.size(); ++f) z[f] = (z[f] - stats->mean[f]) * stats->inv_std[f];
  }
  return dense(m, z);
}

LossAndGrads loss_and_grads(const Model& m, std::span<const Sample* const> batch,
                            std::span<const DiagramNormalizer> norms) {
  LossAndGrads out{0.0, m.zeros_like()};
  const std::size_t B = batch.size(), F = m.feature_dim(), C = m.classes;
  if (B == 0) return out;
  std::vector<std::vector<ChannelCache>> caches(B);
  std::vector<std::vector<double>> z(B);
  for (std::size_t b = 0; b < B; ++b) {
    if (batch[b]->label >= C) throw std::invalid_argument("loss_and_grads: label out of range");
    z[b] = model_features(m, *batch[b], norms, &caches[b]);
  }

  std::vector<double> inv_std;
  if (m.standardize == Standardization::batch) {
    std::vector<double> mean(F, 0.0), var(F, 0.0);
    for (const auto& x : z)
      for (std::size_t f = 0; f < F; ++f) mean[f] += x[f];
    for (double& v : mean) v /= static_cast<double>(B);
    for (const auto& x : z)
      for (std::size_t f = 0; f < F; ++f) var[f] += (x[f] - mean[f]) * (x[f] - mean[f]);
    inv_std.resize(F);
    for (std::size_t f = 0; f < F; ++f) inv_std[f] = 1.0 / std::sqrt(var[f] / B + kStandardizeEpsilon);
    for (auto& x : z)
      for (std::size_t f = 0; f < F; ++f) x[f] = (x[f] - mean[f]) * inv_std[f];
  }

  // Softmax cross-entropy, averaged.
  std::vector<std::vector<double>> g_z(B, std::vector<double>(F, 0.0));
  Model& g = out.grads;
  for (std::size_t b = 0; b < B; ++b) {
    auto logits = dense(m, z[b]);
    const double top = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double& l : logits) total += std::exp(l - top);
    const double lse = top + std::log(total);
    out.loss += (lse - logits[batch[b]->label]) / static_cast<double>(B);
    for (std::size_t c = 0; c < C; ++c) {
      const double p = std::exp(logits[c] - lse);
      const double gl = (p - (c == batch[b]->label ? 1.0 : 0.0)) / static_cast<double>(B);
      g.dense_b[c] += gl;
      const double* row = &m.dense_w.data[c * F];
      double* grow = &g.dense_w.data[c * F];
      for (std::size_t f = 0; f < F; ++f) {
        grow[f] += gl * z[b][f];
        g_z[b][f] += gl * row[f];
      }
    }
  }

  // Through the batch standardization: with z = (x - mean) * inv_std,
  // dx = inv_std * (dz - mean(dz) - z * mean(dz * z)).
  if (m.standardize == Standardization::batch) {
    std::vector<double> mean_g(F, 0.0), mean_gz(F, 0.0);
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t f = 0; f < F; ++f) {
        mean_g[f] += g_z[b][f];
        mean_gz[f] += g_z[b][f] * z[b][f];
      }
    for (std::size_t f = 0; f < F; ++f) {
      mean_g[f] /= static_cast<double>(B);
      mean_gz[f] /= static_cast<double>(B);
    }
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t f = 0; f < F; ++f)
        g_z[b][f] = inv_std[f] * (g_z[b][f] - mean_g[f] - z[b][f] * mean_gz[f]);
  }

  for (std::size_t b = 0; b < B; ++b) {
    std::size_t offset = 0;
    for (std::size_t c = 0; c < m.channels.size(); ++c) {
      const std::size_t d = m.channels[c].output_dim();
      backward(m.channels[c], caches[b][c], std::span<const double>(g_z[b].data() + offset, d), g.channels[c]);
      offset += d;
    }
  }
  return out;
}

void write_parameters(std::ostream& out, const Model& m) {
  out << std::setprecision(17);
  for (const auto& [name, t] : m.parameters()) {
    out << name << ' ';
    for (std::size_t i = 0; i < t->shape.size(); ++i) out << (i ? "x" : "") << t->shape[i];
    for (double v : t->data) out << ' ' << v;
    out << '\n';
  }
}

}  // namespace perslay
