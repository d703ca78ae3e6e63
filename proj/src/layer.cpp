#include "perslay/layer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace perslay {

Tensor::Tensor(std::vector<std::size_t> s, double fill, bool train) : shape(std::move(s)), trainable(train) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  data.assign(n, fill);
}

std::size_t PointTransform::dim() const {
  switch (kind) {
    case TransformKind::Triangle: return samples.size();
    case TransformKind::Gaussian:
    case TransformKind::LogGaussian: return centers.size() / 2;
    case TransformKind::Line: return biases.size();
  }
  return 0;
}

// ---------------------------------------------------------------- weights

std::size_t WeightFunction::cell(double x, double y) const {
  const auto n = static_cast<double>(side);
  auto idx = [&](double v) {
    const double c = std::floor(v * n);
    return static_cast<std::size_t>(std::clamp(c, 0.0, n - 1.0));
  };
  return idx(x) * side + idx(y);
}

double WeightFunction::profile_at(double x, double y) const {
  if (profile == ProfileKind::Constant) return profile_value;
  const double d = std::max(std::abs(x - tent_center[0]), std::abs(y - tent_center[1]));
  return tent_height * std::max(0.0, 1.0 - d / tent_scale);
}

double WeightFunction::operator()(double x, double y) const {
  switch (kind) {
    case WeightKind::Constant: return 1.0;
    case WeightKind::Grid: return grid[cell(x, y)];
    case WeightKind::DiagonalPower: return std::pow(0.5 * std::abs(y - x), power) * profile_at(x, y);
  }
  return 1.0;
}

// ------------------------------------------------------------- normalizer

DiagramNormalizer DiagramNormalizer::identity() {
  DiagramNormalizer n;
  n.identity_ = true;
  return n;
}

DiagramNormalizer DiagramNormalizer::fit(std::span<const PersistenceDiagram* const> diagrams, double upper_quantile) {
  if (!(upper_quantile > 0.0 && upper_quantile <= 1.0))
    throw std::invalid_argument("DiagramNormalizer: upper quantile must be in (0, 1]");
  DiagramNormalizer n;
  std::array<std::array<std::vector<double>, 2>, 6> values;
  for (const auto* dg : diagrams)
    for (const auto& p : dg->points) {
      auto& v = values[static_cast<int>(p.kind)];
      v[0].push_back(p.birth);
      v[1].push_back(p.death);
    }
  for (std::size_t k = 0; k < values.size(); ++k) {
    Range& r = n.ranges_[k];
    r.seen = !values[k][0].empty();
    if (!r.seen) continue;
    for (int a = 0; a < 2; ++a) {
      auto& v = values[k][a];
      std::sort(v.begin(), v.end());
      const double pos = upper_quantile * static_cast<double>(v.size() - 1);
      const auto i = static_cast<std::size_t>(std::floor(pos));
      const std::size_t j = std::min(i + 1, v.size() - 1);
      r.lo[a] = v.front();
      r.hi[a] = v[i] + (v[j] - v[i]) * (pos - static_cast<double>(i));
    }
  }
  return n;
}

DiagramNormalizer DiagramNormalizer::fit(const std::vector<PersistenceDiagram>& diagrams, double upper_quantile) {
  std::vector<const PersistenceDiagram*> ptrs;
  for (const auto& d : diagrams) ptrs.push_back(&d);
  return fit(ptrs, upper_quantile);
}

std::pair<double, double> DiagramNormalizer::apply(const DiagramPoint& p) const {
  if (identity_) return {p.birth, p.death};
  const Range& r = ranges_[static_cast<int>(p.kind)];
  double v[2] = {p.birth, p.death};
  if (r.seen) {
    for (int a = 0; a < 2; ++a) {
      const double span = r.hi[a] - r.lo[a];
      v[a] = span > 0.0 ? (v[a] - r.lo[a]) / span : v[a] - r.lo[a] + 0.5;
    }
  }
  return {std::clamp(v[0], 0.0, 1.0), std::clamp(v[1], 0.0, 1.0)};
}

// ---------------------------------------------------------------- channel

std::size_t Channel::feature_dim() const { return has_equivariant ? equivariant.out : transform.dim(); }

std::size_t Channel::aggregated_dim() const {
  return op.kind == OpKind::TopK ? feature_dim() * op.k : feature_dim();
}

std::size_t Channel::output_dim() const { return has_conv ? conv.output_dim() : aggregated_dim(); }

std::vector<std::pair<std::string, Tensor*>> Channel::tensors() {
  std::vector<std::pair<std::string, Tensor*>> out;
  auto add = [&](const char* name, Tensor& t) {
    if (!t.empty()) out.emplace_back(name, &t);
  };
  add("transform.samples", transform.samples);
  add("transform.centers", transform.centers);
  add("transform.sigma", transform.sigma);
  add("transform.nu", transform.nu);
  add("transform.directions", transform.directions);
  add("transform.biases", transform.biases);
  add("weight.grid", weight.grid);
  if (has_equivariant) {
    add("equivariant.a", equivariant.a);
    add("equivariant.b", equivariant.b);
    add("equivariant.c", equivariant.c);
  }
  if (has_conv) {
    add("conv.weights", conv.weights);
    add("conv.bias", conv.bias);
  }
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> Channel::tensors() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (auto& [name, t] : const_cast<Channel*>(this)->tensors()) out.emplace_back(name, t);
  return out;
}

Channel Channel::zeros_like() const {
  Channel z = *this;
  for (auto& [name, t] : z.tensors()) std::fill(t->data.begin(), t->data.end(), 0.0);
  return z;
}

void Channel::project() {
  auto& dirs = transform.directions;
  for (std::size_t k = 0; k + 1 < dirs.size(); k += 2) {
    const double n = std::hypot(dirs[k], dirs[k + 1]);
    if (std::abs(n - 1.0) <= 1e-12) continue;
    if (n > 0.0) {
      dirs[k] /= n;
      dirs[k + 1] /= n;
    } else {
      dirs[k] = 1.0;
      dirs[k + 1] = 0.0;
    }
  }
  constexpr double kFloor = 1e-6;
  for (double& s : transform.sigma.data) s = std::max(s, kFloor);
  for (double& v : transform.nu.data) v = std::max(v, kFloor);
}

namespace {

constexpr double kNegInf = -INFINITY;

void eval_transform(const PointTransform& tr, double x, double y, double* out, std::vector<double>& scratch) {
  const std::size_t q = tr.dim();
  switch (tr.kind) {
    case TransformKind::Triangle: {
      double tx = x, ty = y;
      if (tr.convention == TriangleConvention::Classical) {
        tx = 0.5 * (x + y);
        ty = 0.5 * (y - x);
      }
      for (std::size_t k = 0; k < q; ++k) out[k] = std::max(0.0, ty - std::abs(tr.samples[k] - tx));
      return;
    }
    case TransformKind::Line:
      for (std::size_t k = 0; k < q; ++k)
        out[k] = tr.directions[2 * k] * x + tr.directions[2 * k + 1] * y + tr.biases[k];
      return;
    case TransformKind::Gaussian:
    case TransformKind::LogGaussian: {
      double py = y;
      if (tr.kind == TransformKind::LogGaussian && y > tr.nu[0]) py = tr.nu[0] + std::log(y / tr.nu[0]);
      const double inv = 1.0 / (2.0 * tr.sigma[0] * tr.sigma[0]);
      const std::size_t side = tr.grid_side;
      if (side > 0 && !tr.centers.trainable) {
        // exp(-(dx^2 + dy^2) c) = exp(-dx^2 c) exp(-dy^2 c) on a grid.
        scratch.resize(2 * side);
        for (std::size_t i = 0; i < side; ++i) {
          const double dx = x - tr.centers[2 * (i * side)];
          const double dy = py - tr.centers[2 * i + 1];
          scratch[i] = std::exp(-dx * dx * inv);
          scratch[side + i] = std::exp(-dy * dy * inv);
        }
        for (std::size_t i = 0; i < side; ++i)
          for (std::size_t j = 0; j < side; ++j) out[i * side + j] = scratch[i] * scratch[side + j];
        return;
      }
      for (std::size_t k = 0; k < q; ++k) {
        const double dx = x - tr.centers[2 * k], dy = py - tr.centers[2 * k + 1];
        out[k] = std::exp(-(dx * dx + dy * dy) * inv);
      }
      return;
    }
  }
}

void backprop_transform(const PointTransform& tr, double x, double y, const double* value, const double* g,
                        PointTransform& grad) {
  const std::size_t q = tr.dim();
  switch (tr.kind) {
    case TransformKind::Triangle: {
      if (!tr.samples.trainable) return;
      double tx = x;
      if (tr.convention == TriangleConvention::Classical) tx = 0.5 * (x + y);
      for (std::size_t k = 0; k < q; ++k) {
        if (value[k] <= 0.0) continue;
        const double t = tr.samples[k];
        // d/dt of -|t - tx|
        const double s = t < tx ? 1.0 : (t > tx ? -1.0 : 0.0);
        grad.samples[k] += g[k] * s;
      }
      return;
    }
    case TransformKind::Line:
      if (tr.directions.trainable)
        for (std::size_t k = 0; k < q; ++k) {
          grad.directions[2 * k] += g[k] * x;
          grad.directions[2 * k + 1] += g[k] * y;
        }
      if (tr.biases.trainable)
        for (std::size_t k = 0; k < q; ++k) grad.biases[k] += g[k];
      return;
    case TransformKind::Gaussian:
    case TransformKind::LogGaussian: {
      const bool logged = tr.kind == TransformKind::LogGaussian && y > tr.nu[0];
      const double py = logged ? tr.nu[0] + std::log(y / tr.nu[0]) : y;
      const double sigma = tr.sigma[0];
      const double inv2 = 1.0 / (sigma * sigma);
      const bool want_nu = logged && tr.nu.trainable;
      double g_sigma = 0.0, g_py = 0.0;
      for (std::size_t k = 0; k < q; ++k) {
        const double gv = g[k] * value[k];
        if (gv == 0.0) continue;
        const double dx = x - tr.centers[2 * k], dy = py - tr.centers[2 * k + 1];
        if (tr.centers.trainable) {
          grad.centers[2 * k] += gv * dx * inv2;
          grad.centers[2 * k + 1] += gv * dy * inv2;
        }
        g_sigma += gv * (dx * dx + dy * dy);
        g_py -= gv * dy;
      }
      if (tr.sigma.trainable) grad.sigma[0] += g_sigma * inv2 / sigma;
      if (want_nu) grad.nu[0] += g_py * inv2 * (1.0 - 1.0 / tr.nu[0]);
      return;
    }
  }
}

}  // namespace

std::vector<double> forward(const Channel& ch, const PersistenceDiagram& dg, const DiagramNormalizer& norm,
                            ChannelCache* cache) {
  ChannelCache local;
  ChannelCache& c = cache ? *cache : local;
  const std::size_t q = ch.transform.dim(), D = ch.feature_dim(), A = ch.aggregated_dim();
  c.points.clear();
  c.points.reserve(dg.size());
  for (const auto& p : dg.points) {
    const auto [x, y] = norm.apply(p);
    c.points.push_back({x, y});
  }
  std::sort(c.points.begin(), c.points.end());
  const std::size_t n = c.points.size();
  c.aggregated.assign(A, 0.0);
  c.selected.assign(ch.op.kind == OpKind::Sum ? 0 : A, -1);
  if (n == 0) {
    c.phi_in.clear();
    c.phi.clear();
    c.weights.clear();
    c.argmax_in.clear();
    return std::vector<double>(ch.output_dim(), 0.0);
  }

  c.phi_in.resize(n * q);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < n; ++i)
    eval_transform(ch.transform, c.points[i][0], c.points[i][1], &c.phi_in[i * q], scratch);

  if (ch.has_equivariant) {
    const auto& eq = ch.equivariant;
    if (eq.in != q) throw std::logic_error("forward: equivariant block width mismatch");
    c.argmax_in.assign(q, 0);
    std::vector<double> mx(q);
    for (std::size_t j = 0; j < q; ++j) {
      mx[j] = c.phi_in[j];
      for (std::size_t i = 1; i < n; ++i)
        if (c.phi_in[i * q + j] > mx[j]) {
          mx[j] = c.phi_in[i * q + j];
          c.argmax_in[j] = i;
        }
    }
    std::vector<double> shared(D);
    for (std::size_t o = 0; o < D; ++o) {
      double s = eq.c[o];
      for (std::size_t j = 0; j < q; ++j) s += eq.b[o * q + j] * mx[j];
      shared[o] = s;
    }
    c.phi.resize(n * D);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t o = 0; o < D; ++o) {
        double s = shared[o];
        const double* row = &eq.a.data[o * q];
        const double* x = &c.phi_in[i * q];
        for (std::size_t j = 0; j < q; ++j) s += row[j] * x[j];
        c.phi[i * D + o] = s;
      }
  } else {
    c.phi = c.phi_in;
  }

  c.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.weights[i] = ch.weight(c.points[i][0], c.points[i][1]);

  auto v = [&](std::size_t i, std::size_t j) { return c.weights[i] * c.phi[i * D + j]; };
  switch (ch.op.kind) {
    case OpKind::Sum:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < D; ++j) c.aggregated[j] += v(i, j);
      break;
    case OpKind::Max:
    case OpKind::Min: {
      const double sign = ch.op.kind == OpKind::Max ? 1.0 : -1.0;
      for (std::size_t j = 0; j < D; ++j) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i)
          if (sign * v(i, j) > sign * v(best, j)) best = i;
        c.aggregated[j] = v(best, j);
        c.selected[j] = static_cast<long>(best);
      }
      break;
    }
    case OpKind::TopK: {
      const std::size_t k = ch.op.k;
      std::vector<std::size_t> order(n);
      for (std::size_t j = 0; j < D; ++j) {
        std::iota(order.begin(), order.end(), 0);
        const std::size_t take = std::min(k, n);
        std::partial_sort(order.begin(), order.begin() + take, order.end(), [&](std::size_t a, std::size_t b) {
          const double va = v(a, j), vb = v(b, j);
          return va != vb ? va > vb : a < b;
        });
        for (std::size_t r = 0; r < take; ++r) {
          c.aggregated[j * k + r] = v(order[r], j);
          c.selected[j * k + r] = static_cast<long>(order[r]);
        }
      }
      break;
    }
  }

  if (!ch.has_conv) return c.aggregated;

  const auto& cv = ch.conv;
  if (cv.side * cv.side != A) throw std::logic_error("forward: convolution expects a square image");
  const std::size_t os = cv.out_side(), kk = cv.kernel;
  std::vector<double> out(cv.output_dim());
  for (std::size_t f = 0; f < cv.filters; ++f) {
    const double* w = &cv.weights.data[f * kk * kk];
    for (std::size_t r = 0; r < os; ++r)
      for (std::size_t col = 0; col < os; ++col) {
        double s = cv.bias[f];
        for (std::size_t u = 0; u < kk; ++u) {
          const double* img = &c.aggregated[(r + u) * cv.side + col];
          for (std::size_t t = 0; t < kk; ++t) s += w[u * kk + t] * img[t];
        }
        out[(f * os + r) * os + col] = s;
      }
  }
  return out;
}

void backward(const Channel& ch, const ChannelCache& c, std::span<const double> upstream, Channel& grads) {
  if (upstream.size() != ch.output_dim())
    throw std::invalid_argument("backward: upstream length " + std::to_string(upstream.size()) +
                                " does not match channel output " + std::to_string(ch.output_dim()));
  const std::size_t n = c.points.size();
  if (n == 0) return;
  const std::size_t q = ch.transform.dim(), D = ch.feature_dim(), A = ch.aggregated_dim();

  std::vector<double> g_agg;
  if (ch.has_conv) {
    const auto& cv = ch.conv;
    const std::size_t os = cv.out_side(), kk = cv.kernel;
    g_agg.assign(A, 0.0);
    for (std::size_t f = 0; f < cv.filters; ++f) {
      const double* w = &cv.weights.data[f * kk * kk];
      double* gw = &grads.conv.weights.data[f * kk * kk];
      double gb = 0.0;
      for (std::size_t r = 0; r < os; ++r)
        for (std::size_t col = 0; col < os; ++col) {
          const double g = upstream[(f * os + r) * os + col];
          if (g == 0.0) continue;
          gb += g;
          for (std::size_t u = 0; u < kk; ++u) {
            const std::size_t base = (r + u) * cv.side + col;
            for (std::size_t t = 0; t < kk; ++t) {
              if (cv.weights.trainable) gw[u * kk + t] += g * c.aggregated[base + t];
              g_agg[base + t] += g * w[u * kk + t];
            }
          }
        }
      if (cv.bias.trainable) grads.conv.bias[f] += gb;
    }
  } else {
    g_agg.assign(upstream.begin(), upstream.end());
  }

  // Gradient w.r.t. v(i, j) = w_i phi_ij.
  std::vector<double> g_v(n * D, 0.0);
  switch (ch.op.kind) {
    case OpKind::Sum:
      for (std::size_t i = 0; i < n; ++i) std::copy(g_agg.begin(), g_agg.begin() + D, g_v.begin() + i * D);
      break;
    case OpKind::Max:
    case OpKind::Min:
      for (std::size_t j = 0; j < D; ++j) g_v[c.selected[j] * D + j] += g_agg[j];
      break;
    case OpKind::TopK:
      for (std::size_t j = 0; j < D; ++j)
        for (std::size_t r = 0; r < ch.op.k; ++r) {
          const long src = c.selected[j * ch.op.k + r];
          if (src >= 0) g_v[src * D + j] += g_agg[j * ch.op.k + r];
        }
      break;
  }

  std::vector<double> g_phi(n * D);
  for (std::size_t i = 0; i < n; ++i) {
    double gw = 0.0;
    for (std::size_t j = 0; j < D; ++j) {
      gw += g_v[i * D + j] * c.phi[i * D + j];
      g_phi[i * D + j] = c.weights[i] * g_v[i * D + j];
    }
    if (ch.weight.kind == WeightKind::Grid && ch.weight.grid.trainable)
      grads.weight.grid[ch.weight.cell(c.points[i][0], c.points[i][1])] += gw;
  }

  std::vector<double> g_in;
  if (ch.has_equivariant) {
    const auto& eq = ch.equivariant;
    auto& ge = grads.equivariant;
    g_in.assign(n * q, 0.0);
    std::vector<double> g_sum(D, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t o = 0; o < D; ++o) {
        const double g = g_phi[i * D + o];
        if (g == 0.0) continue;
        g_sum[o] += g;
        const double* x = &c.phi_in[i * q];
        if (eq.a.trainable)
          for (std::size_t j = 0; j < q; ++j) ge.a[o * q + j] += g * x[j];
        for (std::size_t j = 0; j < q; ++j) g_in[i * q + j] += g * eq.a[o * q + j];
      }
    for (std::size_t o = 0; o < D; ++o) {
      if (eq.c.trainable) ge.c[o] += g_sum[o];
      for (std::size_t j = 0; j < q; ++j) {
        const std::size_t src = c.argmax_in[j];
        if (eq.b.trainable) ge.b[o * q + j] += g_sum[o] * c.phi_in[src * q + j];
        g_in[src * q + j] += g_sum[o] * eq.b[o * q + j];
      }
    }
  } else {
    g_in = std::move(g_phi);
  }

  for (std::size_t i = 0; i < n; ++i)
    backprop_transform(ch.transform, c.points[i][0], c.points[i][1], &c.phi_in[i * q], &g_in[i * q],
                       grads.transform);
}

Channel backward(const Channel& ch, const PersistenceDiagram& dg, const DiagramNormalizer& norm,
                 std::span<const double> upstream) {
  ChannelCache cache;
  forward(ch, dg, norm, &cache);
  Channel grads = ch.zeros_like();
  backward(ch, cache, upstream, grads);
  return grads;
}

// ----------------------------------------------------------------- grammar

namespace {

std::string strip(const std::string& s) {
  std::string out;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) out += ch;
  return out;
}

std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::size_t parse_count(const std::string& s, const std::string& context) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || s[0] == '-')
    throw std::invalid_argument("channel spec: expected a count, got '" + s + "' in '" + context + "'");
  return v;
}

}  // namespace

Aggregation parse_op(const std::string& raw) {
  const std::string s = strip(raw);
  if (s == "sum") return {OpKind::Sum, 1};
  if (s == "max") return {OpKind::Max, 1};
  if (s == "min") return {OpKind::Min, 1};
  if (s.rfind("top-", 0) == 0) {
    const std::size_t k = parse_count(s.substr(4), s);
    if (k == 0) throw std::invalid_argument("channel spec: top-k needs k >= 1");
    return {OpKind::TopK, k};
  }
  throw std::invalid_argument("channel spec: unknown op '" + raw + "'");
}

std::string op_name(const Aggregation& op) {
  switch (op.kind) {
    case OpKind::Sum: return "sum";
    case OpKind::Max: return "max";
    case OpKind::Min: return "min";
    case OpKind::TopK: return "top-" + std::to_string(op.k);
  }
  return "?";
}

ChannelSpec parse_channel_spec(const std::string& raw) {
  const std::string s = strip(raw);
  if (s.size() < 4 || s[2] != '(' || s.back() != ')')
    throw std::invalid_argument("channel spec: cannot parse '" + raw + "'");
  const std::string head = s.substr(0, 2);
  const auto args = split_top_level(s.substr(3, s.size() - 4));
  ChannelSpec spec;
  if (head == "Im") {
    if (args.size() != 4) throw std::invalid_argument("channel spec: Im takes 4 arguments in '" + raw + "'");
    spec.family = ChannelSpec::Family::Image;
    spec.resolution = parse_count(args[0], raw);
    const std::string& conv = args[1];
    if (conv.size() < 2 || conv.front() != '(' || conv.back() != ')')
      throw std::invalid_argument("channel spec: Im expects (a,b) or () in '" + raw + "'");
    const std::string inner = conv.substr(1, conv.size() - 2);
    if (!inner.empty()) {
      const auto ab = split_top_level(inner);
      if (ab.size() != 2) throw std::invalid_argument("channel spec: Im expects (a,b) in '" + raw + "'");
      spec.filters = parse_count(ab[0], raw);
      spec.kernel = parse_count(ab[1], raw);
      if (spec.filters == 0 || spec.kernel == 0 || spec.kernel > spec.resolution)
        throw std::invalid_argument("channel spec: convolution does not fit the image in '" + raw + "'");
    }
    spec.grid = parse_count(args[2], raw);
    spec.op = parse_op(args[3]);
  } else if (head == "Pm") {
    if (args.size() != 4) throw std::invalid_argument("channel spec: Pm takes 4 arguments in '" + raw + "'");
    spec.family = ChannelSpec::Family::Projection;
    spec.resolution = parse_count(args[0], raw);
    spec.width = parse_count(args[1], raw);
    spec.grid = parse_count(args[2], raw);
    spec.op = parse_op(args[3]);
    if (spec.width == 0) throw std::invalid_argument("channel spec: Pm needs d2 >= 1 in '" + raw + "'");
  } else if (head == "Tm") {
    if (args.size() != 3) throw std::invalid_argument("channel spec: Tm takes 3 arguments in '" + raw + "'");
    spec.family = ChannelSpec::Family::Triangle;
    spec.resolution = parse_count(args[0], raw);
    spec.grid = parse_count(args[1], raw);
    spec.op = parse_op(args[2]);
  } else {
    throw std::invalid_argument("channel spec: unknown family '" + head + "' in '" + raw + "'");
  }
  if (spec.resolution == 0) throw std::invalid_argument("channel spec: size must be >= 1 in '" + raw + "'");
  return spec;
}

std::string ChannelSpec::to_string() const {
  const std::string g = std::to_string(grid), o = op_name(op);
  switch (family) {
    case Family::Image: {
      const std::string conv = filters ? "(" + std::to_string(filters) + "," + std::to_string(kernel) + ")" : "()";
      return "Im(" + std::to_string(resolution) + "," + conv + "," + g + "," + o + ")";
    }
    case Family::Projection:
      return "Pm(" + std::to_string(resolution) + "," + std::to_string(width) + "," + g + "," + o + ")";
    case Family::Triangle: return "Tm(" + std::to_string(resolution) + "," + g + "," + o + ")";
  }
  return "?";
}

Channel build_channel(const ChannelSpec& spec, Rng& rng) {
  Channel ch;
  auto uniform_fill = [&](Tensor& t, double bound) {
    for (double& x : t.data) x = rng.uniform(-bound, bound);
  };
  const std::size_t r = spec.resolution;
  switch (spec.family) {
    case ChannelSpec::Family::Image: {
      auto& tr = ch.transform;
      tr.kind = TransformKind::Gaussian;
      tr.centers = Tensor({r * r, 2});
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
          tr.centers[2 * (i * r + j)] = r > 1 ? static_cast<double>(i) / (r - 1) : 0.5;
          tr.centers[2 * (i * r + j) + 1] = r > 1 ? static_cast<double>(j) / (r - 1) : 0.5;
        }
      tr.grid_side = r;
      tr.sigma = Tensor({1}, 0.1, true);
      if (spec.filters > 0) {
        ch.has_conv = true;
        auto& cv = ch.conv;
        cv.side = r;
        cv.filters = spec.filters;
        cv.kernel = spec.kernel;
        cv.weights = Tensor({spec.filters, spec.kernel, spec.kernel}, 0.0, true);
        uniform_fill(cv.weights, 1.0 / static_cast<double>(spec.kernel));
        cv.bias = Tensor({spec.filters}, 0.0, true);
      }
      break;
    }
    case ChannelSpec::Family::Projection: {
      auto& tr = ch.transform;
      tr.kind = TransformKind::Line;
      tr.directions = Tensor({r, 2}, 0.0, true);
      uniform_fill(tr.directions, 1.0 / std::sqrt(2.0));
      tr.biases = Tensor({r}, 0.0, true);
      uniform_fill(tr.biases, 1.0 / std::sqrt(2.0));
      ch.has_equivariant = true;
      auto& eq = ch.equivariant;
      eq.in = r;
      eq.out = spec.width;
      const double bound = 1.0 / std::sqrt(static_cast<double>(r));
      eq.a = Tensor({spec.width, r}, 0.0, true);
      eq.b = Tensor({spec.width, r}, 0.0, true);
      eq.c = Tensor({spec.width}, 0.0, true);
      uniform_fill(eq.a, bound);
      uniform_fill(eq.b, bound);
      uniform_fill(eq.c, bound);
      break;
    }
    case ChannelSpec::Family::Triangle: {
      auto& tr = ch.transform;
      tr.kind = TransformKind::Triangle;
      tr.samples = Tensor({r}, 0.0, true);
      for (std::size_t k = 0; k < r; ++k) tr.samples[k] = r > 1 ? static_cast<double>(k) / (r - 1) : 0.5;
      break;
    }
  }
  if (spec.grid > 0) {
    ch.weight.kind = WeightKind::Grid;
    ch.weight.side = spec.grid;
    ch.weight.grid = Tensor({spec.grid, spec.grid}, 1.0, true);
  }
  ch.op = spec.op;
  ch.project();
  return ch;
}

}  // namespace perslay
