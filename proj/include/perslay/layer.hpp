#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "perslay/diagram.hpp"
#include "perslay/rng.hpp"

namespace perslay {

/// Flat parameter tensor with a shape and a trainable flag.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  bool trainable = false;

  Tensor() = default;
  Tensor(std::vector<std::size_t> s, double fill = 0.0, bool train = false);

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
};

enum class TransformKind { Triangle, Gaussian, Line, LogGaussian };

/// Literal evaluates max(0, y - |t - x|) on (x, y) = (birth, death).
/// Classical first maps to ((b + d) / 2, (d - b) / 2), the landscape tents.
enum class TriangleConvention { Literal, Classical };

struct PointTransform {
  TransformKind kind = TransformKind::Gaussian;
  TriangleConvention convention = TriangleConvention::Literal;
  Tensor samples;     // Triangle: q
  Tensor centers;     // Gaussian/LogGaussian: q x 2
  Tensor sigma;       // Gaussian/LogGaussian: 1
  Tensor nu;          // LogGaussian: 1
  Tensor directions;  // Line: q x 2, unit rows
  Tensor biases;      // Line: q
  /// Non-zero when centers form a side x side grid (row-major, x varies
  /// slowest); enables separable evaluation while centers are frozen.
  std::size_t grid_side = 0;

  std::size_t dim() const;
};

enum class WeightKind { Constant, Grid, DiagonalPower };
enum class ProfileKind { Constant, Tent };

/// w(p). Grid: N x N cells over the unit square, cell (i, j) holds points
/// with floor(x N) = i and floor(y N) = j (clamped). DiagonalPower:
/// (|y - x| / 2)^s times a bounded profile.
struct WeightFunction {
  WeightKind kind = WeightKind::Constant;
  Tensor grid;
  std::size_t side = 0;
  double power = 1.0;
  ProfileKind profile = ProfileKind::Constant;
  double profile_value = 1.0;                 // Constant profile
  std::array<double, 2> tent_center{0, 0};    // Tent: height * max(0, 1 - |p - c|_inf / scale)
  double tent_scale = 1.0;
  double tent_height = 1.0;

  double operator()(double x, double y) const;
  double profile_at(double x, double y) const;
  /// Flat grid index of the cell holding (x, y).
  std::size_t cell(double x, double y) const;
};

enum class OpKind { Sum, Max, Min, TopK };

struct Aggregation {
  OpKind kind = OpKind::Sum;
  std::size_t k = 1;  // TopK only
};

/// Per-point map y_i = A x_i + B max_j x_j + c.
struct EquivariantBlock {
  Tensor a;  // out x in
  Tensor b;  // out x in
  Tensor c;  // out
  std::size_t in = 0, out = 0;
};

/// `filters` kernels of size kernel x kernel with bias, valid padding, on a
/// side x side image.
struct ConvBlock {
  Tensor weights;  // filters x kernel x kernel
  Tensor bias;     // filters
  std::size_t side = 0, filters = 0, kernel = 0;

  std::size_t out_side() const { return side - kernel + 1; }
  std::size_t output_dim() const { return filters * out_side() * out_side(); }
};

/// Per-kind, per-axis min-max scaling into [0, 1]^2 with clamping.
class DiagramNormalizer {
 public:
  static DiagramNormalizer identity();
  /// Kinds absent from the fit set pass through unscaled (still clamped).
  /// With upper_quantile < 1 the top of each axis range is that quantile of
  /// the fitted values (linear interpolation), so a few outliers clamp to 1
  /// instead of squeezing every other point towards 0.
  static DiagramNormalizer fit(std::span<const PersistenceDiagram* const> diagrams, double upper_quantile = 1.0);
  static DiagramNormalizer fit(const std::vector<PersistenceDiagram>& diagrams, double upper_quantile = 1.0);

  std::pair<double, double> apply(const DiagramPoint& p) const;
  bool is_identity() const { return identity_; }

  struct Range {
    bool seen = false;
    double lo[2] = {0, 0};
    double hi[2] = {0, 0};
  };
  const Range& range(PointKind k) const { return ranges_[static_cast<int>(k)]; }

 private:
  bool identity_ = false;
  std::array<Range, 6> ranges_{};
};

/// One PersLay channel: op({w(p) phi(p)}), with an optional equivariant block
/// inside phi and an optional convolution on the aggregated image.
struct Channel {
  PointTransform transform;
  WeightFunction weight;
  Aggregation op;
  bool has_equivariant = false;
  EquivariantBlock equivariant;
  bool has_conv = false;
  ConvBlock conv;

  /// Width of phi(p).
  std::size_t feature_dim() const;
  /// Width before the convolution.
  std::size_t aggregated_dim() const;
  std::size_t output_dim() const;

  /// Every tensor in a fixed order, with names. Empty tensors are skipped.
  std::vector<std::pair<std::string, Tensor*>> tensors();
  std::vector<std::pair<std::string, const Tensor*>> tensors() const;

  /// Same structure with every tensor zeroed; used as a gradient buffer.
  Channel zeros_like() const;

  /// Re-normalizes line directions and keeps sigma/nu positive.
  void project();
};

/// Intermediate values kept by forward for backward.
struct ChannelCache {
  std::vector<std::array<double, 2>> points;  // normalized, sorted
  std::vector<double> phi_in;                 // n x q, transform output
  std::vector<double> phi;                    // n x D, after equivariant block
  std::vector<std::size_t> argmax_in;         // q, equivariant max source
  std::vector<double> weights;                // n
  std::vector<double> aggregated;             // aggregated_dim
  std::vector<long> selected;                 // Max/Min/TopK: source point per output slot (-1 = pad)
};

std::vector<double> forward(const Channel& ch, const PersistenceDiagram& dg, const DiagramNormalizer& norm,
                            ChannelCache* cache = nullptr);

/// Adds d(upstream . output)/d(theta) into `grads` for every trainable tensor.
/// Throws std::invalid_argument when upstream has the wrong length.
void backward(const Channel& ch, const ChannelCache& cache, std::span<const double> upstream, Channel& grads);

/// Convenience overload that reruns forward.
Channel backward(const Channel& ch, const PersistenceDiagram& dg, const DiagramNormalizer& norm,
                 std::span<const double> upstream);

/// Channel configuration in the `Im(p,(a,b),q,op)` / `Pm(d1,d2,q,op)` grammar,
/// plus `Tm(q,N,op)` for triangle channels. A grid size of 0 means constant
/// weights; `()` in Im disables the convolution. op is sum, max, min or top-k.
struct ChannelSpec {
  enum class Family { Image, Projection, Triangle } family = Family::Image;
  std::size_t resolution = 0;  // Im: p, Pm: d1, Tm: q
  std::size_t width = 0;       // Pm: d2
  std::size_t filters = 0;     // Im: a (0 = no conv)
  std::size_t kernel = 0;      // Im: b
  std::size_t grid = 0;        // q (0 = constant weight)
  Aggregation op;

  std::string to_string() const;
};

/// Throws std::invalid_argument with the offending text on malformed input.
ChannelSpec parse_channel_spec(const std::string& text);
Aggregation parse_op(const std::string& text);
std::string op_name(const Aggregation& op);

/// Builds a channel with initial parameters drawn from rng.
Channel build_channel(const ChannelSpec& spec, Rng& rng);

}  // namespace perslay
