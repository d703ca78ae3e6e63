#pragma once

#include <array>
#include <functional>
#include <vector>

#include "perslay/diagram.hpp"

namespace perslay {

/// Reference vectorizations evaluated straight from their textbook
/// definitions. They share no code with the layer and exist to check it.
/// Points with death < birth are reflected across the diagonal first.
/// Tents use the point coordinates directly: max(0, y - |t - x|).

using PointWeight = std::function<double(double birth, double death)>;

/// k-th largest tent value at each sample (k >= 1); 0 when fewer than k points.
std::vector<double> landscape_oracle(const PersistenceDiagram& dg, std::size_t k, const std::vector<double>& samples);

/// Unnormalized weighted sum of tents at each sample.
std::vector<double> silhouette_oracle(const PersistenceDiagram& dg, const PointWeight& w,
                                      const std::vector<double>& samples);

/// Weighted sum of isotropic Gaussians exp(-|p - c|^2 / (2 sigma^2)), one
/// entry per center.
std::vector<double> image_oracle(const PersistenceDiagram& dg, const PointWeight& w, double sigma,
                                 const std::vector<std::array<double, 2>>& centers);

}  // namespace perslay
