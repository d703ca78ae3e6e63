#include "perslay/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace perslay {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double x : data) s += x * x;
  return std::sqrt(s);
}

Matrix normalized_laplacian(const Graph& g) {
  const std::size_t n = g.n_vertices();
  std::vector<double> degree(n, 0.0);
  const auto& edges = g.edges();
  const auto& w = g.weights();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    degree[edges[i].u] += w[i];
    degree[edges[i].v] += w[i];
  }
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    if (degree[v] > 0.0) inv_sqrt[v] = 1.0 / std::sqrt(degree[v]);

  Matrix lap = Matrix::identity(n);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto a = static_cast<std::size_t>(edges[i].u);
    const auto b = static_cast<std::size_t>(edges[i].v);
    const double off = -w[i] * inv_sqrt[a] * inv_sqrt[b];
    lap(a, b) = off;
    lap(b, a) = off;
  }
  return lap;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

SpectralDecomposition eigendecompose(const Matrix& m, const JacobiOptions& options) {
  if (m.rows != m.cols) throw std::invalid_argument("eigendecompose: matrix is not square");
  const std::size_t n = m.rows;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m(i, j) - m(j, i)) > options.symmetry_tolerance)
        throw std::invalid_argument("eigendecompose: matrix is not symmetric at (" +
                                    std::to_string(i) + ", " + std::to_string(j) + ")");

  Matrix a = m;
  // Symmetrize exactly so rotations keep the working copy symmetric.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (m(i, j) + m(j, i));
  Matrix v = Matrix::identity(n);

  const double threshold = options.off_diagonal_tolerance * std::max(1.0, m.frobenius_norm());
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= threshold) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

VertexFunction hks(const SpectralDecomposition& spec, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("hks: diffusion time must be >= 0");
  const std::size_t n = spec.eigenvalues.size();
  std::vector<double> decay(n);
  for (std::size_t k = 0; k < n; ++k) decay[k] = std::exp(-t * spec.eigenvalues[k]);
  VertexFunction out(std::vector<double>(n, 0.0));
  for (std::size_t v = 0; v < n; ++v) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double psi = spec.eigenvectors(v, k);
      s += decay[k] * psi * psi;
    }
    out[v] = s;
  }
  return out;
}

}  // namespace perslay
