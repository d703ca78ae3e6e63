#pragma once

#include <cstddef>
#include <vector>

#include "perslay/graph.hpp"

namespace perslay {

/// Dense row-major real matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  static Matrix identity(std::size_t n);

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double frobenius_norm() const;
};

/// Eigenpairs of a symmetric matrix. Column k of `eigenvectors` pairs with
/// eigenvalues[k]; eigenvalues are ascending.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
};

/// I - D^{-1/2} A D^{-1/2}. Weighted graphs use weights in A and weighted
/// degrees in D. Isolated vertices get an identity row.
Matrix normalized_laplacian(const Graph& g);

struct JacobiOptions {
  double off_diagonal_tolerance = 1e-10;
  int max_sweeps = 100;
  double symmetry_tolerance = 1e-9;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Throws std::invalid_argument for non-square or non-symmetric input.
SpectralDecomposition eigendecompose(const Matrix& m, const JacobiOptions& options = {});

/// Heat kernel signature v -> sum_k exp(-t lambda_k) psi_k(v)^2. Throws for t < 0.
VertexFunction hks(const SpectralDecomposition& spec, double t);

}  // namespace perslay
