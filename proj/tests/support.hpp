// SPDX-License-Identifier: Apache-2.0
// Shared helpers for the unit and acceptance tests.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "hrom/assembly.hpp"

namespace hrom::testing {

/// Bitwise comparison of two compressed sparse matrices.
inline bool identical(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) return false;
  SparseMatrix ca = a, cb = b;
  ca.makeCompressed();
  cb.makeCompressed();
  for (Eigen::Index i = 0; i < ca.nonZeros(); ++i)
    if (ca.valuePtr()[i] != cb.valuePtr()[i] || ca.innerIndexPtr()[i] != cb.innerIndexPtr()[i]) return false;
  for (Eigen::Index i = 0; i <= ca.outerSize(); ++i)
    if (ca.outerIndexPtr()[i] != cb.outerIndexPtr()[i]) return false;
  return true;
}

inline bool identical(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a.data()[i] != b.data()[i]) return false;
  return true;
}

inline Eigen::VectorXd solve_sparse(const SparseMatrix& a, const Eigen::VectorXd& rhs) {
  Eigen::SparseLU<SparseMatrix> lu(a);
  return lu.solve(rhs);
}

/// Least-squares slope of log(err) against log(1/h) with h = 1/n.
inline double fitted_order(const std::vector<int>& n, const std::vector<double>& err) {
  const std::size_t m = n.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(static_cast<double>(n[i]));
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

}  // namespace hrom::testing
