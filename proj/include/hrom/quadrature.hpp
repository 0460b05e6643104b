// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace hrom {

/// Rule on the reference triangle {(s,t): s,t >= 0, s+t <= 1}; weights sum to 1/2.
struct TriangleRule {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Rule on [0, 1]; weights sum to 1.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// Smallest built-in rule exact for polynomials of total degree `degree`.
/// Degrees up to 5 use symmetric rules; higher degrees fall back to a
/// collapsed Gauss product rule.
TriangleRule triangle_rule(int degree);

/// n-point Gauss-Legendre rule mapped to [0, 1].
LineRule gauss_line_rule(int n);

}  // namespace hrom
