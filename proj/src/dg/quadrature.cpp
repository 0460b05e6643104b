// SPDX-License-Identifier: Apache-2.0
#include "hrom/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "hrom/error.hpp"

namespace hrom {

namespace {

void add_orbit3(TriangleRule& rule, double a, double b, double w) {
  // Barycentric orbit (a, b, b) and its rotations.
  rule.points.emplace_back(b, b);
  rule.points.emplace_back(a, b);
  rule.points.emplace_back(b, a);
  for (int i = 0; i < 3; ++i) rule.weights.push_back(0.5 * w);
}

TriangleRule collapsed_gauss(int degree) {
  // Duffy map (u, w) -> (u (1 - w), w) with Jacobian (1 - w).
  const int n = degree / 2 + 2;
  const LineRule g = gauss_line_rule(n);
  TriangleRule rule;
  rule.degree = degree;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = g.points[i];
      const double w = g.points[j];
      rule.points.emplace_back(u * (1.0 - w), w);
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - w));
    }
  }
  return rule;
}

}  // namespace

TriangleRule triangle_rule(int degree) {
  if (degree < 0) throw DomainError("triangle_rule: negative degree");
  TriangleRule rule;
  if (degree <= 1) {
    rule.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    rule.weights.push_back(0.5);
    rule.degree = 1;
  } else if (degree <= 4) {
    // 6-point rule, degree 4.
    add_orbit3(rule, 0.816847572980459, 0.091576213509771, 0.109951743655322);
    add_orbit3(rule, 0.108103018168070, 0.445948490915965, 0.223381589678011);
    rule.degree = 4;
  } else if (degree == 5) {
    // 7-point rule, degree 5.
    rule.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    rule.weights.push_back(0.5 * 0.225);
    add_orbit3(rule, 0.059715871789770, 0.470142064105115, 0.132394152788506);
    add_orbit3(rule, 0.797426985353087, 0.101286507323456, 0.125939180544827);
    rule.degree = 5;
  } else {
    rule = collapsed_gauss(degree);
  }
  return rule;
}

LineRule gauss_line_rule(int n) {
  if (n < 1) throw DomainError("gauss_line_rule: need at least one point");
  LineRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  // Newton on the Legendre polynomial from the Chebyshev initial guess.
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    rule.points[n - 1 - i] = 0.5 * (1.0 + z);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

}  // namespace hrom
