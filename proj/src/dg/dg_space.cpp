// SPDX-License-Identifier: Apache-2.0
#include "hrom/dg_space.hpp"

#include <cmath>
#include <string>

#include "hrom/error.hpp"

namespace hrom {

namespace {

std::vector<Eigen::Vector2d> lagrange_nodes(int k) {
  std::vector<Eigen::Vector2d> nodes = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  const double h = 1.0 / k;
  // Edge-interior nodes, walking 0->1, 1->2, 2->0.
  for (int i = 1; i < k; ++i) nodes.emplace_back(i * h, 0.0);
  for (int i = 1; i < k; ++i) nodes.emplace_back(1.0 - i * h, i * h);
  for (int i = 1; i < k; ++i) nodes.emplace_back(0.0, 1.0 - i * h);
  for (int j = 1; j < k; ++j)
    for (int i = 1; i + j < k; ++i) nodes.emplace_back(i * h, j * h);
  return nodes;
}

}  // namespace

LagrangeBasis::LagrangeBasis(int degree) : degree_(degree) {
  if (degree < 1 || degree > 3) throw ConfigError("basis: degree must be in 1..3");
  nodes_ = lagrange_nodes(degree);
  for (int total = 0; total <= degree; ++total)
    for (int b = 0; b <= total; ++b) powers_.push_back({total - b, b});

  const int n = size();
  Eigen::MatrixXd vander(n, n);
  for (int i = 0; i < n; ++i) vander.row(i) = monomials(nodes_[i]).transpose();
  coeffs_ = vander.fullPivLu().inverse();
}

Eigen::VectorXd LagrangeBasis::monomials(const Eigen::Vector2d& ref) const {
  Eigen::VectorXd m(powers_.size());
  for (std::size_t i = 0; i < powers_.size(); ++i)
    m[i] = std::pow(ref[0], powers_[i][0]) * std::pow(ref[1], powers_[i][1]);
  return m;
}

Eigen::MatrixX2d LagrangeBasis::monomial_gradients(const Eigen::Vector2d& ref) const {
  Eigen::MatrixX2d g(powers_.size(), 2);
  for (std::size_t i = 0; i < powers_.size(); ++i) {
    const int a = powers_[i][0];
    const int b = powers_[i][1];
    g(i, 0) = a == 0 ? 0.0 : a * std::pow(ref[0], a - 1) * std::pow(ref[1], b);
    g(i, 1) = b == 0 ? 0.0 : b * std::pow(ref[0], a) * std::pow(ref[1], b - 1);
  }
  return g;
}

Eigen::VectorXd LagrangeBasis::values(const Eigen::Vector2d& ref) const {
  return coeffs_.transpose() * monomials(ref);
}

Eigen::MatrixX2d LagrangeBasis::gradients(const Eigen::Vector2d& ref) const {
  return coeffs_.transpose() * monomial_gradients(ref);
}

DGSpace::DGSpace(Mesh mesh, int degree)
    : mesh_(std::move(mesh)),
      basis_(degree),
      element_rule_(triangle_rule(2 * degree + 1)),
      edge_rule_(gauss_line_rule(degree + 1)) {
  maps_.reserve(mesh_.triangles.size());
  for (int el = 0; el < mesh_.num_elements(); ++el) {
    const auto& t = mesh_.triangles[el];
    ElementMap map;
    map.origin = mesh_.vertices[t[0]];
    map.jacobian.col(0) = mesh_.vertices[t[1]] - map.origin;
    map.jacobian.col(1) = mesh_.vertices[t[2]] - map.origin;
    map.det = map.jacobian.determinant();
    if (!(map.det > 0.0))
      throw StructuralError("dg space: element " + std::to_string(el) + " is degenerate or clockwise");
    map.inv_jacobian = map.jacobian.inverse();
    maps_.push_back(map);
  }

  const int nq = static_cast<int>(element_rule_.points.size());
  ref_values_.resize(nq, basis_.size());
  ref_grads_.reserve(nq);
  for (int q = 0; q < nq; ++q) {
    ref_values_.row(q) = basis_.values(element_rule_.points[q]).transpose();
    ref_grads_.push_back(basis_.gradients(element_rule_.points[q]));
  }
}

Point DGSpace::dof_point(int global_dof) const {
  const int el = global_dof / local_dofs();
  const int j = global_dof % local_dofs();
  return maps_[el].to_physical(basis_.nodes()[j]);
}

int DGSpace::locate(const Point& p) const {
  const double tol = 1e-12;
  for (int el = 0; el < num_elements(); ++el) {
    const Eigen::Vector2d r = maps_[el].to_reference(p);
    if (r[0] >= -tol && r[1] >= -tol && r[0] + r[1] <= 1.0 + tol) return el;
  }
  return -1;
}

double PointProbe::apply(std::span<const double> coeffs) const {
  double s = 0.0;
  for (Eigen::Index j = 0; j < weights.size(); ++j) s += weights[j] * coeffs[first_dof + j];
  return s;
}

double PointProbe::apply(const Eigen::Ref<const Eigen::VectorXd>& coeffs) const {
  return weights.dot(coeffs.segment(first_dof, weights.size()));
}

Eigen::RowVectorXd PointProbe::apply_columns(const Eigen::Ref<const Eigen::MatrixXd>& states) const {
  return weights.transpose() * states.middleRows(first_dof, weights.size());
}

PointProbe make_probe(const DGSpace& space, const Point& p) {
  if (!space.mesh().domain.contains(p))
    throw DomainError("evaluation point (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) +
                      ") lies outside the domain");
  const int el = space.locate(p);
  if (el < 0) throw DomainError("evaluation point not covered by the mesh");
  PointProbe probe;
  probe.element = el;
  probe.first_dof = space.dof(el, 0);
  probe.weights = space.basis().values(space.element_map(el).to_reference(p));
  return probe;
}

double evaluate_solution(const DGSpace& space, const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                         const Point& p) {
  if (coeffs.size() != space.total_dofs())
    throw StructuralError("evaluate_solution: coefficient vector has wrong length");
  return make_probe(space, p).apply(coeffs);
}

}  // namespace hrom
