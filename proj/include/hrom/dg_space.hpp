// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hrom/mesh.hpp"
#include "hrom/quadrature.hpp"

namespace hrom {

/// Nodal Lagrange basis of degree k on the reference triangle.
///
/// Nodes are equispaced; the three vertices come first in the order
/// (0,0), (1,0), (0,1), so for k = 1 a coefficient equals the vertex value.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Eigen::Vector2d>& nodes() const { return nodes_; }

  Eigen::VectorXd values(const Eigen::Vector2d& ref) const;
  /// size() x 2 matrix of reference-coordinate gradients.
  Eigen::MatrixX2d gradients(const Eigen::Vector2d& ref) const;

 private:
  Eigen::VectorXd monomials(const Eigen::Vector2d& ref) const;
  Eigen::MatrixX2d monomial_gradients(const Eigen::Vector2d& ref) const;

  int degree_;
  std::vector<Eigen::Vector2d> nodes_;
  std::vector<std::array<int, 2>> powers_;
  Eigen::MatrixXd coeffs_;  // column i holds monomial coefficients of phi_i
};

/// Affine map from the reference triangle onto element K.
struct ElementMap {
  Point origin;
  Eigen::Matrix2d jacobian;      // columns p1 - p0, p2 - p0
  Eigen::Matrix2d inv_jacobian;
  double det = 0.0;

  Point to_physical(const Eigen::Vector2d& ref) const { return origin + jacobian * ref; }
  Eigen::Vector2d to_reference(const Point& p) const { return inv_jacobian * (p - origin); }
};

/// Broken polynomial space W_h on a triangulation.
///
/// Global index of local basis function j on element m is m * n_k + j.
class DGSpace {
 public:
  DGSpace(Mesh mesh, int degree);

  const Mesh& mesh() const { return mesh_; }
  const LagrangeBasis& basis() const { return basis_; }
  int degree() const { return basis_.degree(); }
  int local_dofs() const { return basis_.size(); }
  int num_elements() const { return mesh_.num_elements(); }
  int total_dofs() const { return local_dofs() * num_elements(); }
  int dof(int element, int local) const { return element * local_dofs() + local; }

  const ElementMap& element_map(int element) const { return maps_[element]; }

  /// Physical location of a nodal degree of freedom.
  Point dof_point(int global_dof) const;

  /// Element quadrature (degree 2k+1) with values/gradients tabulated on the
  /// reference triangle.
  const TriangleRule& element_rule() const { return element_rule_; }
  const Eigen::MatrixXd& ref_values() const { return ref_values_; }          // n_q x n_k
  const std::vector<Eigen::MatrixX2d>& ref_gradients() const { return ref_grads_; }

  /// (k+1)-point Gauss rule on [0, 1] for edge integrals.
  const LineRule& edge_rule() const { return edge_rule_; }

  /// Lowest-index element containing p (closed triangles), or -1.
  int locate(const Point& p) const;

 private:
  Mesh mesh_;
  LagrangeBasis basis_;
  std::vector<ElementMap> maps_;
  TriangleRule element_rule_;
  Eigen::MatrixXd ref_values_;
  std::vector<Eigen::MatrixX2d> ref_grads_;
  LineRule edge_rule_;
};

/// Point evaluation functional u -> u_h(p), stored as the element and the
/// local basis values at p.
struct PointProbe {
  int element = -1;
  int first_dof = 0;
  Eigen::VectorXd weights;

  double apply(std::span<const double> coeffs) const;
  double apply(const Eigen::Ref<const Eigen::VectorXd>& coeffs) const;
  /// Row of (probe . columns): one value per column of `states`.
  Eigen::RowVectorXd apply_columns(const Eigen::Ref<const Eigen::MatrixXd>& states) const;
};

/// Throws DomainError when p lies outside the closed domain.
PointProbe make_probe(const DGSpace& space, const Point& p);

double evaluate_solution(const DGSpace& space, const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                         const Point& p);

}  // namespace hrom
