// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hrom/dg_space.hpp"
#include "hrom/mesh.hpp"

namespace hrom {

using SparseMatrix = Eigen::SparseMatrix<double>;
using ScalarField = std::function<double(const Point&)>;

/// Coefficients of  -div(A grad u) + b . grad u + r u.
class CoefficientField {
 public:
  std::function<Eigen::Matrix2d(const Point&)> diffusion;
  std::function<Eigen::Vector2d(const Point&)> convection;
  double reaction = 0.0;

  /// A = a * I, b = beta (constant), reaction r.
  static CoefficientField constant(double a, const Eigen::Vector2d& beta, double r);
};

/// Boundary data at a fixed time; `side` identifies the rectangle side of the edge.
struct BoundaryData {
  std::function<double(BoundarySide side, const Point& p)> dirichlet;
  std::function<double(BoundarySide side, const Point& p)> neumann;
};

struct AssemblyOptions {
  // sigma_e = penalty_constant * k (k + 1) * lambda_max(mean of A over e)
  double penalty_constant = 3.0;
};

/// Element-local dense blocks. Rows index test functions, columns trial functions.
namespace local {
Eigen::MatrixXd mass_block(const DGSpace& space, int element);
Eigen::MatrixXd volume_block(const DGSpace& space, const CoefficientField& field, int element);
/// Interior edges give a 2 n_k square block ordered (elements[0], elements[1]);
/// Dirichlet edges an n_k block; Neumann edges an empty matrix.
Eigen::MatrixXd edge_block(const DGSpace& space, const CoefficientField& field, int edge,
                           double penalty_constant);
double edge_penalty(const DGSpace& space, const CoefficientField& field, int edge,
                    double penalty_constant);
}  // namespace local

// OpenMP-parallel over elements/edges. Local blocks are computed concurrently
// and scattered in a fixed order, so results are bitwise independent of the
// thread count and identical to the serial reference in hrom::reference.
SparseMatrix assemble_mass(const DGSpace& space);
SparseMatrix assemble_stiffness(const DGSpace& space, const CoefficientField& field,
                                const AssemblyOptions& opts = {});
Eigen::VectorXd assemble_load(const DGSpace& space, const CoefficientField& field,
                              const BoundaryData& bc, const AssemblyOptions& opts = {});
/// Volume source vector rhs_i = (f, phi_i).
Eigen::VectorXd assemble_source(const DGSpace& space, const ScalarField& f);
/// Orthogonal L2 projection onto W_h, solved block by block.
Eigen::VectorXd l2_project(const DGSpace& space, const ScalarField& f);

namespace reference {
// Straight serial loops kept as the test oracle for the parallel kernels.
SparseMatrix assemble_mass(const DGSpace& space);
SparseMatrix assemble_stiffness(const DGSpace& space, const CoefficientField& field,
                                const AssemblyOptions& opts = {});
Eigen::VectorXd assemble_source(const DGSpace& space, const ScalarField& f);
Eigen::VectorXd l2_project(const DGSpace& space, const ScalarField& f);
}  // namespace reference

/// Semi-discrete system M u' + A u = l(t).
struct AssembledSystem {
  SparseMatrix mass;
  SparseMatrix stiffness;
  std::function<Eigen::VectorXd(double t)> load;
  bool zero_load = false;  // l(t) == 0 for every t; `load` may be empty
  double penalty_constant = 3.0;
  int block_size = 1;      // n_k; mass is block diagonal with this block size

  int size() const { return static_cast<int>(mass.rows()); }
  Eigen::VectorXd load_at(double t) const;
};

/// Squared L2 norm of u_h - f over the domain.
double l2_error_squared(const DGSpace& space, const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                        const ScalarField& f);

}  // namespace hrom
