// SPDX-License-Identifier: Apache-2.0
#include "assembly_detail.hpp"

namespace hrom::reference {

SparseMatrix assemble_mass(const DGSpace& space) {
  std::vector<Eigen::Triplet<double>> trips;
  for (int el = 0; el < space.num_elements(); ++el)
    detail::push_block(trips, local::mass_block(space, el), space.dof(el, 0), space.dof(el, 0));
  SparseMatrix m(space.total_dofs(), space.total_dofs());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

SparseMatrix assemble_stiffness(const DGSpace& space, const CoefficientField& field,
                                const AssemblyOptions& opts) {
  detail::check_penalty(opts.penalty_constant);
  std::vector<Eigen::Triplet<double>> trips;
  for (int el = 0; el < space.num_elements(); ++el)
    detail::push_block(trips, local::volume_block(space, field, el), space.dof(el, 0),
                       space.dof(el, 0));
  for (int e = 0; e < space.mesh().num_edges(); ++e)
    detail::push_edge_block(trips, space, space.mesh().edges[e],
                            local::edge_block(space, field, e, opts.penalty_constant));
  SparseMatrix a(space.total_dofs(), space.total_dofs());
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

Eigen::VectorXd assemble_source(const DGSpace& space, const ScalarField& f) {
  const int nk = space.local_dofs();
  Eigen::VectorXd rhs(space.total_dofs());
  for (int el = 0; el < space.num_elements(); ++el)
    rhs.segment(el * nk, nk) = detail::source_segment(space, f, el);
  return rhs;
}

Eigen::VectorXd l2_project(const DGSpace& space, const ScalarField& f) {
  const int nk = space.local_dofs();
  Eigen::VectorXd u(space.total_dofs());
  for (int el = 0; el < space.num_elements(); ++el)
    u.segment(el * nk, nk) = detail::projection_segment(space, f, el);
  return u;
}

}  // namespace hrom::reference
