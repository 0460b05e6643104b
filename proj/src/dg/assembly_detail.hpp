// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "hrom/assembly.hpp"

// Shared between the OpenMP kernels and the serial reference.
namespace hrom::detail {

void push_block(std::vector<Eigen::Triplet<double>>& trips, const Eigen::MatrixXd& block,
                int row0, int col0);
void push_edge_block(std::vector<Eigen::Triplet<double>>& trips, const DGSpace& space,
                     const Edge& edge, const Eigen::MatrixXd& block);
void check_penalty(double c);
Eigen::VectorXd source_segment(const DGSpace& space, const ScalarField& f, int el);
Eigen::VectorXd projection_segment(const DGSpace& space, const ScalarField& f, int el);

}  // namespace hrom::detail
