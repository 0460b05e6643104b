// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hrom/assembly.hpp"
#include "hrom/fom.hpp"

namespace hrom {

/// Cholesky factor R (R^T R = M) of a block-diagonal SPD mass matrix, kept as
/// one dense upper-triangular block per element.
class BlockCholesky {
 public:
  BlockCholesky() = default;
  BlockCholesky(const SparseMatrix& mass, int block_size);

  int size() const { return static_cast<int>(blocks_.size()) * block_size_; }
  int block_size() const { return block_size_; }

  Eigen::MatrixXd apply(const Eigen::Ref<const Eigen::MatrixXd>& x) const;        // R x
  Eigen::MatrixXd solve(const Eigen::Ref<const Eigen::MatrixXd>& y) const;        // R^{-1} y
  /// Dense R, for tests on small problems.
  Eigen::MatrixXd dense() const;

 private:
  int block_size_ = 0;
  std::vector<Eigen::MatrixXd> blocks_;
};

struct PODBasis {
  Eigen::MatrixXd modes;            // N_h x N, M-orthonormal columns
  Eigen::VectorXd singular_values;  // all s retained singular values of R S
  BlockCholesky mass_chol;
  double energy_tol = 0.0;

  int size() const { return static_cast<int>(modes.cols()); }
  int rank() const { return static_cast<int>(singular_values.size()); }
  /// Leading n modes; singular values are kept in full.
  PODBasis truncated(int n) const;
};

/// I(N) = sum_{i<=N} s_i^2 / sum_{i<=s} s_i^2, with I(s) == 1 exactly.
double information_content(const Eigen::Ref<const Eigen::VectorXd>& singular_values, int n);

/// Smallest N with I(N) >= 1 - eps^2.
int select_mode_count(const Eigen::Ref<const Eigen::VectorXd>& singular_values, double eps);

struct PodOptions {
  double eps = 1e-4;
  std::optional<int> max_modes;
  int block_size = 1;
};

/// Mass-weighted POD: SVD of R S, modes U = R^{-1} (left singular vectors).
PODBasis compute_pod_basis(const Eigen::Ref<const Eigen::MatrixXd>& snapshots, const SparseMatrix& mass,
                           const PodOptions& opts);

struct ReducedSystem {
  Eigen::MatrixXd stiffness;  // U^T A U
  Eigen::MatrixXd loads;      // U^T l(t_n), n = 1..J
  Eigen::VectorXd u0;         // U^T M u^0

  int size() const { return static_cast<int>(stiffness.rows()); }
};

ReducedSystem reduce_system(const AssembledSystem& system, const Eigen::Ref<const Eigen::MatrixXd>& loads,
                            const PODBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& u0);

struct RomTrajectory {
  Eigen::MatrixXd states;  // N x (J + 1)
  double wall_time = 0.0;
};

/// Backward Euler on the reduced system, one dense LU up front.
RomTrajectory solve_rom(const ReducedSystem& red, const TimeGrid& grid);

Eigen::MatrixXd lift(const PODBasis& basis, const Eigen::Ref<const Eigen::MatrixXd>& reduced);

// "HPOD1", u64 N_h, u64 N, N_h * N f64 modes (column-major),
// u64 s, s f64 singular values.
void write_pod(const std::filesystem::path& path, const PODBasis& basis);
/// The mass factor is not stored; the returned basis has an empty mass_chol.
PODBasis read_pod(const std::filesystem::path& path);

}  // namespace hrom
