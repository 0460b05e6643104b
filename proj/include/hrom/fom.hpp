// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "hrom/assembly.hpp"

namespace hrom {

/// Uniform grid t_n = n dt, n = 0..steps.
struct TimeGrid {
  double dt = 0.01;
  int steps = 0;

  /// Throws DomainError unless steps * dt matches T within 1e-12.
  static TimeGrid uniform(double T, double dt);
  double time(int n) const { return n * dt; }
  double final_time() const { return steps * dt; }
};

struct SnapshotSet {
  Eigen::MatrixXd states;  // N x (steps + 1); column n is u^n
  TimeGrid grid;
  double wall_time = 0.0;       // stepping loop only
  double factorization_time = 0.0;
  double load_time = 0.0;       // precomputing l_h(t_n)

  int dofs() const { return static_cast<int>(states.rows()); }
  /// Columns 0..J with the initial state, 1..J without.
  Eigen::MatrixXd matrix(bool include_initial) const;
};

/// Reusable factorization of M + dt A.
class StepOperator {
 public:
  StepOperator(const SparseMatrix& mass, const SparseMatrix& stiffness, double dt);

  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& rhs) const;
  int size() const { return static_cast<int>(matrix_.rows()); }
  const SparseMatrix& matrix() const { return matrix_; }

 private:
  SparseMatrix matrix_;
  // SparseLU::solve is const but not documented as re-entrant.
  std::unique_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu_;
};

StepOperator step_matrix(const AssembledSystem& system, double dt);

/// Columns l_h(t_1) .. l_h(t_J); OpenMP-parallel over time levels.
Eigen::MatrixXd precompute_loads(const AssembledSystem& system, const TimeGrid& grid);

namespace reference {
Eigen::MatrixXd precompute_loads(const AssembledSystem& system, const TimeGrid& grid);
}

struct FomOptions {
  // Refactorize at every step; only useful to test factorization reuse.
  bool refactor_each_step = false;
};

/// Backward Euler: (M + dt A) u^{n+1} = M u^n + dt l^{n+1}.
SnapshotSet solve_fom(const AssembledSystem& system, const Eigen::Ref<const Eigen::VectorXd>& u0,
                      const TimeGrid& grid, const FomOptions& opts = {});
SnapshotSet solve_fom(const AssembledSystem& system, const Eigen::Ref<const Eigen::VectorXd>& u0,
                      const TimeGrid& grid, const Eigen::Ref<const Eigen::MatrixXd>& loads,
                      const FomOptions& opts = {});

// Binary container: 5-byte ASCII magic, then little-endian 8-byte fields.
// Snapshots: "HROM1", u64 N, u64 J, f64 dt, then N * (J + 1) f64 column-major.
void write_snapshots(const std::filesystem::path& path, const SnapshotSet& snaps);
SnapshotSet read_snapshots(const std::filesystem::path& path);
/// One row per degree of freedom, one column per time level.
void write_snapshots_csv(const std::filesystem::path& path, const SnapshotSet& snaps);

}  // namespace hrom
