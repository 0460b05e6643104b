// SPDX-License-Identifier: Apache-2.0
#include "hrom/fom.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hrom/binary_io.hpp"
#include "hrom/error.hpp"

namespace hrom {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string diagonal_diagnostic(const SparseMatrix& a) {
  const Eigen::VectorXd d = a.diagonal().cwiseAbs();
  std::ostringstream os;
  os << "min|diag| = " << d.minCoeff() << ", max|diag| = " << d.maxCoeff();
  return os.str();
}

}  // namespace

TimeGrid TimeGrid::uniform(double T, double dt) {
  if (!(dt > 0.0)) throw DomainError("time grid: dt must be positive");
  if (!(T > 0.0)) throw DomainError("time grid: T must be positive");
  const long steps = std::lround(T / dt);
  if (steps < 1 || std::abs(steps * dt - T) > 1e-12)
    throw DomainError("time grid: T is not an integer multiple of dt");
  return TimeGrid{dt, static_cast<int>(steps)};
}

Eigen::MatrixXd SnapshotSet::matrix(bool include_initial) const {
  if (include_initial) return states;
  return states.rightCols(states.cols() - 1);
}

StepOperator::StepOperator(const SparseMatrix& mass, const SparseMatrix& stiffness, double dt) {
  if (!(dt > 0.0)) throw DomainError("step operator: dt must be positive");
  if (mass.rows() != stiffness.rows() || mass.cols() != stiffness.cols() || mass.rows() != mass.cols())
    throw StructuralError("step operator: mass and stiffness shapes differ");
  matrix_ = mass + dt * stiffness;
  matrix_.makeCompressed();
  lu_ = std::make_unique<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>();
  lu_->analyzePattern(matrix_);
  lu_->factorize(matrix_);
  if (lu_->info() != Eigen::Success)
    throw NumericalError("step matrix factorization failed (" + lu_->lastErrorMessage() + "); " +
                         diagonal_diagnostic(matrix_));
}

Eigen::VectorXd StepOperator::solve(const Eigen::Ref<const Eigen::VectorXd>& rhs) const {
  if (rhs.size() != size()) throw StructuralError("step operator: rhs has wrong length");
  Eigen::VectorXd x = lu_->solve(rhs);
  if (lu_->info() != Eigen::Success) throw NumericalError("step matrix solve failed");
  return x;
}

StepOperator step_matrix(const AssembledSystem& system, double dt) {
  return StepOperator(system.mass, system.stiffness, dt);
}

Eigen::MatrixXd precompute_loads(const AssembledSystem& system, const TimeGrid& grid) {
  Eigen::MatrixXd loads = Eigen::MatrixXd::Zero(system.size(), grid.steps);
  if (system.zero_load || !system.load) return loads;
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n < grid.steps; ++n) loads.col(n) = system.load(grid.time(n + 1));
  return loads;
}

namespace reference {
Eigen::MatrixXd precompute_loads(const AssembledSystem& system, const TimeGrid& grid) {
  Eigen::MatrixXd loads = Eigen::MatrixXd::Zero(system.size(), grid.steps);
  if (system.zero_load || !system.load) return loads;
  for (int n = 0; n < grid.steps; ++n) loads.col(n) = system.load(grid.time(n + 1));
  return loads;
}
}  // namespace reference

SnapshotSet solve_fom(const AssembledSystem& system, const Eigen::Ref<const Eigen::VectorXd>& u0,
                      const TimeGrid& grid, const FomOptions& opts) {
  const auto start = Clock::now();
  const Eigen::MatrixXd loads = precompute_loads(system, grid);
  const double load_time = seconds_since(start);
  SnapshotSet out = solve_fom(system, u0, grid, loads, opts);
  out.load_time = load_time;
  return out;
}

SnapshotSet solve_fom(const AssembledSystem& system, const Eigen::Ref<const Eigen::VectorXd>& u0,
                      const TimeGrid& grid, const Eigen::Ref<const Eigen::MatrixXd>& loads,
                      const FomOptions& opts) {
  const int n = system.size();
  if (u0.size() != n) throw StructuralError("solve_fom: initial state has wrong length");
  if (system.stiffness.rows() != n) throw StructuralError("solve_fom: stiffness has wrong size");
  if (loads.rows() != n || loads.cols() != grid.steps)
    throw StructuralError("solve_fom: load matrix must be N x J");

  SnapshotSet out;
  out.grid = grid;
  out.states.resize(n, grid.steps + 1);
  out.states.col(0) = u0;

  auto start = Clock::now();
  auto op = std::make_unique<StepOperator>(system.mass, system.stiffness, grid.dt);
  out.factorization_time = seconds_since(start);

  const bool loaded = !system.zero_load;
  Eigen::VectorXd rhs(n);
  start = Clock::now();
  for (int step = 0; step < grid.steps; ++step) {
    if (opts.refactor_each_step && step > 0)
      op = std::make_unique<StepOperator>(system.mass, system.stiffness, grid.dt);
    rhs.noalias() = system.mass * out.states.col(step);
    if (loaded) rhs.noalias() += grid.dt * loads.col(step);
    out.states.col(step + 1) = op->solve(rhs);
  }
  out.wall_time = seconds_since(start);
  return out;
}

void write_snapshots(const std::filesystem::path& path, const SnapshotSet& snaps) {
  io::BinaryWriter w(path, "HROM1");
  w.u64(static_cast<std::uint64_t>(snaps.states.rows()));
  w.u64(static_cast<std::uint64_t>(snaps.grid.steps));
  w.f64(snaps.grid.dt);
  w.f64s({snaps.states.data(), static_cast<std::size_t>(snaps.states.size())});
  w.close();
}

SnapshotSet read_snapshots(const std::filesystem::path& path) {
  io::BinaryReader r(path, "HROM1");
  const auto n = r.u64();
  const auto steps = r.u64();
  const double dt = r.f64();
  if (n == 0 || n > (1ull << 32) || steps > (1ull << 32)) throw IoError(path.string() + ": implausible header");
  SnapshotSet s;
  s.grid = TimeGrid{dt, static_cast<int>(steps)};
  const auto data = r.f64s(n * (steps + 1));
  r.expect_end();
  s.states = Eigen::Map<const Eigen::MatrixXd>(data.data(), static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(steps + 1));
  return s;
}

void write_snapshots_csv(const std::filesystem::path& path, const SnapshotSet& snaps) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < snaps.states.rows(); ++i) {
    for (Eigen::Index j = 0; j < snaps.states.cols(); ++j) {
      if (j) out << ',';
      out << snaps.states(i, j);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace hrom
