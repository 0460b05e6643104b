// SPDX-License-Identifier: Apache-2.0
#include "hrom/pod.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include <Eigen/SVD>

#include "hrom/binary_io.hpp"
#include "hrom/error.hpp"

namespace hrom {

BlockCholesky::BlockCholesky(const SparseMatrix& mass, int block_size) : block_size_(block_size) {
  if (block_size < 1) throw StructuralError("block cholesky: block size must be positive");
  if (mass.rows() != mass.cols() || mass.rows() % block_size != 0)
    throw StructuralError("block cholesky: matrix size is not a multiple of the block size");
  const int nb = static_cast<int>(mass.rows()) / block_size;
  std::vector<Eigen::MatrixXd> dense(nb, Eigen::MatrixXd::Zero(block_size, block_size));
  for (int col = 0; col < mass.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(mass, col); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = static_cast<int>(it.col());
      if (r / block_size != c / block_size) {
        if (it.value() != 0.0) throw StructuralError("block cholesky: mass matrix is not block diagonal");
        continue;
      }
      dense[r / block_size](r % block_size, c % block_size) = it.value();
    }
  }
  blocks_.reserve(nb);
  for (int b = 0; b < nb; ++b) {
    Eigen::LLT<Eigen::MatrixXd> llt(dense[b]);
    if (llt.info() != Eigen::Success)
      throw NumericalError("block cholesky: block " + std::to_string(b) + " is not positive definite");
    blocks_.push_back(llt.matrixU());
  }
}

Eigen::MatrixXd BlockCholesky::apply(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  if (x.rows() != size()) throw StructuralError("block cholesky: operand has wrong row count");
  Eigen::MatrixXd y(x.rows(), x.cols());
  const int nk = block_size_;
#pragma omp parallel for schedule(static)
  for (int b = 0; b < static_cast<int>(blocks_.size()); ++b)
    y.middleRows(b * nk, nk).noalias() = blocks_[b].triangularView<Eigen::Upper>() * x.middleRows(b * nk, nk);
  return y;
}

Eigen::MatrixXd BlockCholesky::solve(const Eigen::Ref<const Eigen::MatrixXd>& y) const {
  if (y.rows() != size()) throw StructuralError("block cholesky: operand has wrong row count");
  Eigen::MatrixXd x = y;
  const int nk = block_size_;
#pragma omp parallel for schedule(static)
  for (int b = 0; b < static_cast<int>(blocks_.size()); ++b)
    blocks_[b].triangularView<Eigen::Upper>().solveInPlace(x.middleRows(b * nk, nk));
  return x;
}

Eigen::MatrixXd BlockCholesky::dense() const {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(size(), size());
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    r.block(b * block_size_, b * block_size_, block_size_, block_size_) = blocks_[b];
  return r;
}

PODBasis PODBasis::truncated(int n) const {
  if (n < 1 || n > size()) throw StructuralError("pod: cannot truncate to " + std::to_string(n) + " modes");
  PODBasis out = *this;
  out.modes = modes.leftCols(n);
  return out;
}

double information_content(const Eigen::Ref<const Eigen::VectorXd>& sv, int n) {
  const int s = static_cast<int>(sv.size());
  if (n <= 0) return 0.0;
  if (n >= s) return 1.0;
  const double total = sv.squaredNorm();
  return sv.head(n).squaredNorm() / total;
}

int select_mode_count(const Eigen::Ref<const Eigen::VectorXd>& sv, double eps) {
  const int s = static_cast<int>(sv.size());
  const double target = 1.0 - eps * eps;
  for (int n = 1; n < s; ++n)
    if (information_content(sv, n) >= target) return n;
  return s;
}

PODBasis compute_pod_basis(const Eigen::Ref<const Eigen::MatrixXd>& snapshots, const SparseMatrix& mass,
                           const PodOptions& opts) {
  if (snapshots.cols() < 2) throw StructuralError("pod: need at least two snapshots");
  if (snapshots.rows() != mass.rows()) throw StructuralError("pod: snapshot length differs from mass size");
  if (!(opts.eps >= 0.0)) throw ConfigError("pod: eps must be non-negative");
  if (opts.max_modes && *opts.max_modes < 1) throw ConfigError("pod: max_modes must be positive");

  PODBasis basis;
  basis.energy_tol = opts.eps;
  basis.mass_chol = BlockCholesky(mass, opts.block_size);
  const Eigen::MatrixXd scaled = basis.mass_chol.apply(snapshots);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv[0] > 0.0)) throw NumericalError("pod: snapshot matrix is zero, basis would be empty");

  int s = 0;
  while (s < sv.size() && sv[s] > 1e-12 * sv[0]) ++s;
  basis.singular_values = sv.head(s);

  int n = select_mode_count(basis.singular_values, opts.eps);
  if (opts.max_modes) n = std::min(n, *opts.max_modes);
  basis.modes = basis.mass_chol.solve(svd.matrixU().leftCols(n));
  return basis;
}

ReducedSystem reduce_system(const AssembledSystem& system, const Eigen::Ref<const Eigen::MatrixXd>& loads,
                            const PODBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& u0) {
  const Eigen::Index n = system.size();
  if (basis.size() == 0) throw StructuralError("reduce_system: empty basis");
  if (basis.modes.rows() != n || u0.size() != n || loads.rows() != n)
    throw StructuralError("reduce_system: dimension mismatch between system, basis and data");
  const Eigen::MatrixXd& u = basis.modes;
  ReducedSystem red;
  const Eigen::MatrixXd au = system.stiffness * u;
  red.stiffness = u.transpose() * au;
  red.loads = u.transpose() * loads;
  red.u0 = u.transpose() * (system.mass * u0);
  return red;
}

RomTrajectory solve_rom(const ReducedSystem& red, const TimeGrid& grid) {
  const int n = red.size();
  if (red.loads.cols() != grid.steps || red.loads.rows() != n || red.u0.size() != n)
    throw StructuralError("solve_rom: reduced loads do not match the time grid");
  RomTrajectory out;
  out.states.resize(n, grid.steps + 1);
  out.states.col(0) = red.u0;

  const auto start = std::chrono::steady_clock::now();
  const Eigen::MatrixXd step = Eigen::MatrixXd::Identity(n, n) + grid.dt * red.stiffness;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(step);
  if (!(lu.rcond() > 1e-14)) throw NumericalError("solve_rom: reduced step matrix is singular");
  Eigen::VectorXd rhs(n);
  for (int k = 0; k < grid.steps; ++k) {
    rhs.noalias() = out.states.col(k) + grid.dt * red.loads.col(k);
    out.states.col(k + 1) = lu.solve(rhs);
  }
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

Eigen::MatrixXd lift(const PODBasis& basis, const Eigen::Ref<const Eigen::MatrixXd>& reduced) {
  if (reduced.rows() != basis.size()) throw StructuralError("lift: reduced trajectory has wrong row count");
  return basis.modes * reduced;
}

void write_pod(const std::filesystem::path& path, const PODBasis& basis) {
  io::BinaryWriter w(path, "HPOD1");
  w.u64(static_cast<std::uint64_t>(basis.modes.rows()));
  w.u64(static_cast<std::uint64_t>(basis.modes.cols()));
  w.f64s({basis.modes.data(), static_cast<std::size_t>(basis.modes.size())});
  w.u64(static_cast<std::uint64_t>(basis.singular_values.size()));
  w.f64s({basis.singular_values.data(), static_cast<std::size_t>(basis.singular_values.size())});
  w.close();
}

PODBasis read_pod(const std::filesystem::path& path) {
  io::BinaryReader r(path, "HPOD1");
  const auto rows = r.u64();
  const auto cols = r.u64();
  if (rows > (1ull << 32) || cols > rows) throw IoError(path.string() + ": implausible header");
  const auto modes = r.f64s(rows * cols);
  const auto s = r.u64();
  if (s > rows || s < cols) throw IoError(path.string() + ": implausible singular value count");
  const auto sv = r.f64s(s);
  r.expect_end();
  PODBasis b;
  b.modes = Eigen::Map<const Eigen::MatrixXd>(modes.data(), static_cast<Eigen::Index>(rows),
                                             static_cast<Eigen::Index>(cols));
  b.singular_values = Eigen::Map<const Eigen::VectorXd>(sv.data(), static_cast<Eigen::Index>(s));
  return b;
}

}  // namespace hrom
