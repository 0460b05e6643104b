// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include <Eigen/Eigenvalues>

#include "hrom/error.hpp"
#include "hrom/harness.hpp"
#include "hrom/pod.hpp"
#include "support.hpp"

using namespace hrom;
using hrom::testing::identical;
using hrom::testing::random_matrix;

namespace {

SparseMatrix identity(int n) {
  SparseMatrix m(n, n);
  m.setIdentity();
  return m;
}

// Block-diagonal SPD matrix with 3x3 blocks.
SparseMatrix block_spd(std::mt19937_64& rng, int blocks) {
  std::vector<Eigen::Triplet<double>> t;
  for (int b = 0; b < blocks; ++b) {
    const Eigen::MatrixXd g = random_matrix(rng, 3, 3);
    const Eigen::MatrixXd k = g * g.transpose() + 0.5 * Eigen::MatrixXd::Identity(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.emplace_back(3 * b + i, 3 * b + j, k(i, j));
  }
  SparseMatrix m(3 * blocks, 3 * blocks);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

PodOptions opts(double eps, std::optional<int> cap = std::nullopt, int block = 1) {
  PodOptions o;
  o.eps = eps;
  o.max_modes = cap;
  o.block_size = block;
  return o;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

ExperimentConfig coarse(const char* name) {
  ExperimentConfig c = config_from_preset(name);
  c.cells_v = 4;
  c.cells_x = 8;
  return c;
}

}  // namespace

TEST_CASE("information content") {
  const Eigen::Vector3d sv(3.0, 1.0, 1e-6);
  CHECK(information_content(sv, 1) == doctest::Approx(0.9));
  CHECK(information_content(sv, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(information_content(sv, 3) == 1.0);
  CHECK(select_mode_count(sv, 0.1) == 2);
  CHECK(select_mode_count(sv, 0.5) == 1);
  CHECK(select_mode_count(sv, 0.0) == 3);

  std::mt19937_64 rng(5);
  Eigen::VectorXd s = random_matrix(rng, 12, 1).cwiseAbs();
  std::sort(s.data(), s.data() + s.size(), std::greater<>());
  double prev = 0.0;
  for (int n = 1; n <= 12; ++n) {
    const double in = information_content(s, n);
    CHECK(in >= prev);
    prev = in;
  }
  CHECK(information_content(s, 12) == 1.0);
}

TEST_CASE("block cholesky") {
  std::mt19937_64 rng(9);
  const SparseMatrix m = block_spd(rng, 4);
  const BlockCholesky r(m, 3);
  const Eigen::MatrixXd dense_r = r.dense();
  CHECK(max_abs(dense_r.transpose() * dense_r - Eigen::MatrixXd(m)) < 1e-12);
  CHECK(max_abs(dense_r.triangularView<Eigen::StrictlyLower>().toDenseMatrix()) == 0.0);
  const Eigen::MatrixXd x = random_matrix(rng, 12, 2);
  CHECK(max_abs(r.solve(r.apply(x)) - x) < 1e-12);
  CHECK_THROWS_AS(BlockCholesky(m, 5), StructuralError);
  CHECK_THROWS_AS(BlockCholesky(m, 2), StructuralError);  // coupling across 2x2 blocks
  CHECK_THROWS_AS(BlockCholesky(SparseMatrix(-1.0 * m), 3), NumericalError);
}

TEST_CASE("pod basis examples") {
  SUBCASE("identical columns give rank one") {
    Eigen::MatrixXd s(4, 5);
    for (int j = 0; j < 5; ++j) s.col(j) = Eigen::Vector4d(1.0, -2.0, 0.5, 3.0);
    const PODBasis b = compute_pod_basis(s, identity(4), opts(1e-4));
    CHECK(b.rank() == 1);
    CHECK(b.size() == 1);
    CHECK(information_content(b.singular_values, 1) == 1.0);
    CHECK(std::abs(std::abs(b.modes.col(0).dot(s.col(0).normalized())) - 1.0) < 1e-14);
  }
  SUBCASE("orthogonal columns with unit mass") {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(5, 3);
    s(0, 0) = 4.0;
    s(2, 1) = -2.0;
    s(4, 2) = 1.0;
    const PODBasis b = compute_pod_basis(s, identity(5), opts(0.0));
    REQUIRE(b.size() == 3);
    const Eigen::Vector3d expected(4.0, 2.0, 1.0);
    CHECK((b.singular_values - expected).norm() < 1e-13);
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(std::abs(b.modes.col(j).dot(s.col(j).normalized())) - 1.0) < 1e-13);
  }
  SUBCASE("cap on the number of modes") {
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd s = random_matrix(rng, 9, 6);
    const PODBasis b = compute_pod_basis(s, identity(9), opts(0.0, 2));
    CHECK(b.size() == 2);
    CHECK(b.rank() == 6);
    CHECK(b.truncated(1).size() == 1);
    CHECK_THROWS_AS(b.truncated(3), StructuralError);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(compute_pod_basis(Eigen::MatrixXd::Zero(3, 4), identity(3), opts(0.1)), NumericalError);
    CHECK_THROWS_AS(compute_pod_basis(Eigen::MatrixXd::Ones(3, 1), identity(3), opts(0.1)), StructuralError);
    CHECK_THROWS_AS(compute_pod_basis(Eigen::MatrixXd::Ones(3, 4), identity(4), opts(0.1)), StructuralError);
    CHECK_THROWS_AS(compute_pod_basis(Eigen::MatrixXd::Ones(3, 4), identity(3), opts(-1.0)), ConfigError);
    CHECK_THROWS_AS(compute_pod_basis(Eigen::MatrixXd::Ones(3, 4), identity(3), opts(0.1, 0)), ConfigError);
  }
}

TEST_CASE("weighted orthonormality and optimality") {
  std::mt19937_64 rng(23);
  const SparseMatrix m = block_spd(rng, 10);
  // Snapshots with decaying spectrum.
  const Eigen::MatrixXd left = random_matrix(rng, 30, 8);
  Eigen::VectorXd decay(8);
  for (int i = 0; i < 8; ++i) decay[i] = std::pow(0.3, i);
  const Eigen::MatrixXd s = left * decay.asDiagonal() * random_matrix(rng, 8, 15);

  const PODBasis full = compute_pod_basis(s, m, opts(0.0, std::nullopt, 3));
  CHECK(full.rank() == 8);
  for (int i = 1; i < full.rank(); ++i) CHECK(full.singular_values[i] <= full.singular_values[i - 1]);

  const Eigen::MatrixXd dense_m(m);
  const Eigen::MatrixXd r = full.mass_chol.dense();
  const Eigen::MatrixXd shat = r * s;
  const double total = shat.squaredNorm();
  for (int n = 1; n <= 8; ++n) {
    const PODBasis b = full.truncated(n);
    CHECK(max_abs(b.modes.transpose() * dense_m * b.modes - Eigen::MatrixXd::Identity(n, n)) < 1e-10);
    const Eigen::MatrixXd uhat = r * b.modes;
    const double resid = (shat - uhat * (uhat.transpose() * shat)).squaredNorm();
    const double tail = full.singular_values.tail(full.rank() - n).squaredNorm();
    CHECK(std::abs(resid - tail) <= 1e-8 * total);
  }

  // eps selects the smallest N meeting the energy target.
  const PODBasis sel = compute_pod_basis(s, m, opts(0.05, std::nullopt, 3));
  CHECK(information_content(sel.singular_values, sel.size()) >= 1.0 - 0.05 * 0.05);
  if (sel.size() > 1) CHECK(information_content(sel.singular_values, sel.size() - 1) < 1.0 - 0.05 * 0.05);
}

TEST_CASE("reduce_system") {
  std::mt19937_64 rng(31);
  AssembledSystem sys;
  sys.mass = identity(6);
  sys.stiffness = Eigen::MatrixXd(random_matrix(rng, 6, 6)).sparseView();
  sys.zero_load = true;
  const Eigen::MatrixXd loads = random_matrix(rng, 6, 4);
  const Eigen::VectorXd u0 = random_matrix(rng, 6, 1);

  SUBCASE("coordinate basis extracts an entry") {
    PODBasis b;
    b.modes = Eigen::MatrixXd::Zero(6, 1);
    b.modes(0, 0) = 1.0;
    b.singular_values = Eigen::VectorXd::Ones(1);
    const ReducedSystem red = reduce_system(sys, loads, b, u0);
    CHECK(red.stiffness(0, 0) == sys.stiffness.coeff(0, 0));
    CHECK((red.loads.row(0) - loads.row(0)).norm() == 0.0);
    CHECK(red.u0[0] == u0[0]);
  }
  SUBCASE("zero loads stay zero") {
    const PODBasis b = compute_pod_basis(random_matrix(rng, 6, 5), identity(6), opts(0.0));
    const ReducedSystem red = reduce_system(sys, Eigen::MatrixXd::Zero(6, 4), b, u0);
    CHECK(max_abs(red.loads) == 0.0);
  }
  SUBCASE("full basis is a similarity transform") {
    const PODBasis b = compute_pod_basis(random_matrix(rng, 6, 9), identity(6), opts(0.0));
    REQUIRE(b.size() == 6);
    const ReducedSystem red = reduce_system(sys, loads, b, u0);
    Eigen::VectorXcd e1 = Eigen::EigenSolver<Eigen::MatrixXd>(Eigen::MatrixXd(sys.stiffness)).eigenvalues();
    Eigen::VectorXcd e2 = Eigen::EigenSolver<Eigen::MatrixXd>(red.stiffness).eigenvalues();
    auto key = [](std::complex<double> a, std::complex<double> b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    };
    std::sort(e1.data(), e1.data() + 6, key);
    std::sort(e2.data(), e2.data() + 6, key);
    CHECK((e1 - e2).norm() < 1e-8);
  }
  SUBCASE("dimension mismatch") {
    const PODBasis b = compute_pod_basis(random_matrix(rng, 6, 3), identity(6), opts(0.0));
    CHECK_THROWS_AS(reduce_system(sys, random_matrix(rng, 5, 4), b, u0), StructuralError);
    CHECK_THROWS_AS(reduce_system(sys, loads, b, Eigen::VectorXd::Zero(4)), StructuralError);
    CHECK_THROWS_AS(reduce_system(sys, loads, PODBasis{}, u0), StructuralError);
  }
}

TEST_CASE("solve_rom") {
  ReducedSystem red;
  red.stiffness = Eigen::MatrixXd::Ones(1, 1);
  red.loads = Eigen::MatrixXd::Zero(1, 3);
  red.u0 = Eigen::VectorXd::Ones(1);
  const RomTrajectory tr = solve_rom(red, TimeGrid{0.1, 3});
  CHECK(tr.states.cols() == 4);
  CHECK(tr.states(0, 1) == doctest::Approx(1.0 / 1.1).epsilon(1e-15));
  CHECK(tr.states(0, 3) == doctest::Approx(1.0 / (1.1 * 1.1 * 1.1)).epsilon(1e-14));

  red.u0.setZero();
  CHECK(max_abs(solve_rom(red, TimeGrid{0.1, 3}).states) == 0.0);
  CHECK_THROWS_AS(solve_rom(red, TimeGrid{0.1, 4}), StructuralError);
  red.stiffness(0, 0) = -10.0;  // I + dt A_r = 0
  CHECK_THROWS_AS(solve_rom(red, TimeGrid{0.1, 3}), NumericalError);
}

TEST_CASE("lift") {
  std::mt19937_64 rng(2);
  const PODBasis b = compute_pod_basis(random_matrix(rng, 7, 4), identity(7), opts(0.0));
  CHECK(max_abs(lift(b, Eigen::MatrixXd::Zero(b.size(), 3))) == 0.0);
  const PODBasis one = b.truncated(1);
  CHECK((lift(one, Eigen::MatrixXd::Constant(1, 1, 2.5)).col(0) - 2.5 * one.modes.col(0)).norm() == 0.0);
  CHECK_THROWS_AS(lift(b, Eigen::MatrixXd::Zero(b.size() + 1, 2)), StructuralError);

  SUBCASE("lift of the projected initial state is the M-orthogonal projection") {
    const SparseMatrix m = block_spd(rng, 3);
    const Eigen::MatrixXd s = random_matrix(rng, 9, 6);
    const PODBasis full = compute_pod_basis(s, m, opts(0.0, std::nullopt, 3));
    const Eigen::VectorXd u0 = s.col(0);
    const double norm2 = u0.dot(m * u0);
    for (int n = 1; n <= full.size(); ++n) {
      const PODBasis bn = full.truncated(n);
      const Eigen::VectorXd coeff = bn.modes.transpose() * (m * u0);
      const Eigen::VectorXd err = u0 - lift(bn, coeff);
      // Pythagoras: ||u0||^2 = ||coeff||^2 + ||u0 - U coeff||^2 in the M norm.
      CHECK(std::abs(err.dot(m * err) - (norm2 - coeff.squaredNorm())) < 1e-10 * norm2);
      CHECK((bn.modes.transpose() * (m * err)).norm() < 1e-10 * std::sqrt(norm2));
    }
  }
}

TEST_CASE("full-rank ROM reproduces the FOM") {
  const Problem pb = build_problem(coarse("european-call"));
  const SnapshotSet snaps = run_fom(pb);
  const Eigen::MatrixXd loads = precompute_loads(pb.system, pb.grid);
  const PODBasis b = compute_pod_basis(snaps.matrix(true), pb.system.mass, opts(0.0, std::nullopt, pb.system.block_size));
  const ReducedSystem red = reduce_system(pb.system, loads, b, pb.u0);
  const Eigen::MatrixXd rom = lift(b, solve_rom(red, pb.grid).states);
  CHECK((rom - snaps.states).norm() / snaps.states.norm() < 1e-6);
}

TEST_CASE("POD ROM error decays with the number of modes") {
  for (const std::string name : {"european-call", "butterfly", "digital"}) {
    CAPTURE(name);
    const Problem pb = build_problem(coarse(name.c_str()));
    const SnapshotSet snaps = run_fom(pb);
    const Eigen::MatrixXd loads = precompute_loads(pb.system, pb.grid);
    const PODBasis full =
        compute_pod_basis(snaps.matrix(true), pb.system.mass, opts(0.0, 12, pb.system.block_size));
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= full.size(); ++n) {
      const PODBasis b = full.truncated(n);
      const ReducedSystem red = reduce_system(pb.system, loads, b, pb.u0);
      const double err = relative_frobenius_error(snaps.states, lift(b, solve_rom(red, pb.grid).states));
      CAPTURE(n);
      CHECK(err <= prev * (1.0 + 1e-9));
      prev = err;
    }
  }
}

TEST_CASE("pod file round trip") {
  std::mt19937_64 rng(4);
  const PODBasis b = compute_pod_basis(random_matrix(rng, 8, 5), identity(8), opts(0.0, 3));
  const auto path = std::filesystem::temp_directory_path() / "hrom_test_pod.bin";
  write_pod(path, b);
  CHECK(std::filesystem::file_size(path) == 5 + 8 + 8 + 8 * 24 + 8 + 8 * 5);
  const PODBasis r = read_pod(path);
  CHECK(identical(r.modes, b.modes));
  CHECK(identical(Eigen::MatrixXd(r.singular_values), Eigen::MatrixXd(b.singular_values)));
  CHECK(r.mass_chol.size() == 0);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 1);
  CHECK_THROWS_AS(read_pod(path), IoError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_pod(path), IoError);
}
