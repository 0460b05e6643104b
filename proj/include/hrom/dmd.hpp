// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hrom {

enum class DmdAlgorithm { tu, chen };
enum class AmplitudeRule { optimal, initial };

const char* to_string(DmdAlgorithm alg);
const char* to_string(AmplitudeRule rule);
DmdAlgorithm dmd_algorithm_from_string(const std::string& s);
AmplitudeRule amplitude_rule_from_string(const std::string& s);

struct DmdOptions {
  // SVD truncation: at most `rank` singular values above rank_tol * s_1.
  std::optional<int> rank;
  double rank_tol = 1e-10;
  AmplitudeRule amplitudes = AmplitudeRule::optimal;
  // Keep only the `keep` modes of largest |amplitude|.
  std::optional<int> keep;
  // Gram route: warn when s_1 / s_r exceeds this (the Gram matrix squares it).
  double conditioning_limit = 1e6;
};

/// Modes, Ritz values and amplitudes of a snapshot sequence. Time zero is the
/// first snapshot column the model was built from.
struct DMDModel {
  Eigen::MatrixXcd modes;        // N x r
  Eigen::VectorXcd eigenvalues;  // discrete-time Ritz values
  Eigen::VectorXcd omegas;       // log(lambda) / dt, principal branch
  Eigen::VectorXcd amplitudes;
  double dt = 0.0;
  DmdAlgorithm algorithm = DmdAlgorithm::tu;
  AmplitudeRule amplitude_rule = AmplitudeRule::optimal;

  bool rank_truncated = false;      // requested rank exceeded numerical rank
  bool ill_conditioned = false;     // Gram route with large s_1 / s_r
  bool amplitude_fallback = false;  // optimal amplitudes fell back to least squares
  double condition_ratio = 1.0;     // s_1 / s_r of the retained SVD
  std::vector<std::string> warnings;

  int rank() const { return static_cast<int>(eigenvalues.size()); }
  int dofs() const { return static_cast<int>(modes.rows()); }
};

/// Exact DMD: thin SVD of S0, A~ = U^* S1 V S^{-1}, modes S1 V S^{-1} W.
DMDModel dmd_exact(const Eigen::Ref<const Eigen::MatrixXd>& snapshots, double dt, const DmdOptions& opts = {});

/// Same operator with the SVD factors taken from the eigendecomposition of
/// the Gram matrix S0^T S0.
DMDModel dmd_variant(const Eigen::Ref<const Eigen::MatrixXd>& snapshots, double dt, const DmdOptions& opts = {});

DMDModel build_dmd(DmdAlgorithm alg, const Eigen::Ref<const Eigen::MatrixXd>& snapshots, double dt,
                   const DmdOptions& opts = {});

/// r x cols matrix with entries lambda_i^k, k = 0..cols-1.
Eigen::MatrixXcd vandermonde(const Eigen::Ref<const Eigen::VectorXcd>& eigenvalues, int cols);

struct AmplitudeFit {
  Eigen::VectorXcd amplitudes;
  bool least_squares_fallback = false;
};

/// Minimizer of ||S - Phi diag(alpha) V_and||_F over all snapshot columns,
/// from the normal equations P alpha = q with
/// P = (Phi^* Phi) o conj(V_and V_and^*) and q = diag(Phi^* S V_and^*).
AmplitudeFit optimal_amplitudes(const DMDModel& model, const Eigen::Ref<const Eigen::MatrixXd>& snapshots);

/// Least-squares coefficients Phi^+ u1.
Eigen::VectorXcd initial_amplitudes(const DMDModel& model, const Eigen::Ref<const Eigen::VectorXd>& u1);

/// Re sum_j alpha_j phi_j exp(omega_j t). Modes with lambda = 0 are skipped.
Eigen::VectorXd reconstruct(const DMDModel& model, double t);

/// Columns at t = (first + c) dt for c = 0..count-1, using integer powers of
/// lambda (identical to exp(omega t) on the principal branch).
/// OpenMP-parallel over rows; bitwise equal to the serial reference.
Eigen::MatrixXd reconstruct_trajectory(const DMDModel& model, int first, int count);

/// Time coefficients alpha_j lambda_j^(first + c), r x count.
Eigen::MatrixXcd time_coefficients(const DMDModel& model, int first, int count);

namespace reference {
Eigen::MatrixXd reconstruct_trajectory(const DMDModel& model, int first, int count);
}

// "HDMD1", u64 N, u64 r, f64 dt, then interleaved (re, im) f64 pairs:
// N * r modes column-major, r eigenvalues, r amplitudes.
void write_dmd(const std::filesystem::path& path, const DMDModel& model);
DMDModel read_dmd(const std::filesystem::path& path);

}  // namespace hrom
