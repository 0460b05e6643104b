// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hrom/assembly.hpp"
#include "hrom/dg_space.hpp"
#include "hrom/dmd.hpp"
#include "hrom/fom.hpp"
#include "hrom/heston.hpp"
#include "hrom/pod.hpp"

namespace hrom {

struct ExperimentConfig {
  std::string preset = "european-call";
  OptionSpec spec;
  RectDomain domain;
  int cells_v = 48;
  int cells_x = 96;
  double dt = 0.01;
  int degree = 1;
  double penalty = 3.0;

  int modes_min = 1;
  int modes_max = 19;
  double pod_eps = 1e-4;

  DmdAlgorithm dmd_alg = DmdAlgorithm::tu;  // single-model commands
  double dmd_rank_tol = 1e-10;
  AmplitudeRule amplitudes = AmplitudeRule::optimal;

  bool include_initial = true;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  int timing_repeats = 3;

  /// Throws ConfigError/DomainError when a field is out of range.
  void validate() const;
};

ExperimentConfig config_from_preset(std::string_view name);

/// Flat `key = value` text; '#' starts a comment. A `preset` key is applied
/// first wherever it appears, the remaining keys override it. Unknown keys,
/// repeated keys and unparsable values throw ConfigError. Numeric values may
/// be written as log(<number>).
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// "3..19" or "7".
std::pair<int, int> parse_mode_range(std::string_view text);

/// Discretized pricing problem ready for time stepping.
struct Problem {
  ExperimentConfig config;
  std::shared_ptr<const DGSpace> space;
  AssembledSystem system;
  Eigen::VectorXd u0;  // L2 projection of the payoff
  TimeGrid grid;
  Point eval_point;    // (v0, log(S0 / K_ref))
  PointProbe probe;
  double assembly_time = 0.0;
};

Problem build_problem(const ExperimentConfig& config);

/// FOM solve with loads precomputed once and timings recorded.
SnapshotSet run_fom(const Problem& problem);

/// e_n = |p_rom - p_fom| / max(|p_fom|, floor), floor = 1e-12.
Eigen::VectorXd relative_price_error(const Eigen::Ref<const Eigen::VectorXd>& fom_prices,
                                     const Eigen::Ref<const Eigen::VectorXd>& rom_prices);
/// Same metric on trajectories probed at `point`.
Eigen::VectorXd relative_price_error(const SnapshotSet& fom, const Eigen::Ref<const Eigen::MatrixXd>& rom_states,
                                     const DGSpace& space, const Point& point);

/// ||S_fom - S_rom||_F / ||S_fom||_F; NumericalError when S_fom = 0.
double relative_frobenius_error(const Eigen::Ref<const Eigen::MatrixXd>& fom_states,
                                const Eigen::Ref<const Eigen::MatrixXd>& rom_states);

/// fom_time / rom_online_time; both must be positive.
double benchmark_speedup(double fom_time, double rom_online_time);

/// Heston European call price at t = 0 from the characteristic function:
/// S0 e^{-r_f T} P1 - K e^{-r_d T} P2, each P_j by Gauss-Kronrod on [0, inf).
/// Throws NumericalError if the estimated price error reaches 1e-8.
double reference_price_heston_cf(const HestonParams& params);

/// Mean wall time of `fn`, repeated until at least `min_seconds` have elapsed,
/// minimized over `batches` batches.
double time_call(const std::function<void()>& fn, int batches = 3, double min_seconds = 5e-3);

struct SweepRow {
  std::string method;  // pod, dmd_tu, dmd_chen
  int n_modes = 0;     // requested
  int effective_modes = 0;
  double frobenius_rel_err = 0.0;
  double price_rel_err_T = 0.0;
  double offline_s = 0.0;
  double online_s = 0.0;
  double online_field_s = 0.0;  // lifting the full field, not part of online_s
  double speedup = 0.0;
  Eigen::VectorXd price_series;     // ROM price at t_0..t_J
  Eigen::VectorXd price_error_series;
};

struct ErrorReport {
  std::string preset;
  int dofs = 0;
  int steps = 0;
  double assembly_s = 0.0;
  double fom_factorization_s = 0.0;
  double fom_load_s = 0.0;
  double fom_stepping_s = 0.0;
  double fom_price_T = 0.0;
  Eigen::VectorXd fom_price_series;
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;

  /// Smallest swept N whose Frobenius error is <= tol, or -1.
  int modes_for_accuracy(const std::string& method, double tol) const;
  const SweepRow& row(const std::string& method, int n_modes) const;
};

/// FOM once, then POD / DMD (Tu) / DMD (Chen) for every N in the sweep.
ErrorReport run_sweep(const Problem& problem, const SnapshotSet& fom);

/// Writes sweep.csv, price_series.csv and summary.txt into `dir`.
void write_report(const ErrorReport& report, const ExperimentConfig& config, const std::filesystem::path& dir);

ErrorReport run_experiment(const ExperimentConfig& config);

/// CSV text of the sweep table (the contents of sweep.csv).
std::string sweep_csv(const ErrorReport& report);

}  // namespace hrom
