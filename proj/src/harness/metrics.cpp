// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <cmath>

#include "hrom/error.hpp"
#include "hrom/harness.hpp"

namespace hrom {

namespace {
constexpr double kPriceFloor = 1e-12;
}

Eigen::VectorXd relative_price_error(const Eigen::Ref<const Eigen::VectorXd>& fom_prices,
                                     const Eigen::Ref<const Eigen::VectorXd>& rom_prices) {
  if (fom_prices.size() != rom_prices.size())
    throw StructuralError("relative_price_error: series lengths differ");
  Eigen::VectorXd e(fom_prices.size());
  for (Eigen::Index n = 0; n < e.size(); ++n)
    e[n] = std::abs(rom_prices[n] - fom_prices[n]) / std::max(std::abs(fom_prices[n]), kPriceFloor);
  return e;
}

Eigen::VectorXd relative_price_error(const SnapshotSet& fom, const Eigen::Ref<const Eigen::MatrixXd>& rom_states,
                                     const DGSpace& space, const Point& point) {
  if (rom_states.rows() != fom.states.rows() || rom_states.cols() != fom.states.cols())
    throw StructuralError("relative_price_error: trajectory shapes differ");
  const PointProbe probe = make_probe(space, point);
  return relative_price_error(probe.apply_columns(fom.states).transpose(),
                              probe.apply_columns(rom_states).transpose());
}

double relative_frobenius_error(const Eigen::Ref<const Eigen::MatrixXd>& fom_states,
                                const Eigen::Ref<const Eigen::MatrixXd>& rom_states) {
  if (fom_states.rows() != rom_states.rows() || fom_states.cols() != rom_states.cols())
    throw StructuralError("relative_frobenius_error: trajectory shapes differ");
  const double ref = fom_states.norm();
  if (!(ref > 0.0)) throw NumericalError("relative_frobenius_error: reference trajectory is zero");
  return (fom_states - rom_states).norm() / ref;
}

double benchmark_speedup(double fom_time, double rom_online_time) {
  if (!(fom_time > 0.0) || !(rom_online_time > 0.0))
    throw DomainError("benchmark_speedup: times must be positive");
  return fom_time / rom_online_time;
}

double time_call(const std::function<void()>& fn, int batches, double min_seconds) {
  using clock = std::chrono::steady_clock;
  double best = std::numeric_limits<double>::infinity();
  for (int b = 0; b < std::max(batches, 1); ++b) {
    int reps = 0;
    const auto start = clock::now();
    double elapsed = 0.0;
    do {
      fn();
      ++reps;
      elapsed = std::chrono::duration<double>(clock::now() - start).count();
    } while (elapsed < min_seconds);
    best = std::min(best, elapsed / reps);
  }
  return best;
}

}  // namespace hrom
