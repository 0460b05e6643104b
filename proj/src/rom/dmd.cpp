// SPDX-License-Identifier: Apache-2.0
#include "hrom/dmd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hrom/binary_io.hpp"
#include "hrom/error.hpp"

namespace hrom {

const char* to_string(DmdAlgorithm alg) { return alg == DmdAlgorithm::tu ? "tu" : "chen"; }
const char* to_string(AmplitudeRule rule) { return rule == AmplitudeRule::optimal ? "optimal" : "initial"; }

DmdAlgorithm dmd_algorithm_from_string(const std::string& s) {
  if (s == "tu") return DmdAlgorithm::tu;
  if (s == "chen") return DmdAlgorithm::chen;
  throw ConfigError("unknown DMD algorithm '" + s + "' (expected tu or chen)");
}

AmplitudeRule amplitude_rule_from_string(const std::string& s) {
  if (s == "optimal") return AmplitudeRule::optimal;
  if (s == "initial") return AmplitudeRule::initial;
  throw ConfigError("unknown amplitude rule '" + s + "' (expected optimal or initial)");
}

namespace {

using cd = std::complex<double>;

// Truncated SVD factors of S0 shared by both algorithms.
struct SvdFactors {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;
  Eigen::MatrixXd v;
};

int truncation_rank(const Eigen::VectorXd& s, const DmdOptions& opts, DMDModel& model) {
  int numerical = 0;
  while (numerical < s.size() && s[numerical] > opts.rank_tol * s[0]) ++numerical;
  int r = numerical;
  if (opts.rank) {
    if (*opts.rank < 1) throw ConfigError("dmd: rank must be positive");
    if (*opts.rank > numerical) {
      model.rank_truncated = true;
      model.warnings.push_back("requested rank " + std::to_string(*opts.rank) +
                               " exceeds numerical rank " + std::to_string(numerical) + "; truncated");
    } else {
      r = *opts.rank;
    }
  }
  return r;
}

void check_input(const Eigen::Ref<const Eigen::MatrixXd>& snapshots, double dt) {
  if (snapshots.cols() < 2) throw StructuralError("dmd: need at least two snapshots");
  if (!(dt > 0.0)) throw ConfigError("dmd: dt must be positive");
}

SvdFactors thin_svd(const Eigen::Ref<const Eigen::MatrixXd>& s0, const DmdOptions& opts, DMDModel& model) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(s0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv[0] > 0.0)) throw NumericalError("dmd: shifted snapshot matrix S0 is zero");
  const int r = truncation_rank(sv, opts, model);
  return {svd.matrixU().leftCols(r), sv.head(r), svd.matrixV().leftCols(r)};
}

SvdFactors gram_svd(const Eigen::Ref<const Eigen::MatrixXd>& s0, const DmdOptions& opts, DMDModel& model) {
  const Eigen::MatrixXd gram = s0.transpose() * s0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success) throw NumericalError("dmd: Gram eigensolve failed");
  const Eigen::Index m = gram.rows();
  // Descending order; negative round-off eigenvalues become zero singular values.
  Eigen::VectorXd s(m);
  Eigen::MatrixXd v(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    s[i] = std::sqrt(std::max(es.eigenvalues()[m - 1 - i], 0.0));
    v.col(i) = es.eigenvectors().col(m - 1 - i);
  }
  if (!(s[0] > 0.0)) throw NumericalError("dmd: shifted snapshot matrix S0 is zero");
  const int r = truncation_rank(s, opts, model);
  SvdFactors f{Eigen::MatrixXd(), s.head(r), v.leftCols(r)};
  f.u = s0 * f.v * f.s.cwiseInverse().asDiagonal();
  return f;
}

DMDModel finish(DMDModel model, const SvdFactors& f, const Eigen::Ref<const Eigen::MatrixXd>& snapshots,
                const DmdOptions& opts) {
  const Eigen::Index m = snapshots.cols() - 1;
  const auto s1 = snapshots.rightCols(m);
  model.condition_ratio = f.s[0] / f.s[f.s.size() - 1];

  // S1 V S^{-1}, shared by the reduced operator and the modes.
  const Eigen::MatrixXd s1_vsinv = s1 * f.v * f.s.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd reduced = f.u.transpose() * s1_vsinv;
  Eigen::EigenSolver<Eigen::MatrixXd> es(reduced, true);
  if (es.info() != Eigen::Success) throw NumericalError("dmd: eigendecomposition of the reduced operator failed");

  model.eigenvalues = es.eigenvalues();
  model.modes = s1_vsinv.cast<cd>() * es.eigenvectors();
  model.omegas.resize(model.eigenvalues.size());
  int zeros = 0;
  for (Eigen::Index j = 0; j < model.eigenvalues.size(); ++j) {
    const cd lam = model.eigenvalues[j];
    if (lam == cd(0.0, 0.0)) {
      model.omegas[j] = cd(-std::numeric_limits<double>::infinity(), 0.0);
      ++zeros;
    } else {
      model.omegas[j] = std::log(lam) / model.dt;
    }
  }
  if (zeros > 0)
    model.warnings.push_back(std::to_string(zeros) + " zero eigenvalue(s) excluded from continuous-time reconstruction");

  if (opts.amplitudes == AmplitudeRule::optimal) {
    AmplitudeFit fit = optimal_amplitudes(model, snapshots);
    model.amplitudes = std::move(fit.amplitudes);
    model.amplitude_fallback = fit.least_squares_fallback;
    if (fit.least_squares_fallback)
      model.warnings.push_back("singular amplitude system; used least-squares solution");
  } else {
    model.amplitudes = initial_amplitudes(model, snapshots.col(0));
  }

  // Rank modes by amplitude magnitude.
  const Eigen::Index r = model.eigenvalues.size();
  std::vector<Eigen::Index> order(r);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(model.amplitudes[a]) > std::abs(model.amplitudes[b]);
  });
  const Eigen::Index keep = opts.keep ? std::min<Eigen::Index>(*opts.keep, r) : r;
  if (opts.keep && *opts.keep < 1) throw ConfigError("dmd: keep must be positive");
  DMDModel sorted = model;
  sorted.modes.resize(model.modes.rows(), keep);
  sorted.eigenvalues.resize(keep);
  sorted.omegas.resize(keep);
  sorted.amplitudes.resize(keep);
  for (Eigen::Index j = 0; j < keep; ++j) {
    sorted.modes.col(j) = model.modes.col(order[j]);
    sorted.eigenvalues[j] = model.eigenvalues[order[j]];
    sorted.omegas[j] = model.omegas[order[j]];
    sorted.amplitudes[j] = model.amplitudes[order[j]];
  }
  return sorted;
}

}  // namespace

DMDModel dmd_exact(const Eigen::Ref<const Eigen::MatrixXd>& snapshots, double dt, const DmdOptions& opts) {
  check_input(snapshots, dt);
  DMDModel model;
  model.dt = dt;
  model.algorithm = DmdAlgorithm::tu;
  model.amplitude_rule = opts.amplitudes;
  const SvdFactors f = thin_svd(snapshots.leftCols(snapshots.cols() - 1), opts, model);
  return finish(std::move(model), f, snapshots, opts);
}

DMDModel dmd_variant(const Eigen::Ref<const Eigen::MatrixXd>& snapshots, double dt, const DmdOptions& opts) {
  check_input(snapshots, dt);
  DMDModel model;
  model.dt = dt;
  model.algorithm = DmdAlgorithm::chen;
  model.amplitude_rule = opts.amplitudes;
  const SvdFactors f = gram_svd(snapshots.leftCols(snapshots.cols() - 1), opts, model);
  const double ratio = f.s[0] / f.s[f.s.size() - 1];
  if (ratio > opts.conditioning_limit) {
    model.ill_conditioned = true;
    std::ostringstream os;
    os << "Gram route: s_1/s_r = " << ratio << " (squared in S0^T S0); eigenvalues may be inaccurate";
    model.warnings.push_back(os.str());
  }
  return finish(std::move(model), f, snapshots, opts);
}

DMDModel build_dmd(DmdAlgorithm alg, const Eigen::Ref<const Eigen::MatrixXd>& snapshots, double dt,
                   const DmdOptions& opts) {
  return alg == DmdAlgorithm::tu ? dmd_exact(snapshots, dt, opts) : dmd_variant(snapshots, dt, opts);
}

Eigen::MatrixXcd vandermonde(const Eigen::Ref<const Eigen::VectorXcd>& eigenvalues, int cols) {
  Eigen::MatrixXcd v(eigenvalues.size(), cols);
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    cd p(1.0, 0.0);
    for (int k = 0; k < cols; ++k) {
      v(i, k) = p;
      p *= eigenvalues[i];
    }
  }
  return v;
}

AmplitudeFit optimal_amplitudes(const DMDModel& model, const Eigen::Ref<const Eigen::MatrixXd>& snapshots) {
  if (snapshots.rows() != model.dofs()) throw StructuralError("optimal_amplitudes: snapshot length differs from modes");
  const int cols = static_cast<int>(snapshots.cols());
  const Eigen::MatrixXcd vand = vandermonde(model.eigenvalues, cols);
  const Eigen::MatrixXcd gram = model.modes.adjoint() * model.modes;
  const Eigen::MatrixXcd vv = vand * vand.adjoint();
  const Eigen::MatrixXcd p = gram.cwiseProduct(vv.conjugate());
  const Eigen::MatrixXcd phis = model.modes.adjoint() * snapshots.cast<cd>();  // r x cols
  const Eigen::VectorXcd q = phis.cwiseProduct(vand.conjugate()).rowwise().sum();

  AmplitudeFit fit;
  Eigen::LLT<Eigen::MatrixXcd> llt(p);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    // Guard against a numerically rank-deficient but "successful" factorization.
    const Eigen::VectorXd ld = llt.matrixL().toDenseMatrix().diagonal().real();
    ok = ld.minCoeff() > 1e-7 * ld.maxCoeff();
  }
  if (ok) {
    fit.amplitudes = llt.solve(q);
  } else {
    fit.least_squares_fallback = true;
    fit.amplitudes = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd>(p).solve(q);
  }
  return fit;
}

Eigen::VectorXcd initial_amplitudes(const DMDModel& model, const Eigen::Ref<const Eigen::VectorXd>& u1) {
  if (u1.size() != model.dofs()) throw StructuralError("initial_amplitudes: state length differs from modes");
  if (model.rank() == 0) throw StructuralError("initial_amplitudes: empty model");
  return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd>(model.modes).solve(u1.cast<cd>().eval());
}

Eigen::VectorXd reconstruct(const DMDModel& model, double t) {
  if (t < 0.0) throw DomainError("reconstruct: t must be non-negative");
  Eigen::VectorXcd c(model.rank());
  for (int j = 0; j < model.rank(); ++j)
    c[j] = model.eigenvalues[j] == cd(0.0, 0.0) ? cd(0.0, 0.0) : model.amplitudes[j] * std::exp(model.omegas[j] * t);
  return (model.modes * c).real();
}

Eigen::MatrixXcd time_coefficients(const DMDModel& model, int first, int count) {
  const int r = model.rank();
  Eigen::MatrixXcd c(r, count);
  for (int j = 0; j < r; ++j) {
    const cd lam = model.eigenvalues[j];
    if (lam == cd(0.0, 0.0)) {
      for (int k = 0; k < count; ++k) c(j, k) = (first + k == 0) ? model.amplitudes[j] : cd(0.0, 0.0);
      continue;
    }
    cd p = model.amplitudes[j];
    if (first > 0) {
      for (int k = 0; k < first; ++k) p *= lam;
    } else {
      for (int k = 0; k < -first; ++k) p /= lam;
    }
    for (int k = 0; k < count; ++k) {
      c(j, k) = p;
      p *= lam;
    }
  }
  return c;
}

namespace {

// Row-major real/imaginary split of the modes: row i holds phi_{i, 0..r-1}.
struct SplitModes {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> re, im;
};

SplitModes split(const DMDModel& model) { return {model.modes.real(), model.modes.imag()}; }

inline double row_value(const SplitModes& m, const Eigen::MatrixXd& cre, const Eigen::MatrixXd& cim,
                        Eigen::Index i, Eigen::Index k) {
  double s = 0.0;
  const double* pr = m.re.data() + i * m.re.cols();
  const double* pi = m.im.data() + i * m.im.cols();
  const double* qr = cre.data() + k * cre.rows();
  const double* qi = cim.data() + k * cim.rows();
  for (Eigen::Index j = 0; j < m.re.cols(); ++j) s += pr[j] * qr[j] - pi[j] * qi[j];
  return s;
}

}  // namespace

Eigen::MatrixXd reconstruct_trajectory(const DMDModel& model, int first, int count) {
  const SplitModes m = split(model);
  const Eigen::MatrixXcd c = time_coefficients(model, first, count);
  const Eigen::MatrixXd cre = c.real();
  const Eigen::MatrixXd cim = c.imag();
  const Eigen::Index n = model.dofs();
  Eigen::MatrixXd out(n, count);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < count; ++k) out(i, k) = row_value(m, cre, cim, i, k);
  return out;
}

namespace reference {
Eigen::MatrixXd reconstruct_trajectory(const DMDModel& model, int first, int count) {
  const SplitModes m = split(model);
  const Eigen::MatrixXcd c = time_coefficients(model, first, count);
  const Eigen::MatrixXd cre = c.real();
  const Eigen::MatrixXd cim = c.imag();
  Eigen::MatrixXd out(model.dofs(), count);
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index k = 0; k < count; ++k) out(i, k) = row_value(m, cre, cim, i, k);
  return out;
}
}  // namespace reference

void write_dmd(const std::filesystem::path& path, const DMDModel& model) {
  io::BinaryWriter w(path, "HDMD1");
  w.u64(static_cast<std::uint64_t>(model.dofs()));
  w.u64(static_cast<std::uint64_t>(model.rank()));
  w.f64(model.dt);
  w.c128s({model.modes.data(), static_cast<std::size_t>(model.modes.size())});
  w.c128s({model.eigenvalues.data(), static_cast<std::size_t>(model.eigenvalues.size())});
  w.c128s({model.amplitudes.data(), static_cast<std::size_t>(model.amplitudes.size())});
  w.close();
}

DMDModel read_dmd(const std::filesystem::path& path) {
  io::BinaryReader r(path, "HDMD1");
  const auto n = r.u64();
  const auto rank = r.u64();
  const double dt = r.f64();
  if (n > (1ull << 32) || rank > n) throw IoError(path.string() + ": implausible header");
  const auto modes = r.c128s(n * rank);
  const auto eig = r.c128s(rank);
  const auto amp = r.c128s(rank);
  r.expect_end();
  DMDModel m;
  m.dt = dt;
  const auto ni = static_cast<Eigen::Index>(n);
  const auto ri = static_cast<Eigen::Index>(rank);
  m.modes = Eigen::Map<const Eigen::MatrixXcd>(modes.data(), ni, ri);
  m.eigenvalues = Eigen::Map<const Eigen::VectorXcd>(eig.data(), ri);
  m.amplitudes = Eigen::Map<const Eigen::VectorXcd>(amp.data(), ri);
  m.omegas.resize(ri);
  for (Eigen::Index j = 0; j < ri; ++j)
    m.omegas[j] = m.eigenvalues[j] == cd(0.0, 0.0) ? cd(-std::numeric_limits<double>::infinity(), 0.0)
                                                    : std::log(m.eigenvalues[j]) / dt;
  return m;
}

}  // namespace hrom
