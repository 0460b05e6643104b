// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hrom/error.hpp"
#include "hrom/harness.hpp"

namespace hrom {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string fmt(const char* spec, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, value);
  return buf;
}

// Probe applied to complex modes: psi_j = u_h^{(j)}(point).
Eigen::RowVectorXcd probe_modes(const PointProbe& probe, const Eigen::MatrixXcd& modes) {
  const Eigen::RowVectorXd re = probe.apply_columns(modes.real());
  const Eigen::RowVectorXd im = probe.apply_columns(modes.imag());
  Eigen::RowVectorXcd psi(modes.cols());
  for (Eigen::Index j = 0; j < psi.size(); ++j) psi[j] = {re[j], im[j]};
  return psi;
}

Eigen::VectorXd dmd_prices(const DMDModel& model, const Eigen::RowVectorXcd& psi, int first, int count) {
  return (psi * time_coefficients(model, first, count)).real().transpose();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("writing " + path.string() + " failed");
}

template <typename Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw DomainError(std::string(stage) + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(stage) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(stage) + ": " + e.what());
  } catch (const StructuralError& e) {
    throw StructuralError(std::string(stage) + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError(std::string(stage) + ": " + e.what());
  }
}

}  // namespace

Problem build_problem(const ExperimentConfig& config) {
  config.validate();
  return staged("assembly", [&] {
    const auto start = clock_type::now();
    Problem pb;
    pb.config = config;
    const OptionSpec& spec = config.spec;
    const CoefficientField field = coefficients(spec.params);
    Mesh mesh = classify_edges(build_structured_mesh(config.domain, config.cells_v, config.cells_x), field,
                               boundary_layout(spec));
    auto space = std::make_shared<const DGSpace>(std::move(mesh), config.degree);
    const AssemblyOptions opts{config.penalty};

    pb.system.mass = assemble_mass(*space);
    pb.system.stiffness = assemble_stiffness(*space, field, opts);
    pb.system.block_size = space->local_dofs();
    pb.system.penalty_constant = config.penalty;
    if (has_homogeneous_boundary_data(spec)) {
      pb.system.zero_load = true;
    } else {
      const RectDomain domain = config.domain;
      pb.system.load = [space, field, spec, domain, opts](double tau) {
        return assemble_load(*space, field, boundary_data(spec, domain, tau), opts);
      };
    }
    pb.u0 = l2_project(*space, [spec](const Point& z) { return payoff(spec, z[0], z[1]); });
    pb.grid = TimeGrid::uniform(spec.params.T, config.dt);
    pb.eval_point = Point(spec.params.v0, std::log(spec.params.S0 / spec.reference_strike()));
    pb.probe = make_probe(*space, pb.eval_point);
    pb.space = std::move(space);
    pb.assembly_time = seconds_since(start);
    return pb;
  });
}

SnapshotSet run_fom(const Problem& problem) {
  return staged("fom", [&] { return solve_fom(problem.system, problem.u0, problem.grid); });
}

int ErrorReport::modes_for_accuracy(const std::string& method, double tol) const {
  int best = -1;
  for (const SweepRow& r : rows)
    if (r.method == method && r.frobenius_rel_err <= tol && (best < 0 || r.n_modes < best)) best = r.n_modes;
  return best;
}

const SweepRow& ErrorReport::row(const std::string& method, int n_modes) const {
  for (const SweepRow& r : rows)
    if (r.method == method && r.n_modes == n_modes) return r;
  throw StructuralError("report has no row " + method + " N=" + std::to_string(n_modes));
}

ErrorReport run_sweep(const Problem& problem, const SnapshotSet& fom) {
  const ExperimentConfig& cfg = problem.config;
  const int count = problem.grid.steps + 1;
  if (fom.states.cols() != count || fom.states.rows() != problem.system.size())
    throw StructuralError("sweep: snapshot set does not match the problem");

  ErrorReport rep;
  rep.preset = cfg.preset;
  rep.dofs = problem.system.size();
  rep.steps = problem.grid.steps;
  rep.assembly_s = problem.assembly_time;
  rep.fom_factorization_s = fom.factorization_time;
  rep.fom_load_s = fom.load_time;
  rep.fom_stepping_s = fom.wall_time;
  rep.fom_price_series = problem.probe.apply_columns(fom.states).transpose();
  rep.fom_price_T = rep.fom_price_series[count - 1];
  const double fom_time = fom.wall_time;
  const int repeats = cfg.timing_repeats;

  const Eigen::MatrixXd snapshots = fom.matrix(cfg.include_initial);
  const int first = cfg.include_initial ? 0 : -1;

  // POD: one SVD, truncated per N.
  const Eigen::MatrixXd loads = staged("pod", [&] { return precompute_loads(problem.system, problem.grid); });
  PodOptions pod_opts;
  pod_opts.eps = 0.0;
  pod_opts.max_modes = cfg.modes_max;
  pod_opts.block_size = problem.system.block_size;
  auto start = clock_type::now();
  const PODBasis full = staged("pod", [&] { return compute_pod_basis(snapshots, problem.system.mass, pod_opts); });
  const double basis_time = seconds_since(start);

  for (int n = cfg.modes_min; n <= cfg.modes_max; ++n) {
    staged("pod", [&] {
      SweepRow row;
      row.method = "pod";
      row.n_modes = n;
      const PODBasis basis = full.truncated(std::min(n, full.size()));
      row.effective_modes = basis.size();
      start = clock_type::now();
      const ReducedSystem red = reduce_system(problem.system, loads, basis, problem.u0);
      row.offline_s = basis_time + seconds_since(start);

      const Eigen::RowVectorXd c = problem.probe.apply_columns(basis.modes);
      const RomTrajectory traj = solve_rom(red, problem.grid);
      row.price_series = (c * traj.states).transpose();
      double sink = 0.0;
      row.online_s = time_call([&] { sink += (c * solve_rom(red, problem.grid).states).sum(); }, repeats);
      Eigen::MatrixXd field;
      row.online_field_s = time_call([&] { field = lift(basis, traj.states); }, repeats);
      (void)sink;

      row.frobenius_rel_err = relative_frobenius_error(fom.states, field);
      row.price_error_series = relative_price_error(rep.fom_price_series, row.price_series);
      row.price_rel_err_T = row.price_error_series[count - 1];
      row.speedup = benchmark_speedup(fom_time, row.online_s);
      rep.rows.push_back(std::move(row));
    });
  }

  for (const DmdAlgorithm alg : {DmdAlgorithm::tu, DmdAlgorithm::chen}) {
    const std::string method = std::string("dmd_") + to_string(alg);
    for (int n = cfg.modes_min; n <= cfg.modes_max; ++n) {
      staged(method.c_str(), [&] {
        SweepRow row;
        row.method = method;
        row.n_modes = n;
        DmdOptions opts;
        opts.rank = n;
        opts.rank_tol = cfg.dmd_rank_tol;
        opts.amplitudes = cfg.amplitudes;
        start = clock_type::now();
        const DMDModel model = build_dmd(alg, snapshots, problem.grid.dt, opts);
        row.offline_s = seconds_since(start);
        row.effective_modes = model.rank();
        for (const std::string& w : model.warnings) rep.warnings.push_back(method + " N=" + std::to_string(n) + ": " + w);

        const Eigen::RowVectorXcd psi = probe_modes(problem.probe, model.modes);
        row.price_series = dmd_prices(model, psi, first, count);
        double sink = 0.0;
        row.online_s = time_call([&] { sink += dmd_prices(model, psi, first, count).sum(); }, repeats);
        Eigen::MatrixXd field;
        row.online_field_s = time_call([&] { field = reconstruct_trajectory(model, first, count); }, repeats);
        (void)sink;

        row.frobenius_rel_err = relative_frobenius_error(fom.states, field);
        row.price_error_series = relative_price_error(rep.fom_price_series, row.price_series);
        row.price_rel_err_T = row.price_error_series[count - 1];
        row.speedup = benchmark_speedup(fom_time, row.online_s);
        rep.rows.push_back(std::move(row));
      });
    }
  }
  return rep;
}

std::string sweep_csv(const ErrorReport& report) {
  std::ostringstream os;
  os << "method,n_modes,frobenius_rel_err,price_rel_err_T,offline_s,online_s,speedup\n";
  for (const SweepRow& r : report.rows)
    os << r.method << ',' << r.n_modes << ',' << fmt("%.10e", r.frobenius_rel_err) << ','
       << fmt("%.10e", r.price_rel_err_T) << ',' << fmt("%.6e", r.offline_s) << ',' << fmt("%.6e", r.online_s)
       << ',' << fmt("%.2f", r.speedup) << '\n';
  return os.str();
}

void write_report(const ErrorReport& report, const ExperimentConfig& config, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  write_file(dir / "sweep.csv", sweep_csv(report));

  std::ostringstream ps;
  ps << "method,n_modes,step,t,price_fom,price_rom,price_rel_err\n";
  const double dt = config.dt;
  for (const SweepRow& r : report.rows)
    for (Eigen::Index k = 0; k < r.price_series.size(); ++k)
      ps << r.method << ',' << r.n_modes << ',' << k << ',' << fmt("%.6f", k * dt) << ','
         << fmt("%.12e", report.fom_price_series[k]) << ',' << fmt("%.12e", r.price_series[k]) << ','
         << fmt("%.10e", r.price_error_series[k]) << '\n';
  write_file(dir / "price_series.csv", ps.str());

  std::ostringstream s;
  const HestonParams& p = config.spec.params;
  s << "preset            " << report.preset << '\n'
    << "option            " << to_string(config.spec.kind) << (config.spec.alt_bc ? " (alt v_min condition)" : "")
    << '\n'
    << "heston            kappa=" << p.kappa << " theta=" << p.theta << " sigma=" << p.sigma << " rho=" << p.rho
    << " r_d=" << p.r_d << " r_f=" << p.r_f << " T=" << p.T << " K=" << p.K << '\n'
    << "grid              N_v=" << config.cells_v << " N_x=" << config.cells_x << " degree=" << config.degree
    << " dofs=" << report.dofs << " dt=" << config.dt << " steps=" << report.steps << '\n'
    << "snapshots         " << (config.include_initial ? "u^0..u^J" : "u^1..u^J") << '\n'
    << "amplitudes        " << to_string(config.amplitudes) << '\n'
    << "evaluation point  v0=" << p.v0 << " S0=" << p.S0 << '\n'
    << "FOM price at T    " << fmt("%.10f", report.fom_price_T) << '\n'
    << "FOM timings [s]   assembly=" << fmt("%.4f", report.assembly_s)
    << " factorization=" << fmt("%.4f", report.fom_factorization_s) << " loads=" << fmt("%.4f", report.fom_load_s)
    << " stepping=" << fmt("%.4f", report.fom_stepping_s) << '\n';
  for (const char* m : {"pod", "dmd_tu", "dmd_chen"}) {
    const int n = report.modes_for_accuracy(m, 1e-3);
    s << "modes for 1e-3    " << m << ": " << (n < 0 ? std::string("not reached") : std::to_string(n)) << '\n';
  }
  s << "online time is the reduced price history at the evaluation point; lifting the\n"
       "full field is reported below as field_s and is not part of the speed-up.\n\n";
  s << "method    N  eff  frob_err      price_err_T   online_s      field_s       speedup\n";
  for (const SweepRow& r : report.rows) {
    char line[200];
    std::snprintf(line, sizeof line, "%-8s %2d  %3d  %.4e    %.4e    %.4e    %.4e    %.1f\n", r.method.c_str(),
                  r.n_modes, r.effective_modes, r.frobenius_rel_err, r.price_rel_err_T, r.online_s,
                  r.online_field_s, r.speedup);
    s << line;
  }
  if (!report.warnings.empty()) {
    s << "\nwarnings\n";
    for (const std::string& w : report.warnings) s << "  " << w << '\n';
  }
  write_file(dir / "summary.txt", s.str());
}

ErrorReport run_experiment(const ExperimentConfig& config) {
  const Problem problem = build_problem(config);
  const SnapshotSet fom = run_fom(problem);
  ErrorReport report = run_sweep(problem, fom);
  write_report(report, config, config.output_dir);
  return report;
}

}  // namespace hrom
