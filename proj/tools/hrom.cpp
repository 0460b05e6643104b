// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: full-order Heston solves, POD/DMD model construction,
// reduced evaluation, mode-count sweeps and the semi-analytic reference price.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hrom/error.hpp"
#include "hrom/harness.hpp"

namespace {

using namespace hrom;

struct CommonFlags {
  std::string preset;
  std::string config;
  std::string modes;
  std::string dmd_alg;
  std::string amplitudes;
  std::string out;
  std::string include_initial;
  bool alt_bc = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--preset", f.preset, "european-call | butterfly | digital")
      ->check(CLI::IsMember({"european-call", "butterfly", "digital"}));
  cmd->add_option("--config", f.config, "flat key = value configuration file");
  cmd->add_option("--modes", f.modes, "mode count N or sweep range a..b");
  cmd->add_option("--dmd-alg", f.dmd_alg, "tu | chen")->check(CLI::IsMember({"tu", "chen"}));
  cmd->add_option("--amplitudes", f.amplitudes, "optimal | initial")->check(CLI::IsMember({"optimal", "initial"}));
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--include-initial", f.include_initial, "use u^0 as a snapshot (on | off)")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_flag("--alt-bc", f.alt_bc, "alternative European v_min boundary condition");
}

ExperimentConfig resolve(const CommonFlags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw IoError("cannot open config " + f.config);
    std::ostringstream text;
    // A --preset flag acts as the file's preset key; giving both is a repeated key.
    if (!f.preset.empty()) text << "preset = " << f.preset << '\n';
    text << in.rdbuf();
    c = parse_config(text.str());
  } else {
    c = config_from_preset(f.preset.empty() ? "european-call" : f.preset);
  }
  if (!f.modes.empty()) std::tie(c.modes_min, c.modes_max) = parse_mode_range(f.modes);
  if (!f.dmd_alg.empty()) c.dmd_alg = dmd_algorithm_from_string(f.dmd_alg);
  if (!f.amplitudes.empty()) c.amplitudes = amplitude_rule_from_string(f.amplitudes);
  if (!f.out.empty()) c.output_dir = f.out;
  if (!f.include_initial.empty()) c.include_initial = f.include_initial == "on";
  if (f.alt_bc) c.spec.alt_bc = true;
  c.validate();
  return c;
}

std::filesystem::path output_dir(const ExperimentConfig& c) {
  std::error_code ec;
  std::filesystem::create_directories(c.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + c.output_dir + ": " + ec.message());
  return c.output_dir;
}

void print_kv(const char* key, const std::string& value) { std::printf("%-18s %s\n", key, value.c_str()); }
void print_kv(const char* key, double value) { std::printf("%-18s %.10g\n", key, value); }

SnapshotSet fom_from(const Problem& pb, const std::string& snapshot_file) {
  if (snapshot_file.empty()) return run_fom(pb);
  SnapshotSet s = read_snapshots(snapshot_file);
  if (s.dofs() != pb.system.size() || s.grid.steps != pb.grid.steps)
    throw StructuralError(snapshot_file + " does not match the configured discretization");
  return s;
}

int cmd_solve_fom(const CommonFlags& f, bool csv) {
  const ExperimentConfig c = resolve(f);
  const Problem pb = build_problem(c);
  const SnapshotSet s = run_fom(pb);
  const auto dir = output_dir(c);
  write_snapshots(dir / "snapshots.bin", s);
  if (csv) write_snapshots_csv(dir / "snapshots.csv", s);
  print_kv("preset", c.preset);
  print_kv("dofs", std::to_string(pb.system.size()));
  print_kv("steps", std::to_string(pb.grid.steps));
  print_kv("price_T", pb.probe.apply(s.states.col(pb.grid.steps)));
  print_kv("assembly_s", pb.assembly_time);
  print_kv("factorization_s", s.factorization_time);
  print_kv("loads_s", s.load_time);
  print_kv("stepping_s", s.wall_time);
  print_kv("snapshots", (dir / "snapshots.bin").string());
  return 0;
}

int cmd_build_pod(const CommonFlags& f, const std::string& snapshot_file) {
  const ExperimentConfig c = resolve(f);
  const Problem pb = build_problem(c);
  const SnapshotSet s = fom_from(pb, snapshot_file);
  PodOptions opts;
  opts.eps = c.pod_eps;
  opts.block_size = pb.system.block_size;
  if (!f.modes.empty()) opts.max_modes = c.modes_max;
  const PODBasis basis = compute_pod_basis(s.matrix(c.include_initial), pb.system.mass, opts);
  const auto path = output_dir(c) / "pod.bin";
  write_pod(path, basis);
  print_kv("modes", std::to_string(basis.size()));
  print_kv("rank", std::to_string(basis.rank()));
  print_kv("information", information_content(basis.singular_values, basis.size()));
  print_kv("basis", path.string());
  return 0;
}

int cmd_build_dmd(const CommonFlags& f, const std::string& snapshot_file) {
  const ExperimentConfig c = resolve(f);
  const Problem pb = build_problem(c);
  const SnapshotSet s = fom_from(pb, snapshot_file);
  DmdOptions opts;
  opts.rank_tol = c.dmd_rank_tol;
  opts.amplitudes = c.amplitudes;
  if (!f.modes.empty()) opts.rank = c.modes_max;
  const DMDModel model = build_dmd(c.dmd_alg, s.matrix(c.include_initial), pb.grid.dt, opts);
  for (const std::string& w : model.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  const auto path = output_dir(c) / "dmd.bin";
  write_dmd(path, model);
  print_kv("algorithm", to_string(model.algorithm));
  print_kv("amplitudes", to_string(model.amplitude_rule));
  print_kv("rank", std::to_string(model.rank()));
  print_kv("condition_ratio", model.condition_ratio);
  print_kv("model", path.string());
  return 0;
}

// Price history at the evaluation point from a stored POD basis or DMD model,
// compared against the FOM.
int cmd_evaluate(const CommonFlags& f, const std::string& model_file, const std::string& snapshot_file) {
  const ExperimentConfig c = resolve(f);
  const Problem pb = build_problem(c);
  const SnapshotSet s = fom_from(pb, snapshot_file);
  const int count = pb.grid.steps + 1;

  std::string magic(5, '\0');
  {
    std::ifstream in(model_file, std::ios::binary);
    if (!in || !in.read(magic.data(), 5)) throw IoError("cannot read " + model_file);
  }
  Eigen::MatrixXd states;
  std::string kind;
  if (magic == "HPOD1") {
    const PODBasis basis = read_pod(model_file);
    const ReducedSystem red = reduce_system(pb.system, precompute_loads(pb.system, pb.grid), basis, pb.u0);
    states = lift(basis, solve_rom(red, pb.grid).states);
    kind = "pod";
  } else if (magic == "HDMD1") {
    const DMDModel model = read_dmd(model_file);
    if (std::abs(model.dt - pb.grid.dt) > 1e-12) throw StructuralError("model time step differs from the grid");
    states = reconstruct_trajectory(model, c.include_initial ? 0 : -1, count);
    kind = "dmd";
  } else {
    throw IoError(model_file + ": not a POD or DMD model file");
  }
  if (states.rows() != s.dofs()) throw StructuralError("model size differs from the discretization");

  const Eigen::VectorXd fom_p = pb.probe.apply_columns(s.states).transpose();
  const Eigen::VectorXd rom_p = pb.probe.apply_columns(states).transpose();
  const Eigen::VectorXd err = relative_price_error(fom_p, rom_p);
  std::ostringstream os;
  os << "step,t,price_fom,price_rom,price_rel_err\n";
  for (int k = 0; k < count; ++k) {
    char line[160];
    std::snprintf(line, sizeof line, "%d,%.6f,%.12e,%.12e,%.10e\n", k, pb.grid.time(k), fom_p[k], rom_p[k], err[k]);
    os << line;
  }
  const auto path = output_dir(c) / "evaluate.csv";
  std::ofstream out(path);
  if (!(out << os.str())) throw IoError("cannot write " + path.string());
  print_kv("model", kind);
  print_kv("price_fom_T", fom_p[count - 1]);
  print_kv("price_rom_T", rom_p[count - 1]);
  print_kv("price_rel_err_T", err[count - 1]);
  print_kv("frobenius_rel_err", relative_frobenius_error(s.states, states));
  print_kv("series", path.string());
  return 0;
}

int cmd_sweep(const CommonFlags& f) {
  const ExperimentConfig c = resolve(f);
  const ErrorReport r = run_experiment(c);
  std::fputs(sweep_csv(r).c_str(), stdout);
  std::fprintf(stderr, "wrote %s/{sweep.csv,price_series.csv,summary.txt}\n", c.output_dir.c_str());
  return 0;
}

int cmd_oracle(const CommonFlags& f, bool compare) {
  const ExperimentConfig c = resolve(f);
  if (c.spec.kind != OptionKind::european_call)
    throw ConfigError("oracle-price: the characteristic-function price covers European calls only");
  const double ref = reference_price_heston_cf(c.spec.params);
  print_kv("oracle_price", ref);
  if (compare) {
    const Problem pb = build_problem(c);
    const SnapshotSet s = run_fom(pb);
    const double fom = pb.probe.apply(s.states.col(pb.grid.steps));
    print_kv("fom_price", fom);
    print_kv("rel_diff", std::abs(fom - ref) / std::abs(ref));
  }
  return 0;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return 2;
  if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const StructuralError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e)) return 4;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discontinuous Galerkin Heston pricer with POD and DMD reduced models"};
  app.require_subcommand(1);

  CommonFlags f;
  bool csv = false;
  bool compare = false;
  std::string snapshots;
  std::string model;

  auto* solve = app.add_subcommand("solve-fom", "assemble and time-step the full-order model");
  add_common(solve, f);
  solve->add_flag("--csv", csv, "also write snapshots.csv");

  auto* pod = app.add_subcommand("build-pod", "mass-weighted POD basis from FOM snapshots");
  add_common(pod, f);
  pod->add_option("--snapshots", snapshots, "reuse a snapshots.bin instead of solving");

  auto* dmd = app.add_subcommand("build-dmd", "DMD model from FOM snapshots");
  add_common(dmd, f);
  dmd->add_option("--snapshots", snapshots, "reuse a snapshots.bin instead of solving");

  auto* eval = app.add_subcommand("evaluate", "price history of a stored POD/DMD model against the FOM");
  add_common(eval, f);
  eval->add_option("--model", model, "pod.bin or dmd.bin")->required();
  eval->add_option("--snapshots", snapshots, "reuse a snapshots.bin instead of solving");

  auto* sweep = app.add_subcommand("sweep", "error and speed-up tables over a range of mode counts");
  add_common(sweep, f);

  auto* oracle = app.add_subcommand("oracle-price", "semi-analytic Heston European call price");
  add_common(oracle, f);
  oracle->add_flag("--compare", compare, "also solve the FOM and report the difference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*solve) return cmd_solve_fom(f, csv);
    if (*pod) return cmd_build_pod(f, snapshots);
    if (*dmd) return cmd_build_dmd(f, snapshots);
    if (*eval) return cmd_evaluate(f, model, snapshots);
    if (*sweep) return cmd_sweep(f);
    if (*oracle) return cmd_oracle(f, compare);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e);
  }
  return 0;
}
