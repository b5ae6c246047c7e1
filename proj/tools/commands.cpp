#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "arnoldi_lindblad/krylov.hpp"
#include "arnoldi_lindblad/oracle.hpp"

namespace al_cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<NamedObservable> number_observables(const HilbertSpec& space) {
  std::vector<NamedObservable> out;
  int l = 1;
  for (auto& op : site_number_operators(space)) out.push_back({"n" + std::to_string(l++), std::move(op)});
  return out;
}

nlohmann::json steady_observables(const Operator& rho, const HilbertSpec& space) {
  nlohmann::json j;
  for (const auto& obs : number_observables(space)) j[obs.name] = expectation(obs.op, rho).real();
  return j;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << std::setw(2) << j << '\n';
}

void write_superoperator(const fs::path& path, const Matrix& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  const std::int64_t rows = m.rows();
  const std::int64_t cols = m.cols();
  f.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  f.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  // Row-major, matching the vectorization convention.
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v[2] = {m(r, c).real(), m(r, c).imag()};
      f.write(reinterpret_cast<const char*>(v), sizeof v);
    }
}

Operator seed_state(const LindbladModel& model, const RunConfig& cfg) {
  return random_density_matrix(model.space(), cfg.seed).op();
}

ArnoldiOptions arnoldi_options(const RunConfig& cfg, int m) {
  ArnoldiOptions o;
  o.m = m;
  o.tol = cfg.tol;
  o.check_every = cfg.check_every;
  o.max_iter = cfg.max_iter;
  o.integrator = cfg.integrator;
  o.threads = cfg.threads;
  return o;
}

bool is_partial(const SpectralResult& r, int m) {
  const int wanted = std::min<int>(m, static_cast<int>(r.pairs.size()));
  if (wanted < m) return true;
  for (int i = 0; i < wanted; ++i)
    if (!r.pairs[i].converged) return true;
  return false;
}

ExactSpectrum oracle_spectrum(const SuperoperatorMatrix& mat, bool vectors) {
  const auto& space = mat.space;
  if (!space.is_sector() && space.sites == 2) {
    try {
      return exact_spectrum_symmetric(mat, site_swap_permutation(space), vectors);
    } catch (const std::invalid_argument&) {
      // no site-exchange symmetry: full ED below
    }
  }
  return exact_spectrum(mat, vectors);
}

std::string size_guard_message(const SizeGuardError& e) {
  return std::string(e.what()) + "; use the `spectrum` command (Arnoldi-Lindblad) for this size";
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& log) {
  const auto [model, interval, label] = build_model(cfg);
  log << "spectrum: " << label << ", dim " << model.dim() << ", T " << interval << ", m " << cfg.m << '\n';
  const auto result =
      arnoldi_lindblad::arnoldi_lindblad(model, seed_state(model, cfg), interval, arnoldi_options(cfg, cfg.m));

  auto j = to_json(result);
  j["model"] = label;
  j["config"] = cfg.to_json();
  if (const auto period = model.period()) {
    j["floquet"] = true;
    j["period"] = *period;
    j["omega"] = model.drive()->omega;
  }
  try {
    const auto ss = steady_state_extract(result);
    j["steady_state"] = {{"observables", steady_observables(ss.op(), model.space())},
                         {"min_eigenvalue", ss.min_eigenvalue()}};
  } catch (const SteadyStateError& e) {
    j["steady_state"] = {{"error", e.what()}};
    try {
      const auto raw = steady_state_extract(result, std::numeric_limits<double>::infinity());
      j["steady_state"]["unvalidated_observables"] = steady_observables(raw.op(), model.space());
      j["steady_state"]["min_eigenvalue"] = raw.min_eigenvalue();
    } catch (const SteadyStateError&) {
    }
  }
  fs::create_directories(cfg.out);
  write_json(fs::path(cfg.out) / "spectrum.json", j);
  if (cfg.dump_eigenmatrices) {
    std::vector<Operator> ops;
    for (const auto& p : result.pairs) ops.push_back(p.eigenmatrix);
    write_operators((fs::path(cfg.out) / "eigenmatrices.bin").string(), ops);
  }
  log << "  " << result.iterations << " iterations, " << to_string(result.termination) << ", "
      << result.converged_count() << " converged, " << result.wall_time << " s\n";
  for (const auto& p : result.pairs)
    log << "  lambda " << p.lambda << "  residual " << p.residual << (p.converged ? "" : "  (unconverged)") << '\n';
  return is_partial(result, cfg.m) ? kPartial : kSuccess;
}

void dump_oracle(const RunConfig& cfg, const ExactSpectrum& spec, const SuperoperatorMatrix& mat) {
  if (cfg.dump_eigenmatrices)
    write_operators((fs::path(cfg.out) / "eigenmatrices.bin").string(), spec.eigenmatrices);
  if (cfg.dump_matrix) write_superoperator(fs::path(cfg.out) / "superoperator.bin", mat.data);
}

int cmd_oracle_ed(const RunConfig& cfg, std::ostream& log) {
  const auto [model, interval, label] = build_model(cfg);
  if (model.is_time_dependent())
    throw ConfigError("oracle-ed needs a time-independent model; use floquet-map for driven models");
  try {
    const auto start = Clock::now();
    const auto mat = build_liouvillian_matrix(model, 0.0, OracleGuard{cfg.oracle_guard});
    const auto spec = oracle_spectrum(mat, true);
    const double wall = seconds_since(start);
    auto j = to_json(spec, interval, static_cast<int>(spec.values.size()), model.hash());
    j["model"] = label;
    j["wall_time"] = wall;
    j["config"] = cfg.to_json();
    if (spec.steady_index >= 0) {
      Operator ss = spec.eigenmatrices[spec.steady_index];
      ss *= 1.0 / ss.trace();
      j["steady_state"] = {{"observables", steady_observables(ss, model.space())}};
    }
    fs::create_directories(cfg.out);
    write_json(fs::path(cfg.out) / "spectrum.json", j);
    dump_oracle(cfg, spec, mat);
    log << "oracle-ed: " << label << ", " << spec.values.size() << " eigenvalues, " << wall << " s\n";
    return kSuccess;
  } catch (const SizeGuardError& e) {
    log << "oracle-ed: " << size_guard_message(e) << '\n';
    return kSizeGuard;
  }
}

int cmd_floquet_map(const RunConfig& cfg, std::ostream& log) {
  const auto [model, interval, label] = build_model(cfg);
  if (!model.is_time_dependent()) throw ConfigError("floquet-map needs a periodically driven model");
  try {
    const auto start = Clock::now();
    const auto mat = floquet_map_matrix(model, cfg.integrator, cfg.threads, OracleGuard{cfg.oracle_guard});
    const double build_time = seconds_since(start);
    const auto spec = exact_spectrum(mat, true);
    const double wall = seconds_since(start);
    auto j = to_json(spec, mat.period, static_cast<int>(spec.values.size()), model.hash());
    j["model"] = label;
    j["floquet"] = true;
    j["period"] = mat.period;
    j["omega"] = model.drive()->omega;
    j["map_build_time"] = build_time;
    j["wall_time"] = wall;
    j["config"] = cfg.to_json();
    fs::create_directories(cfg.out);
    write_json(fs::path(cfg.out) / "spectrum.json", j);
    dump_oracle(cfg, spec, mat);
    log << "floquet-map: " << label << ", " << mat.data.rows() << "x" << mat.data.cols() << " map, " << wall
        << " s\n";
    return kSuccess;
  } catch (const SizeGuardError& e) {
    log << "floquet-map: " << size_guard_message(e) << '\n';
    return kSizeGuard;
  }
}

std::vector<double> sample_times(double t_final, int samples) {
  std::vector<double> t(samples);
  for (int i = 0; i < samples; ++i) t[i] = t_final * i / (samples - 1);
  return t;
}

int cmd_evolve(const RunConfig& cfg, std::ostream& log) {
  const auto [model, interval, label] = build_model(cfg);
  const auto start = Clock::now();
  const auto traj = observable_trajectory(model, seed_state(model, cfg), sample_times(cfg.t_final, cfg.samples),
                                          number_observables(model.space()), cfg.integrator);
  fs::create_directories(cfg.out);
  std::ofstream f(fs::path(cfg.out) / "trajectory.csv");
  write_trajectory_csv(f, traj);
  write_json(fs::path(cfg.out) / "run.json",
             {{"model", label}, {"model_hash", model.hash()}, {"wall_time", seconds_since(start)},
              {"config", cfg.to_json()}});
  log << "evolve: " << label << ", " << traj.times.size() << " samples to t = " << cfg.t_final << '\n';
  return kSuccess;
}

int cmd_fit_baseline(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.input) throw ConfigError("fit-baseline needs --input (a trajectory CSV)");
  std::ifstream in(*cfg.input);
  if (!in) throw ConfigError("cannot open " + *cfg.input);
  Trajectory traj;
  try {
    traj = read_trajectory_csv(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad trajectory CSV: ") + e.what());
  }
  const auto col = std::find(traj.names.begin(), traj.names.end(), cfg.observable);
  if (col == traj.names.end()) throw ConfigError("observable '" + cfg.observable + "' not in " + *cfg.input);
  const auto k = static_cast<std::size_t>(col - traj.names.begin());
  std::vector<cplx> y;
  for (const auto& row : traj.values) y.push_back(row[k]);

  const auto fit = exp_fit_extrapolate(traj.times, y, cfg.fit_window);
  nlohmann::json j{{"observable", cfg.observable},
                   {"steady", fit.steady},
                   {"re_amplitude", fit.amplitude.real()},
                   {"im_amplitude", fit.amplitude.imag()},
                   {"re_lambda", fit.rate.real()},
                   {"im_lambda", fit.rate.imag()},
                   {"residual", fit.residual},
                   {"oscillatory", fit.oscillatory},
                   {"converged", fit.converged},
                   {"window_start", cfg.fit_window},
                   {"config", cfg.to_json()}};
  fs::create_directories(cfg.out);
  write_json(fs::path(cfg.out) / "fit.json", j);
  log << "fit-baseline: ss " << fit.steady << ", lambda " << fit.rate << (fit.converged ? "" : " (not converged)")
      << '\n';
  return fit.converged ? kSuccess : kPartial;
}

struct BenchRow {
  std::string task;
  std::string method;
  double wall_time;
  double eig_error;
  double ss_error;
};

/// Largest distance from each of the first `count` converged values to the
/// nearest oracle eigenvalue.
double max_eigenvalue_error(const SpectralResult& r, const Vector& exact, int count) {
  std::vector<cplx> got;
  for (int i = 0; i < std::min<int>(count, static_cast<int>(r.pairs.size())); ++i)
    if (r.pairs[i].converged) got.push_back(r.pairs[i].lambda);
  if (got.empty()) return std::numeric_limits<double>::infinity();
  const std::vector<cplx> ref(exact.data(), exact.data() + exact.size());
  double worst = 0.0;
  for (const auto& m : match_eigenvalues(got, ref)) worst = std::max(worst, m.distance);
  return worst;
}

int cmd_bench(const RunConfig& cfg, std::ostream& log) {
  const auto [model, interval, label] = build_model(cfg);
  if (model.is_time_dependent()) throw ConfigError("bench runs on time-independent models");
  const Operator n1 = site_number_operators(model.space()).front();
  const Operator rho0 = seed_state(model, cfg);
  std::vector<BenchRow> rows;

  ExactSpectrum spec;
  double ed_time = 0.0;
  try {
    const auto start = Clock::now();
    const auto mat = build_liouvillian_matrix(model, 0.0, OracleGuard{cfg.oracle_guard});
    spec = oracle_spectrum(mat, true);
    ed_time = seconds_since(start);
  } catch (const SizeGuardError& e) {
    log << "bench: " << size_guard_message(e) << '\n';
    return kSizeGuard;
  }
  if (spec.steady_index < 0) throw std::runtime_error("bench: oracle found no steady state");
  Operator ss = spec.eigenmatrices[spec.steady_index];
  ss *= 1.0 / ss.trace();
  const double n1_exact = expectation(n1, ss).real();
  // Slowest decay eigenvalue other than the steady one, for the fit rows.
  cplx lambda1{0.0, 0.0};
  for (int i = 0; i < spec.values.size(); ++i)
    if (i != spec.steady_index) {
      lambda1 = spec.values[i];
      break;
    }
  log << "bench: " << label << ", oracle ED " << ed_time << " s, <n1>_ss " << n1_exact << '\n';

  int exit_code = kSuccess;
  for (int m : {1, 5, 10, 50}) {
    const std::string task = "rho" + std::to_string(m - 1);
    const auto start = Clock::now();
    const auto r = arnoldi_lindblad::arnoldi_lindblad(model, rho0, interval, arnoldi_options(cfg, m));
    const double wall = seconds_since(start);
    if (is_partial(r, m)) exit_code = kPartial;
    double ss_err = std::numeric_limits<double>::infinity();
    try {
      const auto est = steady_state_extract(r, std::numeric_limits<double>::infinity());
      ss_err = std::abs(expectation(n1, est.op()).real() - n1_exact) / std::abs(n1_exact);
    } catch (const SteadyStateError&) {
    }
    rows.push_back({task, "arnoldi-lindblad", wall, max_eigenvalue_error(r, spec.values, m), ss_err});
    rows.push_back({task, "oracle-ed", ed_time, 0.0, 0.0});

    // Plain trajectory over the same simulated time, snapshot every T.
    const auto fit_start = Clock::now();
    const int snaps = std::max(r.iterations, 9);
    std::vector<double> times(snaps + 1);
    for (int i = 0; i <= snaps; ++i) times[i] = i * interval;
    const auto traj = observable_trajectory(model, rho0, times, {{"n1", n1}}, cfg.integrator);
    std::vector<cplx> y;
    for (const auto& row : traj.values) y.push_back(row[0]);
    const double window = std::min(cfg.fit_window, 0.5 * times.back());
    const auto fit = exp_fit_extrapolate(times, y, window);
    rows.push_back({task, "exp-fit", seconds_since(fit_start), std::abs(fit.rate - lambda1),
                    std::abs(fit.steady - n1_exact) / std::abs(n1_exact)});
    log << "  " << task << ": arnoldi " << wall << " s, " << r.iterations << " iterations\n";
  }

  fs::create_directories(cfg.out);
  std::ofstream f(fs::path(cfg.out) / "bench.csv");
  f << "task,method,wall_time,max_eigenvalue_error,ss_rel_error\n" << std::setprecision(10);
  for (const auto& row : rows)
    f << row.task << ',' << row.method << ',' << row.wall_time << ',' << row.eig_error << ',' << row.ss_error << '\n';
  write_json(fs::path(cfg.out) / "run.json",
             {{"model", label}, {"model_hash", model.hash()}, {"config", cfg.to_json()}});
  return exit_code;
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& log) {
  switch (cfg.command) {
    case Command::Spectrum: return cmd_spectrum(cfg, log);
    case Command::OracleEd: return cmd_oracle_ed(cfg, log);
    case Command::FloquetMap: return cmd_floquet_map(cfg, log);
    case Command::Evolve: return cmd_evolve(cfg, log);
    case Command::Bench: return cmd_bench(cfg, log);
    case Command::FitBaseline: return cmd_fit_baseline(cfg, log);
  }
  return kConfigError;
}

}  // namespace al_cli
