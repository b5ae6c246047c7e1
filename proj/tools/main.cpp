#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace al_cli;
  CLI::App app{"Arnoldi-Lindblad spectra, oracle ED and baselines for Lindblad models"};
  app.set_version_flag("--version", "0.1.0");

  std::string command;
  std::optional<std::string> config_path;
  Overrides o;
  app.add_option("command", command, "spectrum | oracle-ed | floquet-map | evolve | bench | fit-baseline")
      ->required();
  auto* preset = app.add_option("--preset", o.preset, "dimer-fig3 | trimer-fig5 | tc-dimer-fig6 | floquet-fig8");
  app.add_option("--config", config_path, "INI run file (see config/schema.ini)")->excludes(preset);
  app.add_option("--size", o.size, "n_max (DDBH) or N (Floquet dimer) override");
  app.add_option("--m", o.m, "number of wanted eigenpairs");
  app.add_option("--T", o.interval, "snapshot interval");
  app.add_option("--tol", o.tol, "residual tolerance");
  app.add_option("--seed", o.seed, "seed of the random initial density matrix");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--threads", o.threads, "worker cap (0 = hardware)");
  app.add_option("--check-every", o.check_every, "iterations between convergence checks");
  app.add_option("--max-iter", o.max_iter, "iteration cap");
  app.add_option("--t-final", o.t_final, "evolve: final time");
  app.add_option("--input", o.input, "fit-baseline: trajectory CSV");
  app.add_option("--observable", o.observable, "fit-baseline: column name, e.g. n1");
  app.add_option("--fit-window", o.fit_window, "fit-baseline: first time included in the fit");
  app.add_flag("--dump-eigenmatrices", o.dump_eigenmatrices, "write eigenmatrices.bin");
  app.add_flag("--dump-matrix", o.dump_matrix, "oracle-ed / floquet-map: write superoperator.bin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  RunConfig cfg;
  try {
    cfg = resolve(parse_command(command), config_path, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    return run_command(cfg, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
