#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "arnoldi_lindblad/models.hpp"
#include "arnoldi_lindblad/propagator.hpp"

namespace al_cli {

using namespace arnoldi_lindblad;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Spectrum, OracleEd, FloquetMap, Evolve, Bench, FitBaseline };

Command parse_command(const std::string& name);
std::string to_string(Command c);

/// Everything a command needs, after merging the config file and flags.
struct RunConfig {
  Command command = Command::Spectrum;

  // Exactly one model source.
  std::optional<std::string> preset;
  int size = 0;  // n_max / N override for presets
  std::optional<DDBHParams> ddbh;
  std::optional<FloquetDimerParams> floquet;

  std::optional<double> interval;  // T; defaulted per model
  int m = 1;
  double tol = 1e-3;
  int check_every = 10;
  int max_iter = 2000;
  IntegratorConfig integrator;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out = "out";
  bool dump_eigenmatrices = false;
  bool dump_matrix = false;
  long long oracle_guard = 256;

  // evolve / fit-baseline
  double t_final = 15.0;
  int samples = 301;
  double fit_window = 5.0;
  std::string observable = "n1";
  std::optional<std::string> input;

  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Flags given on the command line; unset fields leave the file's values.
struct Overrides {
  std::optional<std::string> preset;
  std::optional<int> size;
  std::optional<int> m;
  std::optional<double> interval;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::optional<int> check_every;
  std::optional<int> max_iter;
  std::optional<double> t_final;
  std::optional<std::string> input;
  std::optional<std::string> observable;
  std::optional<double> fit_window;
  bool dump_eigenmatrices = false;
  bool dump_matrix = false;
};

/// INI file (see config/schema.ini). Unknown sections or keys are errors.
RunConfig load_config_file(const std::string& path);
RunConfig resolve(Command command, const std::optional<std::string>& config_path, const Overrides& o);

struct ResolvedModel {
  LindbladModel model;
  double interval;
  std::string label;
};
ResolvedModel build_model(const RunConfig& cfg);

}  // namespace al_cli
