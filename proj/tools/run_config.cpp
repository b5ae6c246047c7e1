#include "run_config.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace al_cli {

namespace pt = boost::property_tree;

Command parse_command(const std::string& name) {
  if (name == "spectrum") return Command::Spectrum;
  if (name == "oracle-ed") return Command::OracleEd;
  if (name == "floquet-map") return Command::FloquetMap;
  if (name == "evolve") return Command::Evolve;
  if (name == "bench") return Command::Bench;
  if (name == "fit-baseline") return Command::FitBaseline;
  throw ConfigError("unknown command '" + name + "'");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::Spectrum: return "spectrum";
    case Command::OracleEd: return "oracle-ed";
    case Command::FloquetMap: return "floquet-map";
    case Command::Evolve: return "evolve";
    case Command::Bench: return "bench";
    case Command::FitBaseline: return "fit-baseline";
  }
  return "?";
}

namespace {

template <typename T>
T parse_value(const std::string& section, const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  std::string rest;
  in >> value;
  const bool ok = !in.fail();
  in >> rest;
  if (!ok || !rest.empty())
    throw ConfigError("[" + section + "] " + key + ": cannot parse '" + text + "'");
  return value;
}

template <>
std::string parse_value<std::string>(const std::string&, const std::string&, const std::string& text) {
  return text;
}

template <>
bool parse_value<bool>(const std::string& section, const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("[" + section + "] " + key + ": expected true/false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& section, const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(parse_value<double>(section, key, item));
  if (out.empty()) throw ConfigError("[" + section + "] " + key + ": empty list");
  return out;
}

/// Reads a section, rejecting keys outside `allowed`.
class Section {
 public:
  Section(const pt::ptree& tree, std::string name, std::set<std::string> allowed)
      : name_(std::move(name)) {
    if (const auto child = tree.get_child_optional(name_)) {
      present_ = true;
      for (const auto& [key, node] : *child) {
        if (!allowed.count(key)) throw ConfigError("[" + name_ + "]: unknown key '" + key + "'");
        if (!node.empty()) throw ConfigError("[" + name_ + "] " + key + ": nested value");
        values_[key] = node.data();
      }
    }
  }
  [[nodiscard]] bool present() const { return present_; }
  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) > 0; }

  template <typename T>
  void read(const std::string& key, T& target) const {
    if (auto it = values_.find(key); it != values_.end()) target = parse_value<T>(name_, key, it->second);
  }
  template <typename T>
  void read(const std::string& key, std::optional<T>& target) const {
    if (auto it = values_.find(key); it != values_.end()) target = parse_value<T>(name_, key, it->second);
  }
  [[nodiscard]] const std::string& raw(const std::string& key) const { return values_.at(key); }
  [[nodiscard]] const std::string& name() const { return name_; }

 private:
  std::string name_;
  bool present_ = false;
  std::map<std::string, std::string> values_;
};

}  // namespace

RunConfig load_config_file(const std::string& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  static const std::set<std::string> sections{"run", "model", "ddbh", "floquet", "integrator"};
  for (const auto& [key, node] : tree) {
    if (!sections.count(key)) throw ConfigError("config: unknown section or top-level key '" + key + "'");
    if (!node.data().empty()) throw ConfigError("config: '" + key + "' must be a section");
  }

  RunConfig cfg;
  const Section run(tree, "run",
                    {"command", "T", "m", "tol", "check_every", "max_iter", "seed", "threads", "out",
                     "dump_eigenmatrices", "dump_matrix", "oracle_guard", "t_final", "samples",
                     "fit_window", "observable", "input"});
  if (run.has("command")) cfg.command = parse_command(run.raw("command"));
  run.read("T", cfg.interval);
  run.read("m", cfg.m);
  run.read("tol", cfg.tol);
  run.read("check_every", cfg.check_every);
  run.read("max_iter", cfg.max_iter);
  run.read("seed", cfg.seed);
  run.read("threads", cfg.threads);
  run.read("out", cfg.out);
  run.read("dump_eigenmatrices", cfg.dump_eigenmatrices);
  run.read("dump_matrix", cfg.dump_matrix);
  run.read("oracle_guard", cfg.oracle_guard);
  run.read("t_final", cfg.t_final);
  run.read("samples", cfg.samples);
  run.read("fit_window", cfg.fit_window);
  run.read("observable", cfg.observable);
  run.read("input", cfg.input);

  const Section model(tree, "model", {"preset", "size"});
  model.read("preset", cfg.preset);
  model.read("size", cfg.size);

  const Section ddbh(tree, "ddbh", {"sites", "delta", "drives", "u", "j_hop", "z", "gamma", "n_max", "geometry"});
  if (ddbh.present()) {
    DDBHParams p;
    ddbh.read("sites", p.sites);
    ddbh.read("delta", p.delta);
    if (ddbh.has("drives")) p.drives = parse_list("ddbh", "drives", ddbh.raw("drives"));
    ddbh.read("u", p.u);
    ddbh.read("j_hop", p.j_hop);
    ddbh.read("z", p.z);
    ddbh.read("gamma", p.gamma);
    ddbh.read("n_max", p.n_max);
    if (ddbh.has("geometry")) {
      const auto& g = ddbh.raw("geometry");
      if (g == "chain") p.geometry = Geometry::Chain;
      else if (g == "ring") p.geometry = Geometry::Ring;
      else throw ConfigError("[ddbh] geometry: expected chain or ring, got '" + g + "'");
    }
    cfg.ddbh = p;
  }
  const Section fl(tree, "floquet", {"u", "j_hop", "f0", "f1", "omega", "gamma", "n_total"});
  if (fl.present()) {
    FloquetDimerParams p;
    fl.read("u", p.u);
    fl.read("j_hop", p.j_hop);
    fl.read("f0", p.f0);
    fl.read("f1", p.f1);
    fl.read("omega", p.omega);
    fl.read("gamma", p.gamma);
    fl.read("n_total", p.n_total);
    cfg.floquet = p;
  }
  const Section integ(tree, "integrator", {"method", "substeps", "dt", "stability_guard", "rtol", "atol", "min_step"});
  if (integ.has("method")) {
    const auto& m = integ.raw("method");
    if (m == "rk4") cfg.integrator.method = IntegratorMethod::RK4;
    else if (m == "dopri45") cfg.integrator.method = IntegratorMethod::DormandPrince45;
    else throw ConfigError("[integrator] method: expected rk4 or dopri45, got '" + m + "'");
  }
  integ.read("substeps", cfg.integrator.substeps);
  integ.read("dt", cfg.integrator.dt);
  integ.read("stability_guard", cfg.integrator.stability_guard);
  integ.read("rtol", cfg.integrator.rtol);
  integ.read("atol", cfg.integrator.atol);
  integ.read("min_step", cfg.integrator.min_step);
  return cfg;
}

RunConfig resolve(Command command, const std::optional<std::string>& config_path, const Overrides& o) {
  RunConfig cfg = config_path ? load_config_file(*config_path) : RunConfig{};
  cfg.command = command;
  if (o.preset) {
    if (cfg.ddbh || cfg.floquet)
      throw ConfigError("--preset conflicts with an inline model in the config file");
    cfg.preset = o.preset;
  }
  if (o.size) cfg.size = *o.size;
  if (o.m) cfg.m = *o.m;
  if (o.interval) cfg.interval = o.interval;
  if (o.tol) cfg.tol = *o.tol;
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out = *o.out;
  if (o.threads) cfg.threads = *o.threads;
  if (o.check_every) cfg.check_every = *o.check_every;
  if (o.max_iter) cfg.max_iter = *o.max_iter;
  if (o.t_final) cfg.t_final = *o.t_final;
  if (o.input) cfg.input = o.input;
  if (o.observable) cfg.observable = *o.observable;
  if (o.fit_window) cfg.fit_window = *o.fit_window;
  cfg.dump_eigenmatrices = cfg.dump_eigenmatrices || o.dump_eigenmatrices;
  cfg.dump_matrix = cfg.dump_matrix || o.dump_matrix;
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  const int sources = int(preset.has_value()) + int(ddbh.has_value()) + int(floquet.has_value());
  if (command != Command::FitBaseline && sources != 1)
    throw ConfigError("exactly one model source is required (preset, [ddbh] or [floquet]); got " +
                      std::to_string(sources));
  if (preset) {
    const auto& names = preset_names();
    if (std::find(names.begin(), names.end(), *preset) == names.end())
      throw ConfigError("unknown preset '" + *preset + "'");
  }
  if (size < 0) throw ConfigError("size must be >= 0");
  if (interval && !(*interval > 0.0)) throw ConfigError("T must be > 0");
  if (m < 1) throw ConfigError("m must be >= 1");
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  if (check_every < 1) throw ConfigError("check_every must be >= 1");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (!(t_final > 0.0)) throw ConfigError("t_final must be > 0");
  if (samples < 2) throw ConfigError("samples must be >= 2");
  if (oracle_guard < 1) throw ConfigError("oracle_guard must be >= 1");
  if (out.empty()) throw ConfigError("out must not be empty");
  try {
    integrator.validate();
    if (ddbh) ddbh->validate();
    if (floquet) floquet->validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["command"] = to_string(command);
  if (preset) j["model"] = {{"preset", *preset}, {"size", size}};
  if (ddbh)
    j["model"] = {{"ddbh",
                   {{"sites", ddbh->sites},
                    {"delta", ddbh->delta},
                    {"drives", ddbh->drives},
                    {"u", ddbh->u},
                    {"j_hop", ddbh->j_hop},
                    {"z", ddbh->z},
                    {"gamma", ddbh->gamma},
                    {"n_max", ddbh->n_max},
                    {"geometry", ddbh->geometry == Geometry::Ring ? "ring" : "chain"}}}};
  if (floquet)
    j["model"] = {{"floquet",
                   {{"u", floquet->u},
                    {"j_hop", floquet->j_hop},
                    {"f0", floquet->f0},
                    {"f1", floquet->f1},
                    {"omega", floquet->omega},
                    {"gamma", floquet->gamma},
                    {"n_total", floquet->n_total}}}};
  j["T"] = interval ? nlohmann::json(*interval) : nlohmann::json(nullptr);
  j["m"] = m;
  j["tol"] = tol;
  j["check_every"] = check_every;
  j["max_iter"] = max_iter;
  j["seed"] = seed;
  j["threads"] = threads;
  j["out"] = out;
  j["oracle_guard"] = oracle_guard;
  j["t_final"] = t_final;
  j["samples"] = samples;
  j["fit_window"] = fit_window;
  j["observable"] = observable;
  if (input) j["input"] = *input;
  j["integrator"] = {{"method", integrator.method == IntegratorMethod::RK4 ? "rk4" : "dopri45"},
                     {"substeps", integrator.substeps},
                     {"dt", integrator.dt ? nlohmann::json(*integrator.dt) : nlohmann::json(nullptr)},
                     {"stability_guard", integrator.stability_guard},
                     {"rtol", integrator.rtol},
                     {"atol", integrator.atol},
                     {"min_step", integrator.min_step}};
  return j;
}

ResolvedModel build_model(const RunConfig& cfg) {
  if (cfg.preset) {
    Preset p = preset_model(*cfg.preset, cfg.size);
    return {std::move(p.model), cfg.interval.value_or(p.default_interval), p.name};
  }
  if (cfg.ddbh) {
    DDBHParams p = *cfg.ddbh;
    if (cfg.size > 0) p.n_max = cfg.size;
    return {ddbh_model(p), cfg.interval.value_or(0.05 / p.gamma), "ddbh"};
  }
  if (cfg.floquet) {
    FloquetDimerParams p = *cfg.floquet;
    if (cfg.size > 0) p.n_total = cfg.size;
    auto model = floquet_dimer_model(p);
    const double period = *model.period();
    return {std::move(model), cfg.interval.value_or(period), "floquet"};
  }
  throw ConfigError("no model source");
}

}  // namespace al_cli
