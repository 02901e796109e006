#include "rscf/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rscf/errors.hpp"
#include "rscf/precoders.hpp"

namespace rscf {

using nlohmann::json;

void validate(const SimConfig& cfg) {
  if (cfg.k < 1) throw ConfigError("config: k must be >= 1");
  if (cfg.n_t < cfg.k) throw ConfigError("config: n_t must be >= k");
  if (!(cfg.region_side_m > 0.0))
    throw ConfigError("config: region_side_m must be positive");
  if (!(cfg.freq_mhz > 0.0)) throw ConfigError("config: freq_mhz must be positive");
  if (cfg.shadow_std_db < 0.0)
    throw ConfigError("config: shadow_std_db must be non-negative");
  if (!(cfg.noise.temperature_k > 0.0))
    throw ConfigError("config: noise.temperature_k must be positive");
  if (!(cfg.noise.boltzmann_j_per_k > 0.0))
    throw ConfigError("config: noise.boltzmann_j_per_k must be positive");
  if (!(cfg.noise.bandwidth_hz > 0.0))
    throw ConfigError("config: noise.bandwidth_hz must be positive");
  if (cfg.sigma_e2_list.empty())
    throw ConfigError("config: sigma_e2_list must not be empty");
  for (double s : cfg.sigma_e2_list)
    if (s < 0.0) throw ConfigError("config: sigma_e2_list entries must be >= 0");
  if (cfg.snr_db_list.empty())
    throw ConfigError("config: snr_db_list must not be empty");
  if (cfg.snr_sweep_sigma_e2 < 0.0)
    throw ConfigError("config: snr_sweep_sigma_e2 must be >= 0");
  if (cfg.iters_sweep_max < 0)
    throw ConfigError("config: iters_sweep_max must be >= 0");
  if (cfg.trials < 1) throw ConfigError("config: trials must be >= 1");
  if (cfg.n_err < 1) throw ConfigError("config: n_err must be >= 1");
  if (cfg.i_t < 0) throw ConfigError("config: i_t must be >= 0");
  if (!(cfg.alpha_grid_step > 0.0) || cfg.alpha_grid_step > 1.0)
    throw ConfigError("config: alpha_grid_step must lie in (0, 1]");
  if (cfg.schemes.empty())
    throw ConfigError("config: schemes must not be empty");
  for (const auto& tag : cfg.schemes) scheme_from_tag(tag);  // throws on typo
}

static const std::set<std::string> kKnownKeys = {
    "n_t", "k", "region_side_m", "freq_mhz", "shadow_std_db", "noise",
    "sigma_e2_list", "snr_db_list", "snr_sweep_sigma_e2", "fixed_snr_db",
    "iters_sweep_max", "trials", "n_err", "i_t", "alpha_grid_step",
    "clustering_enabled", "schemes", "master_seed"};
static const std::set<std::string> kKnownNoiseKeys = {
    "temperature_k", "boltzmann_j_per_k", "bandwidth_hz", "noise_figure_db"};

SimConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  for (const auto& item : j.items())
    if (!kKnownKeys.count(item.key()))
      throw ConfigError("config: unknown key \"" + item.key() + "\"");

  SimConfig cfg;
  try {
    if (j.contains("n_t")) cfg.n_t = j["n_t"].get<Index>();
    if (j.contains("k")) cfg.k = j["k"].get<Index>();
    if (j.contains("region_side_m"))
      cfg.region_side_m = j["region_side_m"].get<double>();
    if (j.contains("freq_mhz")) cfg.freq_mhz = j["freq_mhz"].get<double>();
    if (j.contains("shadow_std_db"))
      cfg.shadow_std_db = j["shadow_std_db"].get<double>();
    if (j.contains("noise")) {
      const json& n = j["noise"];
      if (!n.is_object()) throw ConfigError("config: noise must be an object");
      for (const auto& item : n.items())
        if (!kKnownNoiseKeys.count(item.key()))
          throw ConfigError("config: unknown key \"noise." + item.key() + "\"");
      if (n.contains("temperature_k"))
        cfg.noise.temperature_k = n["temperature_k"].get<double>();
      if (n.contains("boltzmann_j_per_k"))
        cfg.noise.boltzmann_j_per_k = n["boltzmann_j_per_k"].get<double>();
      if (n.contains("bandwidth_hz"))
        cfg.noise.bandwidth_hz = n["bandwidth_hz"].get<double>();
      if (n.contains("noise_figure_db"))
        cfg.noise.noise_figure_db = n["noise_figure_db"].get<double>();
    }
    if (j.contains("sigma_e2_list"))
      cfg.sigma_e2_list = j["sigma_e2_list"].get<std::vector<double>>();
    if (j.contains("snr_db_list"))
      cfg.snr_db_list = j["snr_db_list"].get<std::vector<double>>();
    if (j.contains("snr_sweep_sigma_e2"))
      cfg.snr_sweep_sigma_e2 = j["snr_sweep_sigma_e2"].get<double>();
    if (j.contains("fixed_snr_db"))
      cfg.fixed_snr_db = j["fixed_snr_db"].get<double>();
    if (j.contains("iters_sweep_max"))
      cfg.iters_sweep_max = j["iters_sweep_max"].get<int>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
    if (j.contains("n_err")) cfg.n_err = j["n_err"].get<int>();
    if (j.contains("i_t")) cfg.i_t = j["i_t"].get<int>();
    if (j.contains("alpha_grid_step"))
      cfg.alpha_grid_step = j["alpha_grid_step"].get<double>();
    if (j.contains("clustering_enabled"))
      cfg.clustering_enabled = j["clustering_enabled"].get<bool>();
    if (j.contains("schemes"))
      cfg.schemes = j["schemes"].get<std::vector<std::string>>();
    if (j.contains("master_seed"))
      cfg.master_seed = j["master_seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

std::string config_to_json_text(const SimConfig& cfg) {
  json j;
  j["n_t"] = cfg.n_t;
  j["k"] = cfg.k;
  j["region_side_m"] = cfg.region_side_m;
  j["freq_mhz"] = cfg.freq_mhz;
  j["shadow_std_db"] = cfg.shadow_std_db;
  j["noise"] = {{"temperature_k", cfg.noise.temperature_k},
                {"boltzmann_j_per_k", cfg.noise.boltzmann_j_per_k},
                {"bandwidth_hz", cfg.noise.bandwidth_hz},
                {"noise_figure_db", cfg.noise.noise_figure_db}};
  j["sigma_e2_list"] = cfg.sigma_e2_list;
  j["snr_db_list"] = cfg.snr_db_list;
  j["snr_sweep_sigma_e2"] = cfg.snr_sweep_sigma_e2;
  j["fixed_snr_db"] = cfg.fixed_snr_db;
  j["iters_sweep_max"] = cfg.iters_sweep_max;
  j["trials"] = cfg.trials;
  j["n_err"] = cfg.n_err;
  j["i_t"] = cfg.i_t;
  j["alpha_grid_step"] = cfg.alpha_grid_step;
  j["clustering_enabled"] = cfg.clustering_enabled;
  j["schemes"] = cfg.schemes;
  j["master_seed"] = cfg.master_seed;
  return j.dump(2) + "\n";
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return config_from_json_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(e.what()) + " (in " + path + ")");
  }
}

void save_config(const SimConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << config_to_json_text(cfg);
}

}  // namespace rscf
