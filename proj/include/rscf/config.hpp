#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rscf/channel.hpp"
#include "rscf/types.hpp"

namespace rscf {

// Full simulation parameterization. Defaults mirror the reference small-cell
// scenario: 12 APs, 3 users, 100 m square, 1900 MHz, 8 dB shadowing, 50 MHz
// bandwidth at 10 dB noise figure, 10000 trials with 100 error draws each.
struct SimConfig {
  Index n_t = 12;
  Index k = 3;
  double region_side_m = 100.0;
  double freq_mhz = 1900.0;
  double shadow_std_db = 8.0;
  NoiseModel noise;

  std::vector<double> sigma_e2_list = {0.0, 0.1, 0.3, 0.5};
  std::vector<double> snr_db_list = {6.0, 10.0, 14.0, 18.0, 22.0};
  double snr_sweep_sigma_e2 = 0.3;  // CSIT quality used for the SNR sweep
  double fixed_snr_db = 22.0;       // operating point for other sweeps
  int iters_sweep_max = 10;

  int trials = 10000;
  int n_err = 100;
  int i_t = 3;
  double alpha_grid_step = 0.005;
  bool clustering_enabled = true;
  std::vector<std::string> schemes = {
      "CF-MMSE", "CF-MMSE-RB", "RSCF-MMSE", "RSCF-MMSE-RB+PpRB",
      "RSCF-MMSE-RB+PcRB"};
  std::uint64_t master_seed = 12345;
};

// Throws ConfigError naming the offending field.
void validate(const SimConfig& cfg);

// JSON round-trip. Unknown keys are rejected so typos surface instead of
// silently falling back to defaults; absent keys keep their defaults.
SimConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const SimConfig& cfg);

// Throws ConfigError naming the path when the file is missing or malformed.
SimConfig load_config(const std::string& path);
void save_config(const SimConfig& cfg, const std::string& path);

}  // namespace rscf
