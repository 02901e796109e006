#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rscf/config.hpp"
#include "rscf/types.hpp"

namespace rscf {

// One sweep-point / scheme aggregate over all trials.
struct EsrPoint {
  std::string sweep;
  std::string scheme;
  double value = 0.0;       // sweep coordinate (dB, sigma_e2 or iterations)
  double esr = 0.0;         // mean sum rate, bits/s/Hz
  double ci = 0.0;          // 95% normal-approximation half-width
  int trials = 0;
  int n_err = 0;
  double mean_alpha_frac = 0.0;  // mean selected common power / P_t
  double alpha_ci = 0.0;         // 95% half-width of mean_alpha_frac
};

struct EsrCurve {
  std::string sweep;
  std::vector<EsrPoint> points;
};

// Worker count from RSCF_WORKERS, falling back to the hardware count.
// Results are bit-identical at any value by construction.
int worker_count();

// Sum-rate vs SNR for every configured scheme at cfg.snr_sweep_sigma_e2.
EsrCurve run_sweep_snr(const SimConfig& cfg);

// Sum-rate of the fully robust RS scheme vs iteration count at
// cfg.fixed_snr_db, with the standard initialization and with a seeded
// random one; returns the two curves in that order.
std::vector<EsrCurve> run_sweep_iterations(const SimConfig& cfg);

// Sum-rate vs CSIT error variance for every configured scheme at
// cfg.fixed_snr_db.
EsrCurve run_sweep_csit(const SimConfig& cfg);

// Single sweep cell; bit-identical to the matching curve entry.
EsrPoint ergodic_sum_rate(const SimConfig& cfg, const std::string& scheme_tag,
                          double snr_db, double sigma_e2);

// Pinned row schema: sweep,scheme,value,esr_bps_hz,ci,trials,n_err,seed.
std::string curves_csv(const std::vector<EsrCurve>& curves,
                       std::uint64_t seed);

// Companion table of the selected common-power fractions.
std::string alpha_csv(const std::vector<EsrCurve>& curves, std::uint64_t seed);

// Reproducibility record: config echo, seed, version, subcommand. No
// timestamps, so reruns emit identical bytes.
std::string run_manifest_json(const SimConfig& cfg, const std::string& command);

void write_text_file(const std::string& path, const std::string& content);

inline constexpr const char* kVersion = "rscf 0.1.0";

}  // namespace rscf
