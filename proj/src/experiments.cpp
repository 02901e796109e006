#include "rscf/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "rscf/channel.hpp"
#include "rscf/clustering.hpp"
#include "rscf/errors.hpp"
#include "rscf/precoders.hpp"
#include "rscf/rates.hpp"

namespace rscf {
namespace {

// Everything drawn per trial is independent of the sweep coordinate: the
// same geometry, gains, estimate and unit-scale error draws feed every sweep
// point and scheme, so curves differ only through the quantity under study.
struct TrialDraw {
  MatrixR zeta;
  ClusterAssignment sets;
  MatrixC g_hat;
  std::vector<MatrixC> unit_err;  // variance-zeta draws, scaled by sigma_e
};

MatrixC draw_cn_matrix(const MatrixR& zeta, Rng& rng) {
  MatrixC m(zeta.rows(), zeta.cols());
  for (Index n = 0; n < zeta.rows(); ++n)
    for (Index u = 0; u < zeta.cols(); ++u) m(n, u) = rng.cnormal(zeta(n, u));
  return m;
}

TrialDraw make_trial_draw(const SimConfig& cfg, int trial) {
  TrialDraw d;
  Rng rng_geo(substream_seed(cfg.master_seed, trial, StreamPurpose::kGeometry));
  const NetworkGeometry geom =
      place_network(cfg.n_t, cfg.k, cfg.region_side_m, rng_geo);
  Rng rng_sh(substream_seed(cfg.master_seed, trial, StreamPurpose::kShadowing));
  d.zeta = large_scale(geom, cfg.freq_mhz, cfg.shadow_std_db, rng_sh);
  d.sets = select_aps(d.zeta);
  Rng rng_est(substream_seed(cfg.master_seed, trial, StreamPurpose::kEstimate));
  d.g_hat = draw_cn_matrix(d.zeta, rng_est);
  d.unit_err.reserve(static_cast<size_t>(cfg.n_err));
  for (int j = 0; j < cfg.n_err; ++j) {
    Rng rng_err(substream_seed(cfg.master_seed, trial, kErrorBase + j));
    d.unit_err.push_back(draw_cn_matrix(d.zeta, rng_err));
  }
  return d;
}

std::vector<MatrixC> scaled_errors(const TrialDraw& d, double sigma_e2) {
  const double s = std::sqrt(sigma_e2);
  std::vector<MatrixC> out;
  out.reserve(d.unit_err.size());
  for (const auto& e : d.unit_err) out.push_back(s * e);
  return out;
}

struct CellOut {
  double sum = 0.0;
  double alpha_frac = 0.0;
};

// One (scheme, SNR, sigma_e2) evaluation for one trial, used identically by
// every sweep and by the single-point estimator.
CellOut eval_cell(const SimConfig& cfg, const TrialDraw& d, double sigma_n2,
                  Scheme scheme, double snr_db, double sigma_e2) {
  const double tau = std::sqrt(1.0 + sigma_e2);
  const MatrixC theta = error_covariance(d.zeta, sigma_e2);
  const MatrixC g_eff =
      cfg.clustering_enabled ? sparsify(d.g_hat, d.sets) : d.g_hat;
  const double p_t = pt_for_snr(snr_db, d.zeta, sigma_n2);
  const std::vector<MatrixC> errors = scaled_errors(d, sigma_e2);

  double alpha = 0.0;
  if (uses_common_stream(scheme))
    alpha = allocate_alpha_c(scheme, g_eff, d.g_hat, theta, tau, p_t, sigma_n2,
                             cfg.i_t, cfg.alpha_grid_step, errors);
  const PrecoderSet ps =
      build_scheme(scheme, g_eff, theta, tau, p_t, alpha, sigma_n2, cfg.i_t);
  const RateContext ctx(d.g_hat, ps, tau, sigma_n2);
  return {average_rates(ctx, errors).sum, alpha / p_t};
}

// Iteration study: the power split is searched once per trial at the
// configured iteration count, then held fixed while the private iteration
// count and the initialization vary.
std::vector<CellOut> eval_iters_trial(const SimConfig& cfg, const TrialDraw& d,
                                      double sigma_n2, int trial) {
  const Scheme scheme = Scheme::kRsRobustBoth;
  const double sigma_e2 = cfg.snr_sweep_sigma_e2;
  const double tau = std::sqrt(1.0 + sigma_e2);
  const MatrixC theta = error_covariance(d.zeta, sigma_e2);
  const MatrixC g_eff =
      cfg.clustering_enabled ? sparsify(d.g_hat, d.sets) : d.g_hat;
  const double p_t = pt_for_snr(cfg.fixed_snr_db, d.zeta, sigma_n2);
  const std::vector<MatrixC> errors = scaled_errors(d, sigma_e2);

  const double alpha =
      allocate_alpha_c(scheme, g_eff, d.g_hat, theta, tau, p_t, sigma_n2,
                       cfg.i_t, cfg.alpha_grid_step, errors);
  const VectorC p_c =
      std::sqrt(alpha) * robust_common_direction(g_eff, theta, tau).unit;

  const PrivateInitT<double> init_std =
      mmse_private_init(g_eff, theta, tau, p_t, alpha, sigma_n2);
  Rng rng_init(
      substream_seed(cfg.master_seed, trial, StreamPurpose::kRandomInit));
  MatrixC p_bar0(g_eff.rows(), g_eff.cols());
  for (Index n = 0; n < p_bar0.rows(); ++n)
    for (Index u = 0; u < p_bar0.cols(); ++u)
      p_bar0(n, u) = rng_init.cnormal(1.0);
  const PrivateInitT<double> init_rand =
      private_init_from_pbar(p_bar0, theta, tau, p_t, alpha, sigma_n2);

  std::vector<CellOut> row;
  row.reserve(2 * static_cast<size_t>(cfg.iters_sweep_max + 1));
  for (int it = 0; it <= cfg.iters_sweep_max; ++it) {
    for (const PrivateInitT<double>* init : {&init_std, &init_rand}) {
      PrecoderSet ps = robust_private_from_init(g_eff, theta, tau, p_t, alpha,
                                                sigma_n2, it, *init);
      ps.scheme = scheme;
      ps.alpha_c = alpha;
      ps.p_c = p_c;
      const RateContext ctx(d.g_hat, ps, tau, sigma_n2);
      row.push_back({average_rates(ctx, errors).sum, alpha / p_t});
    }
  }
  return row;
}

// Trials are handed out by an atomic counter and land in per-trial slots;
// the reduction below walks the slots in trial order, so scheduling cannot
// change a single output bit.
template <typename F>
std::vector<std::vector<CellOut>> run_trials(const SimConfig& cfg, F&& fn) {
  const int trials = cfg.trials;
  std::vector<std::vector<CellOut>> slots(static_cast<size_t>(trials));
  const int workers = std::min(worker_count(), trials);
  if (workers <= 1) {
    for (int t = 0; t < trials; ++t) slots[static_cast<size_t>(t)] = fn(t);
    return slots;
  }

  std::atomic<int> next{0};
  std::mutex mu;
  std::exception_ptr first_error;
  auto body = [&] {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        slots[static_cast<size_t>(t)] = fn(t);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return slots;
}

EsrPoint reduce_cell(const std::vector<std::vector<CellOut>>& slots,
                     size_t cell, const SimConfig& cfg) {
  const size_t t = slots.size();
  double mean = 0.0;
  double mean_alpha = 0.0;
  for (size_t i = 0; i < t; ++i) {
    mean += slots[i][cell].sum;
    mean_alpha += slots[i][cell].alpha_frac;
  }
  mean /= static_cast<double>(t);
  mean_alpha /= static_cast<double>(t);

  double ci = 0.0;
  double alpha_ci = 0.0;
  if (t > 1) {
    double ssq = 0.0;
    double ssq_a = 0.0;
    for (size_t i = 0; i < t; ++i) {
      const double dlt = slots[i][cell].sum - mean;
      ssq += dlt * dlt;
      const double dlt_a = slots[i][cell].alpha_frac - mean_alpha;
      ssq_a += dlt_a * dlt_a;
    }
    const double z = 1.959963984540054;
    ci = z * std::sqrt(ssq / static_cast<double>(t - 1)) /
         std::sqrt(static_cast<double>(t));
    alpha_ci = z * std::sqrt(ssq_a / static_cast<double>(t - 1)) /
               std::sqrt(static_cast<double>(t));
  }

  EsrPoint p;
  p.esr = mean;
  p.ci = ci;
  p.trials = cfg.trials;
  p.n_err = cfg.n_err;
  p.mean_alpha_frac = mean_alpha;
  p.alpha_ci = alpha_ci;
  return p;
}

std::vector<Scheme> parse_schemes(const SimConfig& cfg) {
  std::vector<Scheme> out;
  out.reserve(cfg.schemes.size());
  for (const auto& tag : cfg.schemes) out.push_back(scheme_from_tag(tag));
  return out;
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("RSCF_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 4096)
      throw ConfigError("RSCF_WORKERS must be a positive integer");
    return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

EsrCurve run_sweep_snr(const SimConfig& cfg) {
  validate(cfg);
  const double sigma_n2 = noise_variance(cfg.noise);
  const std::vector<Scheme> schemes = parse_schemes(cfg);

  const auto slots = run_trials(cfg, [&](int t) {
    const TrialDraw d = make_trial_draw(cfg, t);
    std::vector<CellOut> row;
    row.reserve(cfg.snr_db_list.size() * schemes.size());
    for (double snr : cfg.snr_db_list)
      for (Scheme s : schemes)
        row.push_back(
            eval_cell(cfg, d, sigma_n2, s, snr, cfg.snr_sweep_sigma_e2));
    return row;
  });

  EsrCurve curve;
  curve.sweep = "snr_db";
  size_t cell = 0;
  for (double snr : cfg.snr_db_list)
    for (const auto& tag : cfg.schemes) {
      EsrPoint p = reduce_cell(slots, cell++, cfg);
      p.sweep = curve.sweep;
      p.scheme = tag;
      p.value = snr;
      curve.points.push_back(std::move(p));
    }
  return curve;
}

std::vector<EsrCurve> run_sweep_iterations(const SimConfig& cfg) {
  validate(cfg);
  const double sigma_n2 = noise_variance(cfg.noise);

  const auto slots = run_trials(cfg, [&](int t) {
    return eval_iters_trial(cfg, make_trial_draw(cfg, t), sigma_n2, t);
  });

  EsrCurve std_init;
  std_init.sweep = "iterations";
  EsrCurve rand_init;
  rand_init.sweep = "iterations-random-init";
  const std::string tag = scheme_tag(Scheme::kRsRobustBoth);
  for (int it = 0; it <= cfg.iters_sweep_max; ++it) {
    for (int variant = 0; variant < 2; ++variant) {
      EsrPoint p =
          reduce_cell(slots, static_cast<size_t>(2 * it + variant), cfg);
      p.scheme = tag;
      p.value = it;
      if (variant == 0) {
        p.sweep = std_init.sweep;
        std_init.points.push_back(std::move(p));
      } else {
        p.sweep = rand_init.sweep;
        rand_init.points.push_back(std::move(p));
      }
    }
  }
  return {std::move(std_init), std::move(rand_init)};
}

EsrCurve run_sweep_csit(const SimConfig& cfg) {
  validate(cfg);
  const double sigma_n2 = noise_variance(cfg.noise);
  const std::vector<Scheme> schemes = parse_schemes(cfg);

  const auto slots = run_trials(cfg, [&](int t) {
    const TrialDraw d = make_trial_draw(cfg, t);
    std::vector<CellOut> row;
    row.reserve(cfg.sigma_e2_list.size() * schemes.size());
    for (double se2 : cfg.sigma_e2_list)
      for (Scheme s : schemes)
        row.push_back(eval_cell(cfg, d, sigma_n2, s, cfg.fixed_snr_db, se2));
    return row;
  });

  EsrCurve curve;
  curve.sweep = "sigma_e2";
  size_t cell = 0;
  for (double se2 : cfg.sigma_e2_list)
    for (const auto& tag : cfg.schemes) {
      EsrPoint p = reduce_cell(slots, cell++, cfg);
      p.sweep = curve.sweep;
      p.scheme = tag;
      p.value = se2;
      curve.points.push_back(std::move(p));
    }
  return curve;
}

EsrPoint ergodic_sum_rate(const SimConfig& cfg, const std::string& scheme_tag_,
                          double snr_db, double sigma_e2) {
  validate(cfg);
  const double sigma_n2 = noise_variance(cfg.noise);
  const Scheme scheme = scheme_from_tag(scheme_tag_);

  const auto slots = run_trials(cfg, [&](int t) {
    const TrialDraw d = make_trial_draw(cfg, t);
    return std::vector<CellOut>{
        eval_cell(cfg, d, sigma_n2, scheme, snr_db, sigma_e2)};
  });

  EsrPoint p = reduce_cell(slots, 0, cfg);
  p.sweep = "point";
  p.scheme = scheme_tag_;
  p.value = snr_db;
  return p;
}

std::string curves_csv(const std::vector<EsrCurve>& curves,
                       std::uint64_t seed) {
  std::string out = "sweep,scheme,value,esr_bps_hz,ci,trials,n_err,seed\n";
  char buf[320];
  for (const auto& c : curves)
    for (const auto& p : c.points) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%.17g,%d,%d,%llu\n",
                    p.sweep.c_str(), p.scheme.c_str(), p.value, p.esr, p.ci,
                    p.trials, p.n_err, static_cast<unsigned long long>(seed));
      out += buf;
    }
  return out;
}

std::string alpha_csv(const std::vector<EsrCurve>& curves, std::uint64_t seed) {
  std::string out = "sweep,scheme,value,mean_alpha_frac,alpha_ci,trials,seed\n";
  char buf[320];
  for (const auto& c : curves)
    for (const auto& p : c.points) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%.17g,%d,%llu\n",
                    p.sweep.c_str(), p.scheme.c_str(), p.value,
                    p.mean_alpha_frac, p.alpha_ci, p.trials,
                    static_cast<unsigned long long>(seed));
      out += buf;
    }
  return out;
}

std::string run_manifest_json(const SimConfig& cfg,
                              const std::string& command) {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = nlohmann::json::parse(config_to_json_text(cfg));
  j["seed"] = cfg.master_seed;
  j["version"] = kVersion;
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace rscf
