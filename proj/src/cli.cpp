#include "rscf/cli.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rscf/config.hpp"
#include "rscf/cost.hpp"
#include "rscf/errors.hpp"
#include "rscf/experiments.hpp"
#include "rscf/selftest.hpp"

namespace rscf {
namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::string scheme;
  std::uint64_t seed = 0;
  int trials = -1;
  int n_err = -1;
  bool no_clustering = false;
  bool seed_set = false;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config_path, "JSON config file");
  sub->add_option("--out", o.out_dir, "output directory")
      ->capture_default_str();
  sub->add_option("--seed", o.seed, "master seed override")
      ->each([&o](const std::string&) { o.seed_set = true; });
  sub->add_option("--trials", o.trials, "trial count override");
  sub->add_option("--n-err", o.n_err, "error draws per estimate override");
  sub->add_option("--scheme", o.scheme, "restrict to a single scheme tag");
  sub->add_flag("--no-clustering", o.no_clustering,
                "precode on the full estimate instead of the AP-selected one");
}

SimConfig resolve_config(const CommonOpts& o) {
  SimConfig cfg = o.config_path.empty() ? SimConfig{} : load_config(o.config_path);
  if (o.seed_set) cfg.master_seed = o.seed;
  if (o.trials >= 0) cfg.trials = o.trials;
  if (o.n_err >= 0) cfg.n_err = o.n_err;
  if (o.no_clustering) cfg.clustering_enabled = false;
  if (!o.scheme.empty()) cfg.schemes = {o.scheme};
  validate(cfg);
  return cfg;
}

void emit(const std::string& out_dir, const std::string& stem,
          const SimConfig& cfg, const std::vector<EsrCurve>& curves,
          bool with_alpha) {
  std::filesystem::create_directories(out_dir);
  const std::string base = out_dir + "/" + stem;
  write_text_file(base + ".csv", curves_csv(curves, cfg.master_seed));
  std::printf("wrote %s.csv\n", base.c_str());
  if (with_alpha) {
    write_text_file(base + "_alpha.csv", alpha_csv(curves, cfg.master_seed));
    std::printf("wrote %s_alpha.csv\n", base.c_str());
  }
  write_text_file(base + ".manifest.json", run_manifest_json(cfg, stem));
  std::printf("wrote %s.manifest.json\n", base.c_str());
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo sum-rate simulator for rate-splitting cell-free "
               "MU-MIMO downlink precoding"};
  app.require_subcommand(1);

  CommonOpts snr_opts;
  CLI::App* snr = app.add_subcommand(
      "sweep-snr", "ergodic sum rate vs SNR for all configured schemes");
  add_common(snr, snr_opts);

  CommonOpts iters_opts;
  CLI::App* iters = app.add_subcommand(
      "sweep-iters",
      "ergodic sum rate vs private-precoder iteration count (standard and "
      "random initialization)");
  add_common(iters, iters_opts);

  CommonOpts csit_opts;
  CLI::App* csit = app.add_subcommand(
      "sweep-csit", "ergodic sum rate vs channel-error variance");
  add_common(csit, csit_opts);

  std::vector<std::int64_t> nt_list{12};
  std::vector<std::int64_t> k_list{3};
  std::vector<std::int64_t> it_list{3};
  bool cost_csv = false;
  CLI::App* cost = app.add_subcommand(
      "cost-table", "closed-form FLOP counts for (n_t, k, i_t) grids");
  cost->add_option("--nt", nt_list, "antenna counts")->capture_default_str();
  cost->add_option("--k", k_list, "user counts")->capture_default_str();
  cost->add_option("--it", it_list, "iteration counts")->capture_default_str();
  cost->add_flag("--csv", cost_csv, "emit CSV instead of an aligned table");

  CLI::App* self =
      app.add_subcommand("selftest", "run the built-in oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*snr) {
      const SimConfig cfg = resolve_config(snr_opts);
      emit(snr_opts.out_dir, "sweep_snr", cfg, {run_sweep_snr(cfg)}, false);
    } else if (*iters) {
      const SimConfig cfg = resolve_config(iters_opts);
      emit(iters_opts.out_dir, "sweep_iters", cfg, run_sweep_iterations(cfg),
           false);
    } else if (*csit) {
      const SimConfig cfg = resolve_config(csit_opts);
      emit(csit_opts.out_dir, "sweep_csit", cfg, {run_sweep_csit(cfg)}, true);
    } else if (*cost) {
      std::fputs(cost_table(nt_list, k_list, it_list, cost_csv).c_str(),
                 stdout);
    } else if (*self) {
      if (!run_selftest()) return 2;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const PowerBudgetError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace rscf
