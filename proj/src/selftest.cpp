#include "rscf/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "rscf/channel.hpp"
#include "rscf/clustering.hpp"
#include "rscf/config.hpp"
#include "rscf/cost.hpp"
#include "rscf/experiments.hpp"
#include "rscf/precoders.hpp"
#include "rscf/rates.hpp"

namespace rscf {
namespace {

bool close_rel(double a, double b, double tol) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale <= tol;
}

// Receiver-side SINR oracle built straight from inner products with the true
// channel: useful power is the estimate-predictable part, everything else in
// the received power is interference.
void oracle_sinrs(const MatrixC& g_hat, const MatrixC& g_tilde, double tau,
                  const PrecoderSet& ps, double sigma_n2, VectorR& gamma_p,
                  VectorR& gamma_c) {
  const Index k = g_hat.cols();
  const MatrixC g = (g_hat + g_tilde) / tau;
  gamma_p.resize(k);
  gamma_c.resize(k);
  for (Index u = 0; u < k; ++u) {
    double total_private = 0.0;
    for (Index i = 0; i < k; ++i)
      total_private += std::norm(g.col(u).dot(ps.p_p.col(i)));

    const double useful =
        std::norm(g_hat.col(u).dot(ps.p_p.col(u))) / (tau * tau);
    const double den_p = total_private - useful + sigma_n2;
    gamma_p(u) = den_p > 0.0 ? std::max(useful / den_p, 0.0) : 0.0;

    if (ps.p_c.squaredNorm() > 0.0) {
      const double useful_c =
          std::norm(g_hat.col(u).dot(ps.p_c)) / (tau * tau);
      const double den_c = std::norm(g.col(u).dot(ps.p_c)) - useful_c +
                           total_private + sigma_n2;
      gamma_c(u) = den_c > 0.0 ? std::max(useful_c / den_c, 0.0) : 0.0;
    } else {
      gamma_c(u) = 0.0;
    }
  }
}

struct Check {
  const char* name;
  std::function<bool()> fn;
};

}  // namespace

bool run_selftest() {
  const Check checks[] = {
      {"path-loss attenuation constant",
       [] {
         return close_rel(attenuation_db(1900.0, 15.0, 1.65),
                          140.71508370390842, 1e-12);
       }},
      {"path-loss branch selection",
       [] {
         return close_rel(path_loss_db(60, 1900, 15, 1.65),
                          -202.95037746733595, 1e-12) &&
                close_rel(path_loss_db(30, 1900, 15, 1.65),
                          -195.74205886334195, 1e-12) &&
                close_rel(path_loss_db(5, 1900, 15, 1.65),
                          -186.1996337689487, 1e-12) &&
                path_loss_db(5, 1900, 15, 1.65) ==
                    path_loss_db(10, 1900, 15, 1.65);
       }},
      {"noise variance",
       [] { return close_rel(noise_variance(NoiseModel{}), 2.00245e-12, 1e-12); }},
      {"error covariance diagonal",
       [] {
         MatrixR zeta(2, 2);
         zeta << 1, 2, 3, 4;
         const MatrixC theta = error_covariance(zeta, 0.5);
         return close_rel(theta(0, 0).real(), 1.5, 1e-15) &&
                close_rel(theta(1, 1).real(), 3.5, 1e-15) &&
                std::abs(theta(0, 1)) == 0.0;
       }},
      {"channel composition identity",
       [] {
         Rng rng(7);
         MatrixR zeta = MatrixR::Constant(4, 2, 1e-9);
         const ChannelSet cs = draw_channel(zeta, 0.3, rng);
         return ((cs.g_hat + cs.g_tilde) / cs.tau - cs.g).norm() < 1e-15;
       }},
      {"cluster mask pattern",
       [] {
         Rng rng(11);
         MatrixR zeta(3, 2);
         for (Index i = 0; i < zeta.size(); ++i) zeta(i) = rng.uniform() + 0.1;
         const ClusterAssignment sets = select_aps(zeta);
         Rng crng(12);
         MatrixC g_hat(3, 2);
         for (Index i = 0; i < g_hat.size(); ++i) g_hat(i) = crng.cnormal(1.0);
         const MatrixC g_bar = sparsify(g_hat, sets);
         for (Index u = 0; u < 2; ++u) {
           if (sets.sets[static_cast<size_t>(u)].empty()) return false;
           for (Index n = 0; n < 3; ++n) {
             const bool in = sets.serves(n, u);
             if (in && g_bar(n, u) != g_hat(n, u)) return false;
             if (!in && std::abs(g_bar(n, u)) != 0.0) return false;
           }
         }
         return true;
       }},
      {"flop model closed form",
       [] {
         const CostReport r = cost_report(12, 3, 3);
         return r.c_f == Rational(59280) &&
                total_cost(12, 3, 0) == Rational(18888) &&
                flops_matmul(2, 3, 4) == Rational(176) &&
                flops_inverse(3) == Rational(36) &&
                r.itemized_per_iteration == r.per_iteration &&
                r.discrepancy == Rational(1);
       }},
      {"private power budget at every iterate",
       [] {
         Rng rng(21);
         MatrixR zeta(6, 3);
         for (Index i = 0; i < zeta.size(); ++i) zeta(i) = rng.uniform() + 0.2;
         const ChannelSet cs = draw_channel(zeta, 0.3, rng);
         const MatrixC theta = error_covariance(zeta, 0.3);
         const double p_t = 10.0, alpha = 1.5, sn2 = 0.05;
         IterTrace trace;
         robust_private(cs.g_hat, theta, cs.tau, p_t, alpha, sn2, 6, &trace);
         for (double pw : trace.power)
           if (!close_rel(pw, p_t - alpha, 1e-10)) return false;
         return trace.power.size() == 7;
       }},
      {"sinr formulas vs decomposition oracle",
       [] {
         Rng rng(33);
         for (int rep = 0; rep < 20; ++rep) {
           const Index n_t = 3 + static_cast<Index>(rng.next_u64() % 5);
           const Index k = 1 + static_cast<Index>(rng.next_u64() % 3);
           MatrixR zeta(n_t, k);
           for (Index i = 0; i < zeta.size(); ++i)
             zeta(i) = rng.uniform() + 0.05;
           const double se2 = 0.4 * rng.uniform();
           const ChannelSet cs = draw_channel(zeta, se2, rng);
           const MatrixC theta = error_covariance(zeta, se2);
           const double p_t = 5.0 + 10.0 * rng.uniform();
           const double alpha = 0.3 * p_t;
           const double sn2 = 0.02 + 0.2 * rng.uniform();
           const PrecoderSet ps =
               build_scheme(Scheme::kRsRobustBoth, cs.g_hat, theta, cs.tau,
                            p_t, alpha, sn2, 3);
           const RateSample s = instantaneous_rates(cs, ps, sn2);
           VectorR op, oc;
           oracle_sinrs(cs.g_hat, cs.g_tilde, cs.tau, ps, sn2, op, oc);
           for (Index u = 0; u < k; ++u) {
             if (!close_rel(s.gamma_p(u), op(u), 1e-10)) return false;
             if (!close_rel(s.gamma_c(u), oc(u), 1e-10)) return false;
           }
         }
         return true;
       }},
      {"robust degenerates to conventional at zero error",
       [] {
         Rng rng(44);
         MatrixR zeta(5, 3);
         for (Index i = 0; i < zeta.size(); ++i) zeta(i) = rng.uniform() + 0.1;
         const ChannelSet cs = draw_channel(zeta, 0.0, rng);
         const MatrixC theta0 = error_covariance(zeta, 0.0);
         const double p_t = 8.0, sn2 = 0.1;
         const PrecoderSet rb = build_scheme(Scheme::kCfMmseRobust, cs.g_hat,
                                             theta0, cs.tau, p_t, 0.0, sn2, 3);
         const PrecoderSet cv = build_scheme(Scheme::kCfMmse, cs.g_hat, theta0,
                                             cs.tau, p_t, 0.0, sn2, 3);
         return (rb.p_p - cv.p_p).norm() == 0.0;
       }},
      {"seeded substreams reproduce",
       [] {
         Rng a(substream_seed(99, 5, kErrorBase + 7));
         Rng b(substream_seed(99, 5, kErrorBase + 7));
         Rng c(substream_seed(99, 5, kErrorBase + 8));
         bool distinct = false;
         for (int i = 0; i < 64; ++i) {
           const std::uint64_t va = a.next_u64();
           if (va != b.next_u64()) return false;
           if (va != c.next_u64()) distinct = true;
         }
         return distinct;
       }},
      {"single-point estimator reproduces",
       [] {
         SimConfig cfg;
         cfg.n_t = 4;
         cfg.k = 2;
         cfg.trials = 3;
         cfg.n_err = 4;
         cfg.alpha_grid_step = 0.25;
         cfg.master_seed = 777;
         const EsrPoint p1 = ergodic_sum_rate(cfg, "RSCF-MMSE-RB+PcRB", 22, 0.3);
         const EsrPoint p2 = ergodic_sum_rate(cfg, "RSCF-MMSE-RB+PcRB", 22, 0.3);
         return p1.esr == p2.esr && p1.ci == p2.ci && p1.esr > 0.0 &&
                std::isfinite(p1.esr);
       }},
  };

  int failed = 0;
  for (const Check& c : checks) {
    bool ok = false;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      std::printf("[FAIL] %s (%s)\n", c.name, e.what());
      ++failed;
      continue;
    }
    std::printf("[%s] %s\n", ok ? "ok" : "FAIL", c.name);
    if (!ok) ++failed;
  }
  std::printf("%s: %d check(s) failed\n", failed ? "SELFTEST FAILED" : "selftest passed",
              failed);
  return failed == 0;
}

}  // namespace rscf
