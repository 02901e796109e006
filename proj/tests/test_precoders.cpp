#include <cmath>
#include <complex>

#include <doctest.h>

#include "oracles.hpp"
#include "rscf/channel.hpp"
#include "rscf/precoders.hpp"
#include "rscf/rng.hpp"

using namespace rscf;

namespace {

MatrixC random_estimate(Index n_t, Index k, Rng& rng, double scale = 1.0) {
  MatrixC g(n_t, k);
  for (Index n = 0; n < n_t; ++n)
    for (Index u = 0; u < k; ++u) g(n, u) = rng.cnormal(scale);
  return g;
}

MatrixR random_zeta(Index n_t, Index k, Rng& rng) {
  MatrixR z(n_t, k);
  for (Index n = 0; n < n_t; ++n)
    for (Index u = 0; u < k; ++u) z(n, u) = 0.5 + rng.uniform();
  return z;
}

}  // namespace

TEST_CASE("scheme tags round-trip and classify the five variants") {
  for (Scheme s : kAllSchemes) CHECK(scheme_from_tag(scheme_tag(s)) == s);
  CHECK_THROWS_AS(scheme_from_tag("MMSE"), ConfigError);

  CHECK_FALSE(uses_common_stream(Scheme::kCfMmse));
  CHECK_FALSE(uses_common_stream(Scheme::kCfMmseRobust));
  CHECK(uses_common_stream(Scheme::kRsMmse));
  CHECK(uses_common_stream(Scheme::kRsRobustPrivate));
  CHECK(uses_common_stream(Scheme::kRsRobustBoth));

  CHECK_FALSE(robust_private_enabled(Scheme::kCfMmse));
  CHECK(robust_private_enabled(Scheme::kCfMmseRobust));
  CHECK_FALSE(robust_private_enabled(Scheme::kRsMmse));
  CHECK(robust_private_enabled(Scheme::kRsRobustPrivate));
  CHECK(robust_private_enabled(Scheme::kRsRobustBoth));

  CHECK(robust_common_enabled(Scheme::kRsRobustBoth));
  CHECK_FALSE(robust_common_enabled(Scheme::kRsRobustPrivate));
}

TEST_CASE("common direction closed form in the scalar case") {
  // One AP, one user: raw = tau * g / (|g|^2 + theta).
  MatrixC g(1, 1);
  g(0, 0) = std::complex<double>(0.8, -0.6);
  MatrixC theta = MatrixC::Zero(1, 1);
  theta(0, 0) = 0.5;
  const double tau = std::sqrt(1.5);

  const auto dir = robust_common_direction(g, theta, tau);
  const std::complex<double> expected = tau * g(0, 0) / (1.0 + 0.5);
  CHECK(std::abs(dir.raw(0) - expected) < 1e-14);
  CHECK(dir.unit.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("zero error covariance takes the minimum-norm interpolator") {
  Rng rng(substream_seed(41, 0, kEstimate));
  const MatrixC g = random_estimate(6, 3, rng);
  const MatrixC theta = MatrixC::Zero(6, 6);
  const auto dir = robust_common_direction(g, theta, 1.0);

  // Interpolates the all-ones target ...
  const VectorC u = VectorC::Ones(3);
  CHECK((g.adjoint() * dir.raw - u).norm() < 1e-10);

  // ... with the minimum-norm solution g (g^H g)^{-1} u.
  const VectorC mn = g * (g.adjoint() * g).ldlt().solve(u);
  CHECK((dir.raw - mn).norm() < 1e-10 * mn.norm());

  // Square invertible case: plain inverse of g^H.
  const MatrixC gs = random_estimate(3, 3, rng);
  const auto sq = robust_common_direction(gs, MatrixC(MatrixC::Zero(3, 3)), 1.0);
  CHECK((gs.adjoint() * sq.raw - u).norm() < 1e-9 * u.norm());
}

TEST_CASE("common direction matches an iterative descent of its objective") {
  Rng rng(substream_seed(42, 0, kEstimate));
  for (int rep = 0; rep < 10; ++rep) {
    const MatrixC g = random_estimate(4, 2, rng);
    const MatrixR zeta = random_zeta(4, 2, rng);
    const double sigma_e2 = 0.3;
    const MatrixC theta = error_covariance(zeta, sigma_e2);
    const double tau = std::sqrt(1.0 + sigma_e2);

    const auto dir = robust_common_direction(g, theta, tau);
    const VectorC star = oracle::cg_minimize_common(g, theta, tau);
    CHECK((dir.raw - star).norm() <= 1e-6 * star.norm());
  }
}

TEST_CASE("finite differences vanish at the common solution") {
  Rng rng(substream_seed(43, 0, kEstimate));
  for (int rep = 0; rep < 10; ++rep) {
    const Index n_t = 3 + rep % 4;
    const Index k = 1 + rep % 3;
    const MatrixC g = random_estimate(n_t, k, rng);
    const MatrixC theta = error_covariance(random_zeta(n_t, k, rng), 0.2);
    const double tau = std::sqrt(1.2);

    const auto dir = robust_common_direction(g, theta, tau);
    const VectorR grad = oracle::fd_common_gradient(dir.raw, g, theta, tau);
    const VectorR at_zero =
        oracle::fd_common_gradient(VectorC::Zero(n_t), g, theta, tau);
    CHECK(grad.norm() < 1e-6 * (1.0 + at_zero.norm()));
  }
}

TEST_CASE("common direction scales contravariantly with the channel") {
  Rng rng(substream_seed(44, 0, kEstimate));
  const MatrixC g = random_estimate(5, 2, rng);
  const MatrixC theta = error_covariance(random_zeta(5, 2, rng), 0.4);
  const double tau = std::sqrt(1.4);
  const double c = 3.7;

  const auto base = robust_common_direction(g, theta, tau);
  const auto scaled = robust_common_direction<double>(c * g, c * c * theta, tau);
  CHECK((scaled.raw - base.raw / c).norm() < 1e-12 * base.raw.norm());
  CHECK((scaled.unit - base.unit).norm() < 1e-12);
}

TEST_CASE("degenerate common inputs are rejected") {
  const MatrixC zero = MatrixC::Zero(3, 2);
  CHECK_THROWS_AS(robust_common_direction(zero, MatrixC(MatrixC::Zero(3, 3)), 1.0),
                  DegenerateChannelError);
  MatrixC g(2, 1);
  g << std::complex<double>(1, 0), std::complex<double>(0, 1);
  CHECK_THROWS_AS(robust_common_direction(g, MatrixC(MatrixC::Zero(3, 3)), 1.0),
                  ConfigError);  // theta shape
}

TEST_CASE("private initialization closed form in the scalar case") {
  // P_bar0 = g / (|g|^2 + k sigma_n^2 / budget); the scaled precoder then
  // carries exactly the budget.
  MatrixC g(1, 1);
  g(0, 0) = std::complex<double>(1.2, 0.5);
  const double sigma_n2 = 0.3, p_t = 2.0, alpha_c = 0.5;
  const MatrixC theta = MatrixC::Zero(1, 1);

  const auto init = mmse_private_init(g, theta, 1.0, p_t, alpha_c, sigma_n2);
  const std::complex<double> expected =
      g(0, 0) / (std::norm(g(0, 0)) + sigma_n2 / (p_t - alpha_c));
  CHECK(std::abs(init.p_bar(0, 0) - expected) < 1e-14);
  CHECK(init.p_p.squaredNorm() ==
        doctest::Approx(p_t - alpha_c).epsilon(1e-12));

  // Multiplier at the initialization: k sigma_n^2 / (f^2 budget) minus the
  // error-covariance quadratic (zero here).
  CHECK(init.lambda == doctest::Approx(sigma_n2 / (init.f * init.f *
                                                   (p_t - alpha_c)))
                           .epsilon(1e-12));
}

TEST_CASE("initialization rejects infeasible power splits") {
  Rng rng(substream_seed(45, 0, kEstimate));
  const MatrixC g = random_estimate(4, 2, rng);
  const MatrixC theta = MatrixC::Zero(4, 4);
  CHECK_THROWS_AS(mmse_private_init(g, theta, 1.0, 1.0, 1.0, 0.1),
                  PowerBudgetError);
  CHECK_THROWS_AS(mmse_private_init(g, theta, 1.0, 1.0, 1.5, 0.1),
                  PowerBudgetError);
  CHECK_THROWS_AS(mmse_private_init(g, theta, 1.0, 1.0, -0.1, 0.1),
                  PowerBudgetError);
  CHECK_THROWS_AS(mmse_private_init(g, theta, 1.0, 1.0, 0.0, 0.0), ConfigError);
}

TEST_CASE("every refinement iterate satisfies the power budget exactly") {
  Rng rng(substream_seed(46, 0, kEstimate));
  for (int rep = 0; rep < 20; ++rep) {
    const Index n_t = 3 + rep % 6;
    const Index k = 1 + rep % 3;
    const MatrixR zeta = random_zeta(n_t, k, rng);
    const double sigma_e2 = 0.35;
    const MatrixC theta = error_covariance(zeta, sigma_e2);
    const double tau = std::sqrt(1.0 + sigma_e2);
    Rng draw(substream_seed(46, 100 + rep, kEstimate));
    const ChannelSet cs = draw_channel(zeta, sigma_e2, draw);

    const double p_t = 2.0, alpha_c = 0.4, sigma_n2 = 0.05;
    IterTrace trace;
    const PrecoderSet ps = robust_private(cs.g_hat, theta, tau, p_t, alpha_c,
                                          sigma_n2, 6, &trace);
    REQUIRE(trace.power.size() == 7);  // init + 6 passes
    for (double p : trace.power)
      CHECK(p == doctest::Approx(p_t - alpha_c).epsilon(1e-10));
    CHECK(ps.p_p.squaredNorm() ==
          doctest::Approx(p_t - alpha_c).epsilon(1e-10));
    CHECK(ps.p_c.norm() == 0.0);
    CHECK(ps.alpha_c == 0.0);
    CHECK(trace.f.size() == 7);
    CHECK(trace.lambda.size() == 7);
    CHECK(trace.j_p.size() == 7);
  }
}

TEST_CASE("zero refinement passes return the initialization") {
  Rng rng(substream_seed(47, 0, kEstimate));
  const MatrixC g = random_estimate(5, 3, rng);
  const MatrixC theta = error_covariance(random_zeta(5, 3, rng), 0.2);
  const double tau = std::sqrt(1.2);

  const auto init = mmse_private_init(g, theta, tau, 1.0, 0.0, 0.01);
  const PrecoderSet ps =
      robust_private(g, theta, tau, 1.0, 0.0, 0.01, 0);
  CHECK((ps.p_p - init.p_p).norm() == 0.0);
  CHECK(ps.f == init.f);
  CHECK(ps.lambda == init.lambda);
  CHECK_THROWS_AS(robust_private(g, theta, tau, 1.0, 0.0, 0.01, -1),
                  ConfigError);
}

TEST_CASE("conventional initialization is a fixed point without errors") {
  // With a zero error covariance the refinement reproduces its own
  // initialization to machine accuracy pass after pass.
  Rng rng(substream_seed(48, 0, kEstimate));
  const MatrixC g = random_estimate(6, 3, rng);
  const MatrixC theta = MatrixC::Zero(6, 6);

  const auto init = mmse_private_init(g, theta, 1.0, 3.0, 0.0, 0.02);
  const PrecoderSet ps = robust_private(g, theta, 1.0, 3.0, 0.0, 0.02, 5);
  CHECK((ps.p_p - init.p_p).norm() < 1e-10 * init.p_p.norm());
}

TEST_CASE("the refinement settles on well-conditioned instances") {
  // The undamped update can orbit an O(1)-amplitude limit cycle instead of a
  // fixed point; the cycling probability grows with the transmitter surplus
  // n_t/k (which leaves the gram rank-deficient, so the iterate matrix is
  // conditioned only by the small shifted terms), with the error variance
  // and with power. On near-square shapes at modest error variance settling
  // is generic: by iterate 25 one further update moves essentially every
  // draw by less than 1e-6.
  int settled = 0;
  const int shapes[4][2] = {{4, 3}, {4, 4}, {5, 4}, {6, 4}};
  for (int rep = 0; rep < 50; ++rep) {
    const Index n_t = shapes[rep % 4][0];
    const Index k = shapes[rep % 4][1];
    const double sigma_e2 = 0.02 + 0.002 * rep;
    Rng zr(substream_seed(49, rep, kGeometry));
    const MatrixR zeta = random_zeta(n_t, k, zr);
    const MatrixC theta = error_covariance(zeta, sigma_e2);
    Rng draw(substream_seed(49, 100 + rep, kEstimate));
    const ChannelSet cs = draw_channel(zeta, sigma_e2, draw);

    const auto p25 =
        robust_private(cs.g_hat, theta, cs.tau, 2.0, 0.4, 0.05, 25);
    const auto p26 =
        robust_private(cs.g_hat, theta, cs.tau, 2.0, 0.4, 0.05, 26);
    if ((p26.p_p - p25.p_p).norm() < 1e-6) ++settled;
  }
  CHECK(settled >= 48);
}

TEST_CASE("power stays pinned to the budget even when the update cycles") {
  Rng zr(substream_seed(62, 0, kGeometry));
  const MatrixR zeta = random_zeta(6, 3, zr);
  const MatrixC theta = error_covariance(zeta, 0.3);
  Rng draw(substream_seed(62, 1, kEstimate));
  const ChannelSet cs = draw_channel(zeta, 0.3, draw);

  IterTrace trace;
  const auto ps = robust_private(cs.g_hat, theta, cs.tau, 20.0, 4.0, 0.05, 30,
                                 &trace);
  for (double pw : trace.power)
    CHECK(pw == doctest::Approx(16.0).epsilon(1e-10));
  CHECK(ps.p_p.squaredNorm() == doctest::Approx(16.0).epsilon(1e-10));
}

TEST_CASE("objective value with an idle transmitter is pure noise penalty") {
  const Index n_t = 4, k = 2;
  Rng rng(substream_seed(50, 0, kEstimate));
  const MatrixC g = random_estimate(n_t, k, rng);
  const MatrixC theta = error_covariance(random_zeta(n_t, k, rng), 0.1);
  const double f = 0.7, sigma_n2 = 0.3;

  const double j0 = objective_jp(MatrixC(MatrixC::Zero(n_t, k)), f, g, theta,
                                 std::sqrt(1.1), sigma_n2);
  CHECK(j0 == doctest::Approx(k + k * sigma_n2 / (f * f)).epsilon(1e-14));
  CHECK_THROWS_AS(objective_jp(MatrixC(MatrixC::Zero(n_t, k)), 0.0, g, theta, 1.0, 0.3),
                  std::domain_error);
}

TEST_CASE("objective is real: its terms carry no imaginary residue") {
  Rng rng(substream_seed(51, 0, kEstimate));
  const MatrixC g = random_estimate(5, 3, rng);
  const MatrixC theta = error_covariance(random_zeta(5, 3, rng), 0.25);
  const MatrixC p = random_estimate(5, 3, rng);

  // Recompute the two quadratic forms with full complex traces.
  const std::complex<double> quad_theta = (p.adjoint() * theta * p).trace();
  const std::complex<double> quad_gram =
      (p.adjoint() * g * g.adjoint() * p).trace();
  CHECK(std::abs(quad_theta.imag()) < 1e-12 * std::abs(quad_theta.real()));
  CHECK(std::abs(quad_gram.imag()) < 1e-12 * std::abs(quad_gram.real()));
  CHECK(std::isfinite(objective_jp(p, 0.9, g, theta, std::sqrt(1.25), 0.1)));
}

TEST_CASE("objective decreases along the refinement on typical draws") {
  // Monitored, not guaranteed: the closure step re-projects the power, so
  // occasional upticks are possible. Report them without failing.
  Rng rng(substream_seed(52, 0, kEstimate));
  int monotone = 0;
  const int reps = 50;
  for (int rep = 0; rep < reps; ++rep) {
    const MatrixR zeta = random_zeta(6, 3, rng);
    const MatrixC theta = error_covariance(zeta, 0.3);
    Rng draw(substream_seed(52, rep, kEstimate));
    const ChannelSet cs = draw_channel(zeta, 0.3, draw);

    IterTrace trace;
    robust_private(cs.g_hat, theta, cs.tau, 2.0, 0.3, 0.05, 8, &trace);
    bool ok = true;
    for (size_t i = 1; i < trace.j_p.size(); ++i)
      if (trace.j_p[i] > trace.j_p[i - 1] * (1.0 + 1e-9)) ok = false;
    monotone += ok;
  }
  WARN_MESSAGE(monotone == reps, "objective rose on " << (reps - monotone)
                                                      << " of " << reps
                                                      << " refinements");
  CHECK(monotone > 0);
}

TEST_CASE("externally seeded iterates are closed onto the budget") {
  Rng rng(substream_seed(53, 0, kEstimate));
  const MatrixC p_bar = random_estimate(5, 2, rng);
  const MatrixC theta = error_covariance(random_zeta(5, 2, rng), 0.2);

  const auto init =
      private_init_from_pbar(p_bar, theta, std::sqrt(1.2), 1.5, 0.3, 0.05);
  CHECK(init.p_p.squaredNorm() == doctest::Approx(1.2).epsilon(1e-12));
  CHECK((init.p_bar - p_bar).norm() == 0.0);
  CHECK_THROWS_AS(
      private_init_from_pbar(p_bar, theta, 1.0, 1.0, 1.0, 0.05),
      PowerBudgetError);
  CHECK_THROWS_AS(
      private_init_from_pbar(MatrixC(MatrixC::Zero(5, 2)), theta, 1.0, 1.0, 0.0, 0.05),
      DegenerateChannelError);
}

TEST_CASE("schemes split the budget between common and private exactly") {
  Rng rng(substream_seed(54, 0, kEstimate));
  const MatrixR zeta = random_zeta(8, 3, rng);
  const double sigma_e2 = 0.3;
  const MatrixC theta = error_covariance(zeta, sigma_e2);
  Rng draw(substream_seed(54, 1, kEstimate));
  const ChannelSet cs = draw_channel(zeta, sigma_e2, draw);
  const double p_t = 2.5, alpha_c = 0.8, sigma_n2 = 0.04;

  for (Scheme s : kAllSchemes) {
    const PrecoderSet ps = build_scheme(s, cs.g_hat, theta, cs.tau, p_t,
                                        alpha_c, sigma_n2, 3);
    CHECK(ps.scheme == s);
    if (uses_common_stream(s)) {
      CHECK(ps.alpha_c == alpha_c);
      CHECK(ps.p_c.squaredNorm() == doctest::Approx(alpha_c).epsilon(1e-10));
      CHECK(ps.p_c.squaredNorm() + ps.p_p.squaredNorm() ==
            doctest::Approx(p_t).epsilon(1e-10));
    } else {
      CHECK(ps.alpha_c == 0.0);
      CHECK(ps.p_c.norm() == 0.0);
      CHECK(ps.p_p.squaredNorm() == doctest::Approx(p_t).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(build_scheme(Scheme::kRsMmse, cs.g_hat, theta, cs.tau, p_t,
                               p_t, sigma_n2, 3),
                  PowerBudgetError);
  CHECK_THROWS_AS(build_scheme(Scheme::kRsMmse, cs.g_hat, theta, cs.tau, p_t,
                               -0.1, sigma_n2, 3),
                  PowerBudgetError);
}

TEST_CASE("robust schemes collapse onto conventional ones without errors") {
  Rng rng(substream_seed(55, 0, kEstimate));
  const MatrixR zeta = random_zeta(6, 3, rng);

  // sigma_e^2 = 0: identical inputs reach identical code paths, so the
  // outputs agree bit for bit.
  {
    Rng draw(substream_seed(55, 1, kEstimate));
    const ChannelSet cs = draw_channel(zeta, 0.0, draw);
    const MatrixC theta = error_covariance(zeta, 0.0);
    const auto rb = build_scheme(Scheme::kCfMmseRobust, cs.g_hat, theta,
                                 cs.tau, 2.0, 0.0, 0.05, 4);
    const auto cv = build_scheme(Scheme::kCfMmse, cs.g_hat, theta, cs.tau,
                                 2.0, 0.0, 0.05, 4);
    CHECK((rb.p_p - cv.p_p).norm() == 0.0);

    const auto rs_rb = build_scheme(Scheme::kRsRobustBoth, cs.g_hat, theta,
                                    cs.tau, 2.0, 0.5, 0.05, 4);
    const auto rs_cv = build_scheme(Scheme::kRsMmse, cs.g_hat, theta, cs.tau,
                                    2.0, 0.5, 0.05, 4);
    CHECK((rs_rb.p_p - rs_cv.p_p).norm() == 0.0);
    CHECK((rs_rb.p_c - rs_cv.p_c).norm() == 0.0);
  }

  // Vanishing error variance: the private refinement is continuous in theta
  // for any shape (its noise ridge keeps the system definite). The common
  // direction's limit retains a theta-weighted null-space component, so it
  // matches the unweighted minimum-norm solution only when the null space is
  // empty (square channel) or theta is isotropic (uniform column sums).
  {
    const double eps = 1e-12;
    Rng draw(substream_seed(55, 2, kEstimate));
    const ChannelSet cs = draw_channel(zeta, eps, draw);
    const MatrixC theta = error_covariance(zeta, eps);
    const auto rb = build_scheme(Scheme::kRsRobustBoth, cs.g_hat, theta,
                                 cs.tau, 2.0, 0.5, 0.05, 4);
    const auto cv = build_scheme(Scheme::kRsMmse, cs.g_hat, theta, cs.tau,
                                 2.0, 0.5, 0.05, 4);
    CHECK((rb.p_p - cv.p_p).norm() <= 1e-6 * cv.p_p.norm());
  }
  {
    const double eps = 1e-12;
    Rng sq(substream_seed(55, 3, kEstimate));
    const MatrixR zeta_sq = random_zeta(3, 3, sq);
    Rng draw(substream_seed(55, 4, kEstimate));
    const ChannelSet cs = draw_channel(zeta_sq, eps, draw);
    const MatrixC theta = error_covariance(zeta_sq, eps);
    const auto rb = build_scheme(Scheme::kRsRobustBoth, cs.g_hat, theta,
                                 cs.tau, 2.0, 0.5, 0.05, 4);
    const auto cv = build_scheme(Scheme::kRsMmse, cs.g_hat, theta, cs.tau,
                                 2.0, 0.5, 0.05, 4);
    CHECK((rb.p_p - cv.p_p).norm() <= 1e-6 * cv.p_p.norm());
    CHECK((rb.p_c - cv.p_c).norm() <= 1e-6 * cv.p_c.norm());
  }
  {
    const double eps = 1e-12;
    const MatrixR zeta_uniform = MatrixR::Constant(6, 3, 1.0);
    Rng draw(substream_seed(55, 5, kEstimate));
    const ChannelSet cs = draw_channel(zeta_uniform, eps, draw);
    const MatrixC theta = error_covariance(zeta_uniform, eps);
    const auto rb = build_scheme(Scheme::kRsRobustBoth, cs.g_hat, theta,
                                 cs.tau, 2.0, 0.5, 0.05, 4);
    const auto cv = build_scheme(Scheme::kRsMmse, cs.g_hat, theta, cs.tau,
                                 2.0, 0.5, 0.05, 4);
    CHECK((rb.p_p - cv.p_p).norm() <= 1e-6 * cv.p_p.norm());
    CHECK((rb.p_c - cv.p_c).norm() <= 1e-6 * cv.p_c.norm());
  }
}

TEST_CASE("cell-free schemes ignore the requested common power") {
  Rng rng(substream_seed(56, 0, kEstimate));
  const MatrixC g = random_estimate(4, 2, rng);
  const MatrixC theta = MatrixC::Zero(4, 4);
  const auto ps =
      build_scheme(Scheme::kCfMmse, g, theta, 1.0, 1.0, 0.7, 0.05, 2);
  CHECK(ps.alpha_c == 0.0);
  CHECK(ps.p_c.norm() == 0.0);
  CHECK(ps.p_p.squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
}
