#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "rscf/errors.hpp"
#include "rscf/types.hpp"

namespace rscf {

enum class Scheme {
  kCfMmse,           // private-only, conventional
  kCfMmseRobust,     // private-only, robust private
  kRsMmse,           // rate-splitting, conventional common + private
  kRsRobustPrivate,  // rate-splitting, conventional common, robust private
  kRsRobustBoth,     // rate-splitting, robust common + robust private
};

inline constexpr std::array<Scheme, 5> kAllSchemes = {
    Scheme::kCfMmse, Scheme::kCfMmseRobust, Scheme::kRsMmse,
    Scheme::kRsRobustPrivate, Scheme::kRsRobustBoth};

inline const char* scheme_tag(Scheme s) {
  switch (s) {
    case Scheme::kCfMmse: return "CF-MMSE";
    case Scheme::kCfMmseRobust: return "CF-MMSE-RB";
    case Scheme::kRsMmse: return "RSCF-MMSE";
    case Scheme::kRsRobustPrivate: return "RSCF-MMSE-RB+PpRB";
    case Scheme::kRsRobustBoth: return "RSCF-MMSE-RB+PcRB";
  }
  throw ConfigError("scheme_tag: unknown scheme");
}

inline Scheme scheme_from_tag(const std::string& tag) {
  for (Scheme s : kAllSchemes)
    if (tag == scheme_tag(s)) return s;
  throw ConfigError("unknown scheme tag: " + tag);
}

inline bool uses_common_stream(Scheme s) {
  return s == Scheme::kRsMmse || s == Scheme::kRsRobustPrivate ||
         s == Scheme::kRsRobustBoth;
}
inline bool robust_private_enabled(Scheme s) {
  return s == Scheme::kCfMmseRobust || s == Scheme::kRsRobustPrivate ||
         s == Scheme::kRsRobustBoth;
}
inline bool robust_common_enabled(Scheme s) {
  return s == Scheme::kRsRobustBoth;
}

// Full transmit side for one channel draw. Power semantics: ||p_c||^2 is the
// common-stream power alpha_c and tr(P_p P_p^H) carries the remaining budget.
template <typename T>
struct PrecoderSetT {
  CVec<T> p_c;
  CMat<T> p_p;
  T alpha_c = T(0);
  T f = T(1);
  T lambda = T(0);
  Scheme scheme = Scheme::kCfMmse;
};
using PrecoderSet = PrecoderSetT<double>;

// Per-iterate record of the alternating private-precoder optimization, index
// 0 being the initialization.
template <typename T>
struct IterTraceT {
  std::vector<T> f;
  std::vector<T> lambda;
  std::vector<T> j_p;
  std::vector<T> power;
  std::vector<char> ridged;  // 1 where the linear solve needed a ridge

  int ridge_events() const {
    int n = 0;
    for (char c : ridged) n += c;
    return n;
  }
};
using IterTrace = IterTraceT<double>;

template <typename T>
struct CommonDirectionT {
  CVec<T> unit;  // transmit direction, unit norm
  CVec<T> raw;   // unnormalized least-squares solution
};

// Direction steering the common stream toward equal reception across users:
// raw = tau * (G_hat G_hat^H + theta)^{-1} G_hat u with u all-ones. A zero
// theta makes the normal matrix rank-deficient whenever K < N_t, so that
// branch takes the minimum-norm solution of G_hat^H x = u instead.
template <typename T>
CommonDirectionT<T> robust_common_direction(const CMat<T>& g_hat,
                                            const CMat<T>& theta, T tau) {
  const Index n_t = g_hat.rows();
  const Index k = g_hat.cols();
  if (k < 1 || n_t < 1)
    throw ConfigError("robust_common_direction: empty channel");
  if (theta.rows() != n_t || theta.cols() != n_t)
    throw ConfigError("robust_common_direction: theta shape mismatch");
  if (g_hat.norm() == T(0))
    throw DegenerateChannelError("robust_common_direction: all-zero estimate");

  const CVec<T> u = CVec<T>::Ones(k);
  CVec<T> raw(n_t);
  if (theta.norm() == T(0)) {
    Eigen::CompleteOrthogonalDecomposition<CMat<T>> cod(g_hat.adjoint());
    raw = tau * cod.solve(u);
  } else {
    // Solved in the stacked least-squares form: the normal-equation matrix
    // squares the conditioning, and when theta sits many orders below the
    // gram the roundoff it amplifies swamps the null-space component that
    // theta is supposed to pin down.
    Eigen::SelfAdjointEigenSolver<CMat<T>> es(theta);
    if (es.info() != Eigen::Success)
      throw ConfigError("robust_common_direction: theta factorization failed");
    const CMat<T> theta_half = es.eigenvectors() *
                               es.eigenvalues().cwiseMax(T(0)).cwiseSqrt()
                                   .template cast<std::complex<T>>()
                                   .asDiagonal() *
                               es.eigenvectors().adjoint();
    CMat<T> stacked(k + n_t, n_t);
    stacked.topRows(k) = g_hat.adjoint();
    stacked.bottomRows(n_t) = theta_half;
    CVec<T> rhs = CVec<T>::Zero(k + n_t);
    rhs.head(k) = u;
    Eigen::CompleteOrthogonalDecomposition<CMat<T>> cod(stacked);
    raw = tau * cod.solve(rhs);
  }

  const T nrm = raw.norm();
  if (!(nrm > T(0)))
    throw DegenerateChannelError("robust_common_direction: zero direction");
  CommonDirectionT<T> out;
  out.raw = raw;
  out.unit = raw / nrm;
  return out;
}

// Mean-square error of the received private streams against the transmitted
// symbols, as a function of the scaled precoder and receive gain.
template <typename T>
T objective_jp(const CMat<T>& p_p, T f, const CMat<T>& g_hat,
               const CMat<T>& theta, T tau, T sigma_n2) {
  if (!(f > T(0))) throw std::domain_error("objective_jp: f must be positive");
  const Index k = g_hat.cols();
  const T tau2 = tau * tau;
  const T f2 = f * f;
  const CMat<T> gp = g_hat.adjoint() * p_p;  // K x K
  const T cross = T(2) * gp.trace().real();
  const T theta_quad =
      (p_p.conjugate().cwiseProduct(theta * p_p)).sum().real();
  const T gram = gp.squaredNorm();
  return T(k) - cross / (f * tau) + theta_quad / tau2 +
         (gram + theta_quad) / (f2 * tau2) + T(k) * sigma_n2 / f2;
}

namespace detail {

// One application of the closure step: given an unscaled iterate P_bar,
// produce the power-feasible precoder, its gain and the multiplier.
template <typename T>
void close_iterate(const CMat<T>& p_bar, const CMat<T>& theta, T tau,
                   T budget, T sigma_n2, Index k, CMat<T>& p_p, T& f,
                   T& lambda) {
  const T tr = p_bar.squaredNorm();
  if (!(tr > T(0)))
    throw DegenerateChannelError("private precoder: zero iterate");
  f = std::sqrt(budget / tr) / tau;
  p_p = (f * tau) * p_bar;
  const T theta_quad = (p_p.conjugate().cwiseProduct(theta * p_p)).sum().real();
  lambda = T(k) * sigma_n2 / (f * f * budget) - theta_quad / (tau * tau * budget);
}

}  // namespace detail

template <typename T>
struct PrivateInitT {
  CMat<T> p_bar;
  CMat<T> p_p;
  T f = T(0);
  T lambda = T(0);
};

// Regularized least-squares initialization of the private precoder. With a
// zero theta and tau = 1 this IS the conventional MMSE precoder, and it is a
// fixed point of the iteration below.
template <typename T>
PrivateInitT<T> mmse_private_init(const CMat<T>& g_hat, const CMat<T>& theta,
                                  T tau, T p_t, T alpha_c, T sigma_n2) {
  const Index k = g_hat.cols();
  if (!(sigma_n2 > T(0)))
    throw ConfigError("mmse_private_init: sigma_n2 must be positive");
  if (!(alpha_c < p_t))
    throw PowerBudgetError("mmse_private_init: alpha_c must stay below p_t");
  if (alpha_c < T(0))
    throw PowerBudgetError("mmse_private_init: alpha_c must be non-negative");

  const T budget = p_t - alpha_c;
  const T reg = T(k) * sigma_n2 / budget;
  CMat<T> m = g_hat * g_hat.adjoint();
  m.diagonal().array() += reg;

  PrivateInitT<T> init;
  Eigen::LDLT<CMat<T>> ldlt(m);
  if (ldlt.info() == Eigen::Success) {
    init.p_bar = ldlt.solve(g_hat);
  } else {
    init.p_bar = m.fullPivLu().solve(g_hat);
  }
  detail::close_iterate(init.p_bar, theta, tau, budget, sigma_n2, k, init.p_p,
                        init.f, init.lambda);
  return init;
}

// Closes an externally chosen starting iterate (e.g. a random matrix for
// convergence studies) into a feasible initialization.
template <typename T>
PrivateInitT<T> private_init_from_pbar(const CMat<T>& p_bar,
                                       const CMat<T>& theta, T tau, T p_t,
                                       T alpha_c, T sigma_n2) {
  if (!(alpha_c < p_t) || alpha_c < T(0))
    throw PowerBudgetError("private_init_from_pbar: alpha_c outside [0, p_t)");
  PrivateInitT<T> init;
  init.p_bar = p_bar;
  detail::close_iterate(p_bar, theta, tau, p_t - alpha_c, sigma_n2,
                        p_bar.cols(), init.p_p, init.f, init.lambda);
  return init;
}

// Alternating refinement of the private precoder: each pass rebuilds the
// linear system from the previous gain and multiplier, then rescales to the
// exact power budget. The system matrix can lose definiteness when lambda
// goes negative; a singular solve falls back to a small ridge and the trace
// records it.
template <typename T>
PrecoderSetT<T> robust_private_from_init(const CMat<T>& g_hat,
                                         const CMat<T>& theta, T tau, T p_t,
                                         T alpha_c, T sigma_n2, int i_t,
                                         const PrivateInitT<T>& init,
                                         IterTraceT<T>* trace = nullptr) {
  const Index n_t = g_hat.rows();
  const Index k = g_hat.cols();
  if (i_t < 0) throw ConfigError("robust_private: i_t must be >= 0");
  const T budget = p_t - alpha_c;

  CMat<T> p_p = init.p_p;
  T f = init.f;
  T lambda = init.lambda;

  auto record = [&](bool ridged) {
    if (!trace) return;
    trace->f.push_back(f);
    trace->lambda.push_back(lambda);
    trace->j_p.push_back(objective_jp(p_p, f, g_hat, theta, tau, sigma_n2));
    trace->power.push_back(p_p.squaredNorm());
    trace->ridged.push_back(ridged ? 1 : 0);
  };
  record(false);

  const CMat<T> gram = g_hat * g_hat.adjoint();
  CMat<T> p_bar(n_t, k);
  for (int i = 1; i <= i_t; ++i) {
    const T f2 = f * f;
    CMat<T> m = gram + (T(1) + f2) * theta;
    m.diagonal().array() += lambda * f2 * tau * tau;

    bool ridged = false;
    Eigen::FullPivLU<CMat<T>> lu(m);
    if (!lu.isInvertible()) {
      m.diagonal().array() += T(1e-10) * gram.real().trace() / T(n_t);
      lu.compute(m);
      ridged = true;
    }
    p_bar = lu.solve(g_hat);
    detail::close_iterate(p_bar, theta, tau, budget, sigma_n2, k, p_p, f,
                          lambda);
    record(ridged);
  }

  PrecoderSetT<T> out;
  out.p_c = CVec<T>::Zero(n_t);
  out.p_p = p_p;
  out.alpha_c = T(0);
  out.f = f;
  out.lambda = lambda;
  return out;
}

template <typename T>
PrecoderSetT<T> robust_private(const CMat<T>& g_hat, const CMat<T>& theta,
                               T tau, T p_t, T alpha_c, T sigma_n2, int i_t,
                               IterTraceT<T>* trace = nullptr) {
  const PrivateInitT<T> init =
      mmse_private_init(g_hat, theta, tau, p_t, alpha_c, sigma_n2);
  return robust_private_from_init(g_hat, theta, tau, p_t, alpha_c, sigma_n2,
                                  i_t, init, trace);
}

// Assembles one of the five transmit schemes. Conventional variants run the
// same machinery with a zero error covariance and unit scaling; cell-free
// (non-RS) variants carry no common stream regardless of alpha_c.
template <typename T>
PrecoderSetT<T> build_scheme(Scheme scheme, const CMat<T>& g_eff,
                             const CMat<T>& theta, T tau, T p_t, T alpha_c,
                             T sigma_n2, int i_t,
                             IterTraceT<T>* trace = nullptr) {
  const Index n_t = g_eff.rows();
  const CMat<T> theta_zero = CMat<T>::Zero(n_t, n_t);

  const bool rs = uses_common_stream(scheme);
  const T ac = rs ? alpha_c : T(0);
  if (ac < T(0) || !(ac < p_t))
    throw PowerBudgetError("build_scheme: alpha_c outside [0, p_t)");

  const CMat<T>& theta_p = robust_private_enabled(scheme) ? theta : theta_zero;
  const T tau_p = robust_private_enabled(scheme) ? tau : T(1);

  PrecoderSetT<T> ps =
      robust_private(g_eff, theta_p, tau_p, p_t, ac, sigma_n2, i_t, trace);
  ps.scheme = scheme;
  ps.alpha_c = ac;
  if (rs && ac > T(0)) {
    const CMat<T>& theta_c = robust_common_enabled(scheme) ? theta : theta_zero;
    const T tau_c = robust_common_enabled(scheme) ? tau : T(1);
    ps.p_c = std::sqrt(ac) *
             robust_common_direction(g_eff, theta_c, tau_c).unit;
  }
  return ps;
}

}  // namespace rscf
