#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "rscf/channel.hpp"
#include "rscf/errors.hpp"
#include "rscf/precoders.hpp"
#include "rscf/types.hpp"

namespace rscf {

// Per-draw SINRs and rates. The common rate is the minimum over users since
// every receiver must decode the common stream before cancelling it.
template <typename T>
struct RateSampleT {
  RVec<T> gamma_c;
  RVec<T> gamma_p;
  T r_c = T(0);
  RVec<T> r_k;
  T sum = T(0);
};
using RateSample = RateSampleT<double>;

namespace detail {

// Denominators can go non-positive in deep error tails (the error component
// nearly cancels the estimated signal); the SINR is floored at zero so rates
// stay defined.
template <typename T>
T clamp_sinr(T num, T den) {
  if (!(den > T(0))) return T(0);
  const T g = num / den;
  return g > T(0) ? g : T(0);
}

}  // namespace detail

// Rate evaluation for one precoder against one channel estimate, reusing the
// estimate-side products across error draws. All SINRs reduce to entries of
// a = G_hat^H P_p, b = G_tilde^H P_p and their common-stream counterparts.
template <typename T>
class RateContextT {
 public:
  RateContextT(const CMat<T>& g_hat, const PrecoderSetT<T>& ps, T tau,
               T sigma_n2)
      : p_p_(ps.p_p),
        p_c_(ps.p_c),
        a_(g_hat.adjoint() * ps.p_p),
        a_c_(g_hat.adjoint() * ps.p_c),
        tau2_(tau * tau),
        sigma_n2_(sigma_n2),
        has_common_(ps.p_c.squaredNorm() > T(0)) {
    if (g_hat.cols() != ps.p_p.cols())
      throw ConfigError("RateContext: user-count mismatch");
    if (!(sigma_n2 > T(0)))
      throw ConfigError("RateContext: sigma_n2 must be positive");
  }

  RateSampleT<T> rates(const CMat<T>& g_tilde) const {
    const Index k = a_.rows();
    const CMat<T> b = g_tilde.adjoint() * p_p_;
    const CVec<T> b_c = g_tilde.adjoint() * p_c_;

    RateSampleT<T> out;
    out.gamma_c.resize(k);
    out.gamma_p.resize(k);
    out.r_k.resize(k);

    const T noise = tau2_ * sigma_n2_;
    for (Index u = 0; u < k; ++u) {
      // Private stream: estimated signal against cross-stream interference
      // plus the self-error terms of every stream.
      T den = noise;
      for (Index i = 0; i < k; ++i) {
        const T cross = T(2) * (std::conj(a_(u, i)) * b(u, i)).real() +
                        std::norm(b(u, i));
        den += cross;
        if (i != u) den += std::norm(a_(u, i));
      }
      out.gamma_p(u) = detail::clamp_sinr(std::norm(a_(u, u)), den);

      // Common stream: private streams are not yet cancelled, so their full
      // received power joins the noise.
      if (has_common_) {
        T den_c = noise;
        for (Index i = 0; i < k; ++i)
          den_c += std::norm(a_(u, i) + b(u, i));
        den_c += T(2) * (std::conj(a_c_(u)) * b_c(u)).real() +
                 std::norm(b_c(u));
        out.gamma_c(u) = detail::clamp_sinr(std::norm(a_c_(u)), den_c);
      } else {
        out.gamma_c(u) = T(0);
      }
    }

    out.r_c = has_common_
                  ? std::log2(T(1) + out.gamma_c.minCoeff())
                  : T(0);
    out.sum = out.r_c;
    for (Index u = 0; u < k; ++u) {
      out.r_k(u) = std::log2(T(1) + out.gamma_p(u));
      out.sum += out.r_k(u);
    }
    return out;
  }

 private:
  CMat<T> p_p_;
  CVec<T> p_c_;
  CMat<T> a_;
  CVec<T> a_c_;
  T tau2_;
  T sigma_n2_;
  bool has_common_;
};
using RateContext = RateContextT<double>;

template <typename T>
RVec<T> sinr_private(const CMat<T>& g_hat, const CMat<T>& g_tilde, T tau,
                     const PrecoderSetT<T>& ps, T sigma_n2) {
  return RateContextT<T>(g_hat, ps, tau, sigma_n2).rates(g_tilde).gamma_p;
}

template <typename T>
RVec<T> sinr_common(const CMat<T>& g_hat, const CMat<T>& g_tilde, T tau,
                    const PrecoderSetT<T>& ps, T sigma_n2) {
  return RateContextT<T>(g_hat, ps, tau, sigma_n2).rates(g_tilde).gamma_c;
}

template <typename T>
RateSampleT<T> instantaneous_rates(const CMat<T>& g_hat, const CMat<T>& g_tilde,
                                   T tau, const PrecoderSetT<T>& ps,
                                   T sigma_n2) {
  return RateContextT<T>(g_hat, ps, tau, sigma_n2).rates(g_tilde);
}

inline RVec<double> sinr_private(const ChannelSet& cs, const PrecoderSet& ps,
                                 double sigma_n2) {
  return sinr_private(cs.g_hat, cs.g_tilde, cs.tau, ps, sigma_n2);
}
inline RVec<double> sinr_common(const ChannelSet& cs, const PrecoderSet& ps,
                                double sigma_n2) {
  return sinr_common(cs.g_hat, cs.g_tilde, cs.tau, ps, sigma_n2);
}
inline RateSample instantaneous_rates(const ChannelSet& cs,
                                      const PrecoderSet& ps, double sigma_n2) {
  return instantaneous_rates(cs.g_hat, cs.g_tilde, cs.tau, ps, sigma_n2);
}

// Mean rate sample over a fixed list of error draws; the gamma fields carry
// plain SINR averages for diagnostics, while the rate fields are averaged
// rates (conditional average given the estimate).
template <typename T>
RateSampleT<T> average_rates(const RateContextT<T>& ctx,
                             const std::vector<CMat<T>>& errors) {
  if (errors.empty())
    throw ConfigError("average_rates: need at least one error draw");
  RateSampleT<T> acc = ctx.rates(errors[0]);
  for (size_t j = 1; j < errors.size(); ++j) {
    const RateSampleT<T> s = ctx.rates(errors[j]);
    acc.gamma_c += s.gamma_c;
    acc.gamma_p += s.gamma_p;
    acc.r_k += s.r_k;
    acc.r_c += s.r_c;
    acc.sum += s.sum;
  }
  const T inv = T(1) / T(errors.size());
  acc.gamma_c *= inv;
  acc.gamma_p *= inv;
  acc.r_k *= inv;
  acc.r_c *= inv;
  acc.sum *= inv;
  return acc;
}

// Conditional-average rates for one estimate: the precoder is fixed and only
// the error redraws, n_err times.
inline RateSample average_over_errors(const ChannelSet& cs,
                                      const PrecoderSet& ps, double sigma_n2,
                                      int n_err, Rng& rng) {
  if (n_err < 1) throw ConfigError("average_over_errors: n_err must be >= 1");
  RateContext ctx(cs.g_hat, ps, cs.tau, sigma_n2);
  std::vector<MatrixC> errors;
  errors.reserve(static_cast<size_t>(n_err));
  ChannelSet draw = cs;
  for (int j = 0; j < n_err; ++j) {
    draw = redraw_error(draw, rng);
    errors.push_back(draw.g_tilde);
  }
  return average_rates(ctx, errors);
}

// Exhaustive common-power search on the fractional grid
// {0, s, 2s, ...} * p_t up to (1 - s) * p_t. Every candidate rebuilds the
// full precoder pair and is scored by the error-averaged sum rate on the
// SAME error draws; ties keep the smaller allocation.
template <typename T>
T allocate_alpha_c(Scheme scheme, const CMat<T>& g_eff, const CMat<T>& g_hat,
                   const CMat<T>& theta, T tau, T p_t, T sigma_n2, int i_t,
                   T grid_step, const std::vector<CMat<T>>& errors) {
  if (!(grid_step > T(0)) || grid_step > T(1))
    throw ConfigError("allocate_alpha_c: grid_step must lie in (0, 1]");
  if (!uses_common_stream(scheme)) return T(0);

  const int points = static_cast<int>(std::llround(T(1) / grid_step));
  T best_alpha = T(0);
  T best_rate = T(0);
  bool first = true;
  for (int i = 0; i < points; ++i) {
    const T alpha = T(i) * grid_step * p_t;
    const PrecoderSetT<T> ps =
        build_scheme(scheme, g_eff, theta, tau, p_t, alpha, sigma_n2, i_t);
    const RateContextT<T> ctx(g_hat, ps, tau, sigma_n2);
    const T rate = average_rates(ctx, errors).sum;
    if (first || rate > best_rate) {
      best_rate = rate;
      best_alpha = alpha;
      first = false;
    }
  }
  return best_alpha;
}

}  // namespace rscf
