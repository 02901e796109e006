#pragma once

#include <string>

#include "rscf/errors.hpp"
#include "rscf/rng.hpp"
#include "rscf/types.hpp"

namespace rscf {

// Planar AP/UE layout over a square region. Heights enter the attenuation
// term only; link distances are taken in the plane.
struct NetworkGeometry {
  MatrixR ap_xy;  // N_t x 2, meters
  MatrixR ue_xy;  // K x 2, meters
  double h_ap = 15.0;
  double h_ue = 1.65;
  double region_side = 0.0;

  Index n_aps() const { return ap_xy.rows(); }
  Index n_users() const { return ue_xy.rows(); }
};

// One fading realization: large-scale gains, estimate, error and the true
// channel they compose to. g = (g_hat + g_tilde) / tau holds entrywise.
struct ChannelSet {
  MatrixR zeta;     // N_t x K, linear scale
  MatrixC g;        // true channel
  MatrixC g_hat;    // estimate
  MatrixC g_tilde;  // estimation error
  double sigma_e2 = 0.0;
  double tau = 1.0;

  Index n_aps() const { return zeta.rows(); }
  Index n_users() const { return zeta.cols(); }
};

struct NoiseModel {
  double temperature_k = 290.0;
  double boltzmann_j_per_k = 1.381e-23;
  double bandwidth_hz = 50e6;
  double noise_figure_db = 10.0;
};

// Uniform AP/UE placement on [0, side]^2. Requires n_t >= k >= 1 (underloaded)
// and side > 0.
NetworkGeometry place_network(Index n_t, Index k, double region_side, Rng& rng,
                              double h_ap = 15.0, double h_ue = 1.65);

// Hata-style attenuation constant L in dB.
double attenuation_db(double freq_mhz, double h_ap_m, double h_ue_m);

// Three-slope path loss in dB (negative). Breakpoints d0 = 10 m, d1 = 50 m:
//   d > d1        : -L - 35 log10(d)
//   d0 < d <= d1  : -L - 15 log10(d1) - 20 log10(d)
//   otherwise     : -L - 15 log10(d1) - 20 log10(d0)
double path_loss_db(double d_m, double freq_mhz, double h_ap_m, double h_ue_m);

// Planar AP-to-UE distance matrix, N_t x K.
MatrixR link_distances(const NetworkGeometry& geom);

// Large-scale gains zeta = pathloss * lognormal shadowing, linear scale.
MatrixR large_scale(const NetworkGeometry& geom, double freq_mhz,
                    double shadow_std_db, Rng& rng);

// Draws g_hat with per-entry variance zeta and an independent error g_tilde
// with variance sigma_e2 * zeta, then assembles g = (g_hat + g_tilde) / tau.
ChannelSet draw_channel(const MatrixR& zeta, double sigma_e2, Rng& rng);

// Fresh error matrix for a fixed estimate; zeta and g_hat are retained.
ChannelSet redraw_error(const ChannelSet& cs, Rng& rng);

// theta = E[g_tilde g_tilde^H]; diagonal with entries sigma_e2 * sum_k zeta.
MatrixC error_covariance(const MatrixR& zeta, double sigma_e2);

// sigma_n^2 = T_o * k_B * B * 10^(N_f/10), Watts.
double noise_variance(const NoiseModel& nm);

// Transmit power realizing the requested SNR for a given geometry, using
// E[tr(G^H G)] = sum(zeta): P_t = 10^(snr/10) * N_t * K * sigma_n2 / sum(zeta).
double pt_for_snr(double snr_db, const MatrixR& zeta, double sigma_n2);

// Inverse of pt_for_snr, for round-trip checks.
double snr_for_pt(double p_t, const MatrixR& zeta, double sigma_n2);

// Debug dump: one "kind,index,x,y,z" row per node.
std::string geometry_csv(const NetworkGeometry& geom);

}  // namespace rscf
