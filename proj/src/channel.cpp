#include "rscf/channel.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace rscf {

NetworkGeometry place_network(Index n_t, Index k, double region_side, Rng& rng,
                              double h_ap, double h_ue) {
  if (k < 1) throw ConfigError("place_network: need at least one user");
  if (n_t < k)
    throw ConfigError("place_network: underloaded system requires n_t >= k");
  if (!(region_side > 0.0))
    throw ConfigError("place_network: region_side must be positive");

  NetworkGeometry geom;
  geom.h_ap = h_ap;
  geom.h_ue = h_ue;
  geom.region_side = region_side;
  geom.ap_xy.resize(n_t, 2);
  geom.ue_xy.resize(k, 2);
  for (Index n = 0; n < n_t; ++n) {
    geom.ap_xy(n, 0) = region_side * rng.uniform();
    geom.ap_xy(n, 1) = region_side * rng.uniform();
  }
  for (Index u = 0; u < k; ++u) {
    geom.ue_xy(u, 0) = region_side * rng.uniform();
    geom.ue_xy(u, 1) = region_side * rng.uniform();
  }
  return geom;
}

double attenuation_db(double freq_mhz, double h_ap_m, double h_ue_m) {
  const double lf = std::log10(freq_mhz);
  return 46.3 + 33.9 * lf - 13.82 * std::log10(h_ap_m) -
         (1.1 * lf - 0.7) * h_ue_m + (1.56 * lf - 0.8);
}

double path_loss_db(double d_m, double freq_mhz, double h_ap_m, double h_ue_m) {
  const double att = attenuation_db(freq_mhz, h_ap_m, h_ue_m);
  const double d0 = 10.0;
  const double d1 = 50.0;
  if (d_m > d1) return -att - 35.0 * std::log10(d_m);
  if (d_m > d0) return -att - 15.0 * std::log10(d1) - 20.0 * std::log10(d_m);
  return -att - 15.0 * std::log10(d1) - 20.0 * std::log10(d0);
}

MatrixR link_distances(const NetworkGeometry& geom) {
  const Index n_t = geom.n_aps();
  const Index k = geom.n_users();
  MatrixR d(n_t, k);
  for (Index n = 0; n < n_t; ++n)
    for (Index u = 0; u < k; ++u)
      d(n, u) = (geom.ap_xy.row(n) - geom.ue_xy.row(u)).norm();
  return d;
}

MatrixR large_scale(const NetworkGeometry& geom, double freq_mhz,
                    double shadow_std_db, Rng& rng) {
  const MatrixR d = link_distances(geom);
  MatrixR zeta(d.rows(), d.cols());
  for (Index n = 0; n < d.rows(); ++n) {
    for (Index u = 0; u < d.cols(); ++u) {
      const double pl = path_loss_db(d(n, u), freq_mhz, geom.h_ap, geom.h_ue);
      const double shadow = shadow_std_db * rng.normal();
      zeta(n, u) = db_to_linear(pl + shadow);
    }
  }
  return zeta;
}

ChannelSet draw_channel(const MatrixR& zeta, double sigma_e2, Rng& rng) {
  if (sigma_e2 < 0.0)
    throw ConfigError("draw_channel: sigma_e2 must be non-negative");
  ChannelSet cs;
  cs.zeta = zeta;
  cs.sigma_e2 = sigma_e2;
  cs.tau = std::sqrt(1.0 + sigma_e2);
  cs.g_hat.resize(zeta.rows(), zeta.cols());
  cs.g_tilde.resize(zeta.rows(), zeta.cols());
  for (Index n = 0; n < zeta.rows(); ++n) {
    for (Index u = 0; u < zeta.cols(); ++u) {
      cs.g_hat(n, u) = rng.cnormal(zeta(n, u));
      cs.g_tilde(n, u) = rng.cnormal(sigma_e2 * zeta(n, u));
    }
  }
  cs.g = (cs.g_hat + cs.g_tilde) / cs.tau;
  return cs;
}

ChannelSet redraw_error(const ChannelSet& cs, Rng& rng) {
  ChannelSet out = cs;
  for (Index n = 0; n < out.zeta.rows(); ++n)
    for (Index u = 0; u < out.zeta.cols(); ++u)
      out.g_tilde(n, u) = rng.cnormal(out.sigma_e2 * out.zeta(n, u));
  out.g = (out.g_hat + out.g_tilde) / out.tau;
  return out;
}

MatrixC error_covariance(const MatrixR& zeta, double sigma_e2) {
  if (sigma_e2 < 0.0)
    throw ConfigError("error_covariance: sigma_e2 must be non-negative");
  MatrixC theta = MatrixC::Zero(zeta.rows(), zeta.rows());
  const VectorR row_power = zeta.rowwise().sum();
  for (Index n = 0; n < zeta.rows(); ++n)
    theta(n, n) = sigma_e2 * row_power(n);
  return theta;
}

double noise_variance(const NoiseModel& nm) {
  if (!(nm.temperature_k > 0.0))
    throw ConfigError("noise_variance: temperature_k must be positive");
  if (!(nm.boltzmann_j_per_k > 0.0))
    throw ConfigError("noise_variance: boltzmann_j_per_k must be positive");
  if (!(nm.bandwidth_hz > 0.0))
    throw ConfigError("noise_variance: bandwidth_hz must be positive");
  return nm.temperature_k * nm.boltzmann_j_per_k * nm.bandwidth_hz *
         db_to_linear(nm.noise_figure_db);
}

double pt_for_snr(double snr_db, const MatrixR& zeta, double sigma_n2) {
  if (!(sigma_n2 > 0.0))
    throw ConfigError("pt_for_snr: sigma_n2 must be positive");
  const double total = zeta.sum();
  if (!(total > 0.0))
    throw DegenerateChannelError("pt_for_snr: zeta has no power");
  return db_to_linear(snr_db) * static_cast<double>(zeta.rows()) *
         static_cast<double>(zeta.cols()) * sigma_n2 / total;
}

double snr_for_pt(double p_t, const MatrixR& zeta, double sigma_n2) {
  if (!(sigma_n2 > 0.0))
    throw ConfigError("snr_for_pt: sigma_n2 must be positive");
  const double total = zeta.sum();
  if (!(total > 0.0))
    throw DegenerateChannelError("snr_for_pt: zeta has no power");
  return linear_to_db(p_t * total /
                      (static_cast<double>(zeta.rows()) *
                       static_cast<double>(zeta.cols()) * sigma_n2));
}

std::string geometry_csv(const NetworkGeometry& geom) {
  std::string out = "kind,index,x,y,z\n";
  char buf[160];
  for (Index n = 0; n < geom.n_aps(); ++n) {
    std::snprintf(buf, sizeof(buf), "ap,%lld,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(n), geom.ap_xy(n, 0), geom.ap_xy(n, 1),
                  geom.h_ap);
    out += buf;
  }
  for (Index u = 0; u < geom.n_users(); ++u) {
    std::snprintf(buf, sizeof(buf), "ue,%lld,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(u), geom.ue_xy(u, 0), geom.ue_xy(u, 1),
                  geom.h_ue);
    out += buf;
  }
  return out;
}

}  // namespace rscf
