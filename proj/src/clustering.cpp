#include "rscf/clustering.hpp"

#include <algorithm>

#include "rscf/errors.hpp"

namespace rscf {

bool ClusterAssignment::serves(Index ap, Index user) const {
  const auto& s = sets.at(static_cast<size_t>(user));
  return std::binary_search(s.begin(), s.end(), ap);
}

ClusterAssignment select_aps(const MatrixR& zeta) {
  if (zeta.size() == 0)
    throw ConfigError("select_aps: empty gain matrix");
  const Index n_t = zeta.rows();
  const Index k = zeta.cols();
  const double mean = zeta.mean();

  ClusterAssignment out;
  out.n_aps = n_t;
  out.sets.resize(static_cast<size_t>(k));
  for (Index u = 0; u < k; ++u) {
    auto& s = out.sets[static_cast<size_t>(u)];
    for (Index n = 0; n < n_t; ++n)
      if (zeta(n, u) - mean > 0.0) s.push_back(n);
    if (s.empty()) {
      Index best = 0;
      for (Index n = 1; n < n_t; ++n)
        if (zeta(n, u) > zeta(best, u)) best = n;
      s.push_back(best);
    }
  }
  return out;
}

MatrixC sparsify(const MatrixC& g_hat, const ClusterAssignment& clusters) {
  if (g_hat.rows() != clusters.n_aps ||
      g_hat.cols() != static_cast<Index>(clusters.sets.size()))
    throw ConfigError("sparsify: assignment shape mismatch");
  MatrixC g_bar = MatrixC::Zero(g_hat.rows(), g_hat.cols());
  for (Index u = 0; u < g_hat.cols(); ++u)
    for (Index n : clusters.sets[static_cast<size_t>(u)])
      g_bar(n, u) = g_hat(n, u);
  return g_bar;
}

std::string cluster_sets_json(const ClusterAssignment& clusters) {
  std::string out = "{\"n_aps\":" + std::to_string(clusters.n_aps) +
                    ",\"sets\":[";
  for (size_t u = 0; u < clusters.sets.size(); ++u) {
    if (u) out += ',';
    out += '[';
    for (size_t i = 0; i < clusters.sets[u].size(); ++i) {
      if (i) out += ',';
      out += std::to_string(clusters.sets[u][i]);
    }
    out += ']';
  }
  out += "]}";
  return out;
}

}  // namespace rscf
