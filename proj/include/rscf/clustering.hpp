#pragma once

#include <string>
#include <vector>

#include "rscf/types.hpp"

namespace rscf {

// Per-user serving sets over the AP index range [0, n_t).
struct ClusterAssignment {
  std::vector<std::vector<Index>> sets;  // sets[k] sorted ascending
  Index n_aps = 0;

  bool serves(Index ap, Index user) const;
};

// AP n serves user k iff zeta(n,k) exceeds the global mean of zeta. A user
// left with no AP above the mean gets its single strongest AP (lowest index
// on ties), so every set is non-empty.
ClusterAssignment select_aps(const MatrixR& zeta);

// Zeroes the estimate outside each user's serving set.
MatrixC sparsify(const MatrixC& g_hat, const ClusterAssignment& clusters);

// Compact JSON: {"n_aps":N,"sets":[[...],[...]]}, users in order.
std::string cluster_sets_json(const ClusterAssignment& clusters);

}  // namespace rscf
