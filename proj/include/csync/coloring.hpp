#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "csync/network.hpp"
#include "csync/partition.hpp"

namespace csync {

/// Absolute tolerance used when comparing summed in-weights.
inline constexpr double kWeightTolerance = 1e-9;

/// True iff nodes in each cluster share a node type and, for every layer and
/// every cluster, receive the same summed in-weight from that cluster.
bool is_balanced(const Network& net, const Partition& p, double tol = kWeightTolerance);

/// Coarsest balanced partition refining `start`. Iteratively splits clusters
/// by each node's per-(layer, cluster) in-weight signature until a fixed point.
Partition coarsest_balanced_refinement(const Network& net, const Partition& start,
                                       double tol = kWeightTolerance);

/// Minimal balanced coloring: coarsest balanced refinement of the node-type classes.
Partition minimal_balanced_coloring(const Network& net);

class UnbalancedPartition : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reduced Q-node network of a balanced partition.
struct QuotientNetwork {
  Partition partition;
  /// R[k](q, p) = summed weight a node of cluster q receives from cluster p in layer k.
  std::vector<Matrix> R;
  std::vector<int> cluster_type;
  std::vector<double> sigma;
  std::vector<double> delay;
  std::vector<std::string> coupling;
  int state_dim = 1;

  int size() const { return partition.cluster_count(); }
  double max_delay() const;
};

/// Throws UnbalancedPartition if the row sums depend on the representative.
QuotientNetwork quotient(const Network& net, const Partition& p);

/// Largest deviation of any cluster member's row sum from the quotient entry.
double quotient_residual(const Network& net, const Partition& p);

}  // namespace csync
