#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "csync/breaking.hpp"
#include "csync/lattice.hpp"
#include "csync/network.hpp"
#include "csync/partition.hpp"

namespace csync {

/// Structural zero threshold on the aggregated transverse matrix.
inline constexpr double kBlockTolerance = 1e-9;

/// Orthonormal rows of T for one cluster: the parallel row first, then the
/// transverse rows, each supported on the cluster and summing to zero.
struct ClusterBasis {
  int cluster = 0;
  Matrix rows;  // N_q x N
  /// Local pattern each transverse row was realized from ("" for fallback rows).
  std::vector<std::string> sources;
  bool fallback = false;
};

/// Candidate patterns of cluster q in selection priority: smallest intertwining
/// index, then highest frequency, then fewest sub-clusters, then lexicographic.
std::vector<std::string> ranked_patterns(const std::vector<BreakingVector>& vectors, int q);

/// Realizes patterns in the given priority. Each accepted row is the first
/// sub-cluster indicator (in symbol order) of the highest-priority pattern that
/// still has a component orthogonal to the rows chosen so far; the search
/// restarts from the top after every acceptance.
ClusterBasis realize_patterns(const Partition& base, int q, const std::vector<std::string>& priority);

ClusterBasis build_cluster_basis(const Partition& base, int q, const std::vector<BreakingVector>& vectors);

/// One irreducible diagonal block of the transverse matrix. `rows` are absolute
/// row indices of T. `groups` are its strongly connected row sets in the order
/// they appear; more than one group means the block is block-upper-triangular.
struct TransverseBlock {
  std::vector<int> rows;
  std::vector<std::vector<int>> groups;
  std::vector<int> clusters;
  bool upper_triangular = false;
};

enum class Verdict { kIndependent, kOneWay, kIntertwined };

std::string to_string(Verdict v);

/// depends[q][p]: transverse perturbations of cluster q are driven, directly
/// or through other rows, by those of cluster p.
struct Classification {
  std::vector<std::vector<bool>> depends;

  int cluster_count() const { return static_cast<int>(depends.size()); }
  bool intertwined(int q, int p) const { return depends[q][p] && depends[p][q]; }
  bool one_way(int q, int p) const { return depends[q][p] && !depends[p][q]; }
  std::vector<int> intertwined_with(int q) const;
  std::vector<int> one_way_on(int q) const;
  /// Intertwined wins over one-way when both apply.
  Verdict verdict(int q) const;
};

struct TransformResult {
  Partition partition;
  Matrix T;
  int parallel_rows = 0;
  std::vector<int> row_cluster;
  std::vector<Matrix> B;
  std::vector<TransverseBlock> blocks;
  Classification classification;
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(T.rows()); }
  /// Sum over layers of |B^k| restricted to transverse rows and columns.
  Matrix aggregate_transverse() const;
  /// B^k restricted to transverse rows and columns.
  Matrix transverse(int layer) const;
};

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// B^k = T A^k T^T for every layer. Throws InvariantViolation if a transverse
/// row couples to a parallel column beyond 1e-12 * max|A^k|.
std::vector<Matrix> transform_adjacency(const Network& net, const Matrix& T, int parallel_rows);

/// Stacks the bases (parallel rows first), orders transverse rows into blocks
/// and classifies.
TransformResult assemble_T(const Network& net, const Partition& base, const std::vector<ClusterBasis>& bases);

Classification classify(const TransformResult& result);

/// Full pipeline relative to `base` (a member of the lattice).
TransformResult irreducible_transform(const Network& net, const PartitionLattice& lattice, const Partition& base);
TransformResult irreducible_transform(const Network& net, const PartitionLattice& lattice);

}  // namespace csync
