#pragma once

#include <map>
#include <string>
#include <vector>

#include "csync/lattice.hpp"
#include "csync/partition.hpp"

namespace csync {

/// How cluster q of a base partition splits inside a finer balanced partition.
struct BreakingVector {
  int cluster = 0;
  int partition = 0;  // index into the lattice
  /// One symbol per network node: '0' outside the cluster, 'a', 'b', ... by
  /// order of first appearance inside it.
  std::string pattern;
  /// The same symbols restricted to the cluster's nodes (ascending node order).
  std::string local;
  /// Number of other base clusters that also break in this partition.
  int index = 0;
};

/// Canonical symbols of `fine` over `nodes`.
std::string local_pattern(const Partition& fine, const std::vector<int>& nodes);

/// Every meaningful (cluster, partition) pair. Partitions of the lattice that
/// do not refine `base` are skipped; `base` itself never breaks anything.
std::vector<BreakingVector> breaking_vectors(const PartitionLattice& lattice, const Partition& base);
std::vector<BreakingVector> breaking_vectors(const PartitionLattice& lattice);

/// Local pattern -> number of partitions in which cluster q breaks that way.
std::map<std::string, int> pattern_frequency(const std::vector<BreakingVector>& vectors, int q);

/// depends[q][p] (q != p): p breaks in at least one partition and every
/// partition that breaks p also breaks q, i.e. q cannot stay synchronized
/// once p loses synchrony.
std::vector<std::vector<bool>> combinatorial_dependencies(const PartitionLattice& lattice,
                                                          const Partition& base);

}  // namespace csync
