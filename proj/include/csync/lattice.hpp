#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "csync/network.hpp"
#include "csync/partition.hpp"

namespace csync {

/// All balanced partitions of a network in canonical order (minimal balanced
/// coloring first, all-singletons last) with the covering relation.
struct PartitionLattice {
  std::vector<Partition> partitions;
  /// (i, j): partitions[j] refines partitions[i] and nothing lies strictly between.
  std::vector<std::pair<int, int>> refinement_edges;

  int size() const { return static_cast<int>(partitions.size()); }
  const Partition& minimal() const { return partitions.front(); }
  /// Index of p, or -1.
  int find(const Partition& p) const;
};

class LatticeSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EnumerationStrategy {
  /// Breadth-first search from the minimal coloring: split one cluster in two,
  /// take the coarsest balanced refinement, repeat. Reaches every balanced partition.
  kSplitRefine,
  /// Product of set partitions of each minimal cluster, filtered by is_balanced.
  kClusterProduct,
};

struct LatticeOptions {
  /// Largest cluster of the minimal coloring that may be split (and largest N
  /// for which the product strategy is allowed when clusters are bigger).
  int size_cap = 16;
  EnumerationStrategy strategy = EnumerationStrategy::kSplitRefine;
  int threads = 0;  // 0: hardware concurrency
  /// Enumeration stops with LatticeSizeError beyond this many partitions.
  int max_partitions = 20000;
  /// Split-refine also gives up before a level would run more coarsest
  /// refinements than this in total.
  long max_refinements = 200000;
};

PartitionLattice enumerate_balanced_partitions(const Network& net, const LatticeOptions& options = {});

/// The base followed by the coarsest balanced refinement of every split of a
/// single base cluster in two. Every balanced partition that breaks cluster p
/// but keeps cluster q whole refines one of these atoms with the same property,
/// so dependencies computed from the atoms equal those of the full lattice.
PartitionLattice breaking_atoms(const Network& net, const Partition& base, int threads = 0);

/// Full enumeration when it fits the options, otherwise the atoms of the
/// minimal coloring; `note` (if given) receives the reason for the fallback.
PartitionLattice analysis_lattice(const Network& net, const LatticeOptions& options = {},
                                  std::string* note = nullptr);

/// Covering pairs among an already sorted list of partitions.
std::vector<std::pair<int, int>> covering_edges(const std::vector<Partition>& sorted);

/// Bell number, saturating at the max of std::uint64_t.
unsigned long long bell_number(int n);

}  // namespace csync
