#pragma once

#include <compare>
#include <span>
#include <string>
#include <vector>

namespace csync {

/// A partition of nodes 0..N-1 into clusters. Cluster ids are canonical:
/// cluster 0 contains node 0, and each new cluster id is assigned in order of
/// the first node that belongs to it.
class Partition {
 public:
  Partition() = default;

  /// Any labelling; relabelled canonically.
  static Partition from_labels(std::span<const int> labels);
  /// Clusters given as 0-based node lists; must cover 0..n-1 disjointly.
  static Partition from_clusters(const std::vector<std::vector<int>>& clusters, int n);
  static Partition singletons(int n);
  static Partition uniform(int n);

  int size() const { return static_cast<int>(assignment_.size()); }
  int cluster_count() const { return count_; }
  int cluster_of(int node) const { return assignment_[node]; }
  const std::vector<int>& assignment() const { return assignment_; }

  std::vector<std::vector<int>> clusters() const;
  std::vector<int> cluster_sizes() const;
  std::vector<int> cluster(int q) const;

  /// Ordering used for deterministic output: fewer clusters first, then
  /// lexicographic on the assignment array.
  std::strong_ordering operator<=>(const Partition& other) const;
  bool operator==(const Partition& other) const = default;

  /// "{1,2},{3,4,5}" with 1-based node labels.
  std::string to_string() const;

 private:
  std::vector<int> assignment_;
  int count_ = 0;
};

/// True iff every cluster of `fine` lies inside a cluster of `coarse`.
bool refines(const Partition& fine, const Partition& coarse);

/// Finest partition that both inputs refine (coarsest common coarsening).
Partition join(const Partition& a, const Partition& b);

/// Common refinement (pairwise intersections of clusters).
Partition meet(const Partition& a, const Partition& b);

}  // namespace csync
