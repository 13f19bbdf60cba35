#include "csync/breaking.hpp"

#include <algorithm>

namespace csync {

std::string local_pattern(const Partition& fine, const std::vector<int>& nodes) {
  std::map<int, char> symbol;
  std::string out;
  out.reserve(nodes.size());
  for (int i : nodes) {
    auto [it, inserted] = symbol.try_emplace(fine.cluster_of(i), static_cast<char>('a' + symbol.size()));
    out.push_back(it->second);
  }
  return out;
}

namespace {

bool breaks(const Partition& fine, const std::vector<int>& nodes) {
  return std::any_of(nodes.begin(), nodes.end(),
                     [&](int i) { return fine.cluster_of(i) != fine.cluster_of(nodes.front()); });
}

}  // namespace

std::vector<BreakingVector> breaking_vectors(const PartitionLattice& lattice, const Partition& base) {
  const auto clusters = base.clusters();
  const int q_count = static_cast<int>(clusters.size());
  std::vector<BreakingVector> out;
  for (int q = 0; q < q_count; ++q) {
    for (int j = 0; j < lattice.size(); ++j) {
      const Partition& fine = lattice.partitions[j];
      if (!refines(fine, base) || !breaks(fine, clusters[q])) continue;
      BreakingVector v;
      v.cluster = q;
      v.partition = j;
      v.local = local_pattern(fine, clusters[q]);
      v.pattern.assign(base.size(), '0');
      for (std::size_t k = 0; k < clusters[q].size(); ++k) v.pattern[clusters[q][k]] = v.local[k];
      for (int p = 0; p < q_count; ++p) {
        if (p != q && breaks(fine, clusters[p])) ++v.index;
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<BreakingVector> breaking_vectors(const PartitionLattice& lattice) {
  return breaking_vectors(lattice, lattice.minimal());
}

std::map<std::string, int> pattern_frequency(const std::vector<BreakingVector>& vectors, int q) {
  std::map<std::string, int> out;
  for (const auto& v : vectors) {
    if (v.cluster == q) ++out[v.local];
  }
  return out;
}

std::vector<std::vector<bool>> combinatorial_dependencies(const PartitionLattice& lattice,
                                                          const Partition& base) {
  const auto clusters = base.clusters();
  const int q_count = static_cast<int>(clusters.size());
  std::vector<std::vector<bool>> depends(q_count, std::vector<bool>(q_count, false));
  std::vector<std::vector<bool>> broken;
  for (const auto& fine : lattice.partitions) {
    if (!refines(fine, base)) continue;
    std::vector<bool> row(q_count);
    for (int q = 0; q < q_count; ++q) row[q] = breaks(fine, clusters[q]);
    broken.push_back(std::move(row));
  }
  for (int q = 0; q < q_count; ++q) {
    for (int p = 0; p < q_count; ++p) {
      if (p == q) continue;
      bool seen = false;
      bool implied = true;
      for (const auto& row : broken) {
        if (!row[p]) continue;
        seen = true;
        if (!row[q]) {
          implied = false;
          break;
        }
      }
      depends[q][p] = seen && implied;
    }
  }
  return depends;
}

}  // namespace csync
