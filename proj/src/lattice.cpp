#include "csync/lattice.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <set>
#include <thread>

#include "csync/coloring.hpp"

namespace csync {

int PartitionLattice::find(const Partition& p) const {
  auto it = std::lower_bound(partitions.begin(), partitions.end(), p);
  if (it != partitions.end() && *it == p) return static_cast<int>(it - partitions.begin());
  return -1;
}

unsigned long long bell_number(int n) {
  // Bell triangle with saturation.
  constexpr auto kMax = std::numeric_limits<unsigned long long>::max();
  std::vector<unsigned long long> row{1};
  for (int i = 0; i < n; ++i) {
    std::vector<unsigned long long> next{row.back()};
    for (auto v : row) {
      const auto prev = next.back();
      next.push_back(prev > kMax - v ? kMax : prev + v);
    }
    row = std::move(next);
  }
  return row.front();
}

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Partition> children_of(const Network& net, const Partition& p, int only = -1) {
  std::vector<Partition> out;
  const auto clusters = p.clusters();
  for (int q = 0; q < static_cast<int>(clusters.size()); ++q) {
    if (only >= 0 && q != only) continue;
    const auto& cluster = clusters[q];
    const int m = static_cast<int>(cluster.size());
    if (m < 2) continue;
    // S always holds cluster[0]; mask picks the other members of S. The full
    // mask would leave C \ S empty.
    const unsigned long long full = (1ULL << (m - 1)) - 1;
    for (unsigned long long mask = 0; mask < full; ++mask) {
      std::vector<int> labels = p.assignment();
      const int fresh = p.cluster_count();
      for (int k = 1; k < m; ++k) {
        if (!((mask >> (k - 1)) & 1ULL)) labels[cluster[k]] = fresh;
      }
      out.push_back(coarsest_balanced_refinement(net, Partition::from_labels(labels)));
    }
  }
  return out;
}

long split_count(const Partition& p) {
  long count = 0;
  for (int s : p.cluster_sizes()) count += (1L << (s - 1)) - 1;
  return count;
}

std::vector<Partition> split_refine(const Network& net, const Partition& minimal, int threads, int cap,
                                    long budget) {
  std::set<Partition> seen{minimal};
  std::vector<Partition> frontier{minimal};
  long work = 0;
  while (!frontier.empty()) {
    for (const auto& p : frontier) work += split_count(p);
    if (work > budget) {
      throw LatticeSizeError("split-refine enumeration would exceed " + std::to_string(budget) + " refinements");
    }
    const int workers = std::min<int>(threads, static_cast<int>(frontier.size()));
    std::vector<std::future<std::vector<Partition>>> jobs;
    for (int w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        std::vector<Partition> found;
        for (std::size_t i = w; i < frontier.size(); i += workers) {
          auto kids = children_of(net, frontier[i]);
          found.insert(found.end(), kids.begin(), kids.end());
        }
        return found;
      }));
    }
    std::vector<Partition> next;
    for (auto& job : jobs) {
      for (auto& child : job.get()) {
        if (seen.insert(child).second) next.push_back(std::move(child));
        if (static_cast<int>(seen.size()) > cap) {
          throw LatticeSizeError("more than " + std::to_string(cap) + " balanced partitions");
        }
      }
    }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

// Restricted growth strings of length m.
std::vector<std::vector<int>> set_partitions(int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> rgs(m, 0);
  std::vector<int> maxima(m, 0);
  while (true) {
    out.push_back(rgs);
    int i = m - 1;
    while (i > 0 && rgs[i] == maxima[i - 1] + 1) --i;
    if (i <= 0) break;
    ++rgs[i];
    maxima[i] = std::max(maxima[i - 1], rgs[i]);
    for (int k = i + 1; k < m; ++k) {
      rgs[k] = 0;
      maxima[k] = maxima[i];
    }
  }
  return out;
}

std::vector<Partition> cluster_product(const Network& net, const Partition& minimal) {
  const auto clusters = minimal.clusters();
  std::vector<std::vector<std::vector<int>>> options;
  for (const auto& c : clusters) options.push_back(set_partitions(static_cast<int>(c.size())));

  std::vector<Partition> out;
  std::vector<std::size_t> choice(clusters.size(), 0);
  std::vector<int> labels(net.size());
  while (true) {
    int offset = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const auto& rgs = options[c][choice[c]];
      int width = 0;
      for (std::size_t k = 0; k < clusters[c].size(); ++k) {
        labels[clusters[c][k]] = offset + rgs[k];
        width = std::max(width, rgs[k] + 1);
      }
      offset += width;
    }
    Partition candidate = Partition::from_labels(labels);
    if (is_balanced(net, candidate)) out.push_back(std::move(candidate));

    std::size_t c = 0;
    while (c < clusters.size() && ++choice[c] == options[c].size()) choice[c++] = 0;
    if (c == clusters.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::pair<int, int>> covering_edges(const std::vector<Partition>& sorted) {
  const int count = static_cast<int>(sorted.size());
  std::vector<std::vector<char>> below(count, std::vector<char>(count, 0));
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      if (sorted[j].cluster_count() > sorted[i].cluster_count() && refines(sorted[j], sorted[i])) {
        below[i][j] = 1;
      }
    }
  }
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      if (!below[i][j]) continue;
      bool covered = true;
      for (int k = i + 1; k < j && covered; ++k) {
        if (below[i][k] && below[k][j]) covered = false;
      }
      if (covered) edges.emplace_back(i, j);
    }
  }
  return edges;
}

PartitionLattice enumerate_balanced_partitions(const Network& net, const LatticeOptions& options) {
  const Partition minimal = minimal_balanced_coloring(net);
  int largest = 0;
  for (int s : minimal.cluster_sizes()) largest = std::max(largest, s);
  if (largest > options.size_cap) {
    throw LatticeSizeError("minimal balanced coloring has a cluster of " + std::to_string(largest) +
                           " nodes; enumeration cap is " + std::to_string(options.size_cap));
  }

  PartitionLattice lattice;
  if (options.strategy == EnumerationStrategy::kClusterProduct) {
    unsigned long long candidates = 1;
    for (int s : minimal.cluster_sizes()) {
      const auto b = bell_number(s);
      candidates = (candidates > std::numeric_limits<unsigned long long>::max() / b) ? 0 : candidates * b;
      if (candidates == 0 || candidates > 50'000'000ULL) {
        throw LatticeSizeError("cluster-product enumeration would test too many candidates");
      }
    }
    lattice.partitions = cluster_product(net, minimal);
  } else {
    lattice.partitions = split_refine(net, minimal, resolve_threads(options.threads), options.max_partitions,
                                      options.max_refinements);
  }
  if (lattice.size() > options.max_partitions) {
    throw LatticeSizeError("more than " + std::to_string(options.max_partitions) + " balanced partitions");
  }
  // Edge computation is cubic in the lattice size.
  if (lattice.size() <= 3000) lattice.refinement_edges = covering_edges(lattice.partitions);
  return lattice;
}

PartitionLattice breaking_atoms(const Network& net, const Partition& base, int threads) {
  const int q_count = base.cluster_count();
  const int workers = std::min(resolve_threads(threads), std::max(1, q_count));
  std::vector<std::future<std::vector<Partition>>> jobs;
  for (int w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      std::vector<Partition> found;
      for (int q = w; q < q_count; q += workers) {
        auto kids = children_of(net, base, q);
        found.insert(found.end(), kids.begin(), kids.end());
      }
      return found;
    }));
  }
  std::set<Partition> atoms;
  for (auto& job : jobs) {
    for (auto& p : job.get()) atoms.insert(std::move(p));
  }
  atoms.erase(base);
  PartitionLattice out;
  out.partitions.push_back(base);
  out.partitions.insert(out.partitions.end(), atoms.begin(), atoms.end());
  return out;
}

PartitionLattice analysis_lattice(const Network& net, const LatticeOptions& options, std::string* note) {
  try {
    return enumerate_balanced_partitions(net, options);
  } catch (const LatticeSizeError& e) {
    if (note) *note = std::string(e.what()) + "; using single-split atoms of the minimal coloring";
    const Partition minimal = minimal_balanced_coloring(net);
    int largest = 0;
    for (int s : minimal.cluster_sizes()) largest = std::max(largest, s);
    // Splits of one cluster still enumerate 2^(m-1) subsets.
    if (largest > 24) throw;
    return breaking_atoms(net, minimal, options.threads);
  }
}

}  // namespace csync
