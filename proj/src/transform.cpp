#include "csync/transform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>

#include "csync/coloring.hpp"
#include "csync/rcm.hpp"

namespace csync {

namespace {

constexpr double kResidualTolerance = 1e-9;

// Component of v orthogonal to every row of basis (two Gram-Schmidt passes).
Vector orthogonal_residual(Vector v, const std::vector<Vector>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) v -= b.dot(v) * b;
  }
  return v;
}

void fix_sign(Vector& v) {
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

}  // namespace

std::vector<std::string> ranked_patterns(const std::vector<BreakingVector>& vectors, int q) {
  std::map<std::string, std::pair<int, int>> stats;  // pattern -> (min index, frequency)
  for (const auto& v : vectors) {
    if (v.cluster != q) continue;
    auto [it, inserted] = stats.try_emplace(v.local, v.index, 0);
    it->second.first = std::min(it->second.first, v.index);
    ++it->second.second;
  }
  std::vector<std::string> out;
  for (const auto& [pattern, s] : stats) out.push_back(pattern);
  auto key = [&](const std::string& p) {
    const auto [index, frequency] = stats.at(p);
    const int parts = *std::max_element(p.begin(), p.end()) - 'a' + 1;
    return std::make_tuple(index, -frequency, parts, p);
  };
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
  return out;
}

ClusterBasis realize_patterns(const Partition& base, int q, const std::vector<std::string>& priority) {
  const std::vector<int> nodes = base.cluster(q);
  const int m = static_cast<int>(nodes.size());
  std::vector<Vector> chosen{Vector::Constant(m, 1.0 / std::sqrt(static_cast<double>(m)))};
  ClusterBasis out;
  out.cluster = q;

  while (static_cast<int>(chosen.size()) < m) {
    bool accepted = false;
    for (const auto& pattern : priority) {
      const int parts = *std::max_element(pattern.begin(), pattern.end()) - 'a' + 1;
      for (int s = 0; s < parts && !accepted; ++s) {
        Vector indicator = Vector::Zero(m);
        for (int k = 0; k < m; ++k) {
          if (pattern[k] - 'a' == s) indicator[k] = 1.0;
        }
        Vector r = orthogonal_residual(indicator, chosen);
        if (r.norm() <= kResidualTolerance) continue;
        r.normalize();
        fix_sign(r);
        chosen.push_back(r);
        out.sources.push_back(pattern);
        accepted = true;
      }
      if (accepted) break;
    }
    if (accepted) continue;
    // Patterns exhausted: complete with unit coordinate directions.
    out.fallback = true;
    for (int k = 0; k < m && static_cast<int>(chosen.size()) < m; ++k) {
      Vector r = orthogonal_residual(Vector::Unit(m, k), chosen);
      if (r.norm() <= kResidualTolerance) continue;
      r.normalize();
      fix_sign(r);
      chosen.push_back(r);
      out.sources.emplace_back();
    }
  }

  out.rows = Matrix::Zero(m, base.size());
  for (int r = 0; r < m; ++r) {
    for (int k = 0; k < m; ++k) out.rows(r, nodes[k]) = chosen[r][k];
  }
  return out;
}

ClusterBasis build_cluster_basis(const Partition& base, int q, const std::vector<BreakingVector>& vectors) {
  return realize_patterns(base, q, ranked_patterns(vectors, q));
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kIndependent: return "independent";
    case Verdict::kOneWay: return "one-way";
    case Verdict::kIntertwined: return "intertwined";
  }
  return "?";
}

std::vector<int> Classification::intertwined_with(int q) const {
  std::vector<int> out;
  for (int p = 0; p < cluster_count(); ++p) {
    if (p != q && intertwined(q, p)) out.push_back(p);
  }
  return out;
}

std::vector<int> Classification::one_way_on(int q) const {
  std::vector<int> out;
  for (int p = 0; p < cluster_count(); ++p) {
    if (p != q && one_way(q, p)) out.push_back(p);
  }
  return out;
}

Verdict Classification::verdict(int q) const {
  if (!intertwined_with(q).empty()) return Verdict::kIntertwined;
  if (!one_way_on(q).empty()) return Verdict::kOneWay;
  return Verdict::kIndependent;
}

Matrix TransformResult::transverse(int layer) const {
  const int m = size() - parallel_rows;
  return B[layer].bottomRightCorner(m, m);
}

Matrix TransformResult::aggregate_transverse() const {
  const int m = size() - parallel_rows;
  Matrix s = Matrix::Zero(m, m);
  for (std::size_t k = 0; k < B.size(); ++k) s += transverse(static_cast<int>(k)).cwiseAbs();
  return s;
}

std::vector<Matrix> transform_adjacency(const Network& net, const Matrix& T, int parallel_rows) {
  const int n = static_cast<int>(T.rows());
  const int m = n - parallel_rows;
  std::vector<Matrix> out;
  for (int k = 0; k < net.layer_count(); ++k) {
    const Matrix& a = net.layers[k].adjacency;
    Matrix b = T * a * T.transpose();
    const double scale = a.cwiseAbs().maxCoeff();
    const double leak = m > 0 && parallel_rows > 0 ? b.bottomLeftCorner(m, parallel_rows).cwiseAbs().maxCoeff() : 0.0;
    if (leak > 1e-12 * scale) {
      throw InvariantViolation("layer " + std::to_string(k + 1) + ": transverse rows couple to parallel columns (" +
                               std::to_string(leak) + "); partition not balanced or basis broken");
    }
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

// Tarjan's strongly connected components over the vertices in `members`.
std::vector<std::vector<int>> strongly_connected(const std::vector<std::vector<int>>& out_edges,
                                                 const std::vector<int>& members) {
  const int n = static_cast<int>(out_edges.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int counter = 0;

  // Iterative to avoid recursion depth concerns on large clusters.
  for (int root : members) {
    if (index[root] != -1) continue;
    std::vector<std::pair<int, std::size_t>> work{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!work.empty()) {
      auto& [v, next] = work.back();
      if (next < out_edges[v].size()) {
        const int w = out_edges[v][next++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          work.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const int done = v;
      work.pop_back();
      if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
      if (low[done] == index[done]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != done);
        comps.push_back(std::move(comp));
      }
    }
  }
  return comps;
}

// Orders transverse rows (local indices 0..m-1) into blocks.
std::vector<std::vector<std::vector<int>>> order_blocks(const Matrix& s) {
  const int m = static_cast<int>(s.rows());
  std::vector<std::vector<int>> out_edges(m), undirected(m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      if (r == c) continue;
      if (s(r, c) > kBlockTolerance) out_edges[r].push_back(c);
      if (s(r, c) > kBlockTolerance || s(c, r) > kBlockTolerance) undirected[r].push_back(c);
    }
  }

  std::vector<int> component(m, -1);
  std::vector<std::vector<int>> components;
  for (int r = 0; r < m; ++r) {
    if (component[r] != -1) continue;
    std::vector<int> members{r};
    component[r] = static_cast<int>(components.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      for (int w : undirected[members[k]]) {
        if (component[w] == -1) {
          component[w] = component[r];
          members.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    components.push_back(std::move(members));
  }
  std::stable_sort(components.begin(), components.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });

  std::vector<std::vector<std::vector<int>>> blocks;
  for (const auto& members : components) {
    // Cuthill-McKee positions inside the component.
    std::vector<int> local(m, -1);
    for (std::size_t k = 0; k < members.size(); ++k) local[members[k]] = static_cast<int>(k);
    std::vector<std::vector<int>> adj(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      for (int w : undirected[members[k]]) adj[k].push_back(local[w]);
    }
    const std::vector<int> rcm = reverse_cuthill_mckee(adj);
    std::vector<int> position(m, 0);
    for (std::size_t k = 0; k < rcm.size(); ++k) position[members[rcm[k]]] = static_cast<int>(k);

    auto sccs = strongly_connected(out_edges, members);
    const int g = static_cast<int>(sccs.size());
    std::vector<int> group_of(m, -1);
    for (int c = 0; c < g; ++c) {
      std::sort(sccs[c].begin(), sccs[c].end(), [&](int a, int b) { return position[a] < position[b]; });
      for (int r : sccs[c]) group_of[r] = c;
    }
    // Rows that drive others go last: edge r -> r' puts r's group first.
    std::vector<std::set<int>> succ(g);
    std::vector<int> indegree(g, 0);
    for (int r : members) {
      for (int w : out_edges[r]) {
        if (group_of[r] != group_of[w] && succ[group_of[r]].insert(group_of[w]).second) ++indegree[group_of[w]];
      }
    }
    auto rank = [&](int c) { return position[sccs[c].front()]; };
    auto later = [&](int a, int b) { return rank(a) > rank(b); };
    std::priority_queue<int, std::vector<int>, decltype(later)> ready(later);
    for (int c = 0; c < g; ++c) {
      if (indegree[c] == 0) ready.push(c);
    }
    std::vector<std::vector<int>> ordered;
    while (!ready.empty()) {
      const int c = ready.top();
      ready.pop();
      ordered.push_back(sccs[c]);
      for (int d : succ[c]) {
        if (--indegree[d] == 0) ready.push(d);
      }
    }
    blocks.push_back(std::move(ordered));
  }
  return blocks;
}

}  // namespace

Classification classify(const TransformResult& result) {
  const int q_count = result.partition.cluster_count();
  const int par = result.parallel_rows;
  const Matrix s = result.aggregate_transverse();
  const int m = static_cast<int>(s.rows());
  Classification out;
  out.depends.assign(q_count, std::vector<bool>(q_count, false));
  for (int r = 0; r < m; ++r) {
    std::vector<char> seen(m, 0);
    std::vector<int> todo{r};
    seen[r] = 1;
    while (!todo.empty()) {
      const int v = todo.back();
      todo.pop_back();
      for (int w = 0; w < m; ++w) {
        if (!seen[w] && w != v && s(v, w) > kBlockTolerance) {
          seen[w] = 1;
          todo.push_back(w);
        }
      }
    }
    const int q = result.row_cluster[par + r];
    for (int w = 0; w < m; ++w) {
      const int p = result.row_cluster[par + w];
      if (seen[w] && p != q) out.depends[q][p] = true;
    }
  }
  return out;
}

TransformResult assemble_T(const Network& net, const Partition& base, const std::vector<ClusterBasis>& bases) {
  const int n = net.size();
  const int q_count = base.cluster_count();
  if (static_cast<int>(bases.size()) != q_count) throw std::invalid_argument("one basis per cluster required");

  Matrix initial(n, n);
  std::vector<int> initial_cluster(n);
  int row = 0;
  for (int q = 0; q < q_count; ++q) {
    initial.row(row) = bases[q].rows.row(0);
    initial_cluster[row++] = q;
  }
  for (int q = 0; q < q_count; ++q) {
    for (int r = 1; r < bases[q].rows.rows(); ++r) {
      initial.row(row) = bases[q].rows.row(r);
      initial_cluster[row++] = q;
    }
  }

  TransformResult result;
  result.partition = base;
  result.parallel_rows = q_count;
  for (const auto& b : bases) {
    if (b.fallback) {
      result.warnings.push_back("cluster C" + std::to_string(b.cluster + 1) +
                                ": breaking patterns do not span the transverse space; completed with a generic basis");
    }
  }

  Matrix s = Matrix::Zero(n - q_count, n - q_count);
  for (const auto& b : transform_adjacency(net, initial, q_count)) {
    s += b.bottomRightCorner(n - q_count, n - q_count).cwiseAbs();
  }
  const auto blocks = order_blocks(s);

  result.T = Matrix(n, n);
  result.row_cluster.resize(n);
  result.T.topRows(q_count) = initial.topRows(q_count);
  for (int q = 0; q < q_count; ++q) result.row_cluster[q] = q;
  row = q_count;
  for (const auto& groups : blocks) {
    TransverseBlock block;
    block.upper_triangular = groups.size() > 1;
    std::set<int> clusters;
    for (const auto& group : groups) {
      std::vector<int> rows;
      for (int local : group) {
        result.T.row(row) = initial.row(q_count + local);
        result.row_cluster[row] = initial_cluster[q_count + local];
        clusters.insert(result.row_cluster[row]);
        block.rows.push_back(row);
        rows.push_back(row++);
      }
      block.groups.push_back(std::move(rows));
    }
    block.clusters.assign(clusters.begin(), clusters.end());
    result.blocks.push_back(std::move(block));
  }
  result.B = transform_adjacency(net, result.T, q_count);
  result.classification = classify(result);
  return result;
}

TransformResult irreducible_transform(const Network& net, const PartitionLattice& lattice, const Partition& base) {
  if (!is_balanced(net, base)) throw UnbalancedPartition("partition " + base.to_string() + " is not balanced");
  const auto vectors = breaking_vectors(lattice, base);
  std::vector<ClusterBasis> bases;
  for (int q = 0; q < base.cluster_count(); ++q) bases.push_back(build_cluster_basis(base, q, vectors));
  return assemble_T(net, base, bases);
}

TransformResult irreducible_transform(const Network& net, const PartitionLattice& lattice) {
  return irreducible_transform(net, lattice, lattice.minimal());
}

}  // namespace csync
