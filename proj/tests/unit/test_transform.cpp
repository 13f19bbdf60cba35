#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "../support/oracles.hpp"
#include "csync/cases.hpp"
#include "csync/coloring.hpp"
#include "csync/rcm.hpp"
#include "csync/transform.hpp"

using namespace csync;

namespace {

void check_structure(const TransformResult& tr, double tol) {
  const int n = tr.size();
  const Partition& p = tr.partition;
  CHECK((tr.T * tr.T.transpose() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= tol);
  std::vector<int> per_cluster(p.cluster_count(), 0);
  for (int r = 0; r < n; ++r) {
    const int q = tr.row_cluster[r];
    for (int i = 0; i < n; ++i) {
      if (p.cluster_of(i) != q) CHECK(std::abs(tr.T(r, i)) <= tol);
    }
    if (r < tr.parallel_rows) {
      CHECK(q == r);
      const double v = 1.0 / std::sqrt(static_cast<double>(p.cluster_sizes()[q]));
      for (int i : p.cluster(q)) CHECK(std::abs(tr.T(r, i) - v) <= tol);
    } else {
      ++per_cluster[q];
      CHECK(std::abs(tr.T.row(r).sum()) <= tol * n);
    }
  }
  for (int q = 0; q < p.cluster_count(); ++q) CHECK(per_cluster[q] == p.cluster_sizes()[q] - 1);
}

void check_zero_block(const Network& net, const TransformResult& tr, double rel) {
  const int par = tr.parallel_rows;
  const int m = tr.size() - par;
  for (int k = 0; k < net.layer_count(); ++k) {
    const double scale = net.layers[k].adjacency.cwiseAbs().maxCoeff();
    if (m == 0) continue;
    CHECK(tr.B[k].bottomLeftCorner(m, par).cwiseAbs().maxCoeff() <= rel * std::max(scale, 1e-300));
  }
}

// Every entry of the transverse matrix below the diagonal group structure vanishes,
// and rows in different blocks never couple.
void check_block_triangular(const TransformResult& tr) {
  const Matrix s = tr.aggregate_transverse();
  const int par = tr.parallel_rows;
  std::vector<int> group_of(tr.size(), -1), block_of(tr.size(), -1);
  int g = 0;
  for (std::size_t b = 0; b < tr.blocks.size(); ++b) {
    for (const auto& group : tr.blocks[b].groups) {
      for (int r : group) {
        group_of[r] = g;
        block_of[r] = static_cast<int>(b);
      }
      ++g;
    }
  }
  for (int r = par; r < tr.size(); ++r) {
    REQUIRE(group_of[r] >= 0);
    for (int c = par; c < tr.size(); ++c) {
      if (s(r - par, c - par) <= kBlockTolerance) continue;
      CHECK(block_of[r] == block_of[c]);
      CHECK(group_of[r] <= group_of[c]);
    }
  }
}

}  // namespace

TEST_CASE("5-node example reproduces the reference T up to row sign and order") {
  const Network net = fixture("example5").network;
  const TransformResult tr = irreducible_transform(net, enumerate_balanced_partitions(net));
  const double r2 = 1.0 / std::sqrt(2.0), r3 = 1.0 / std::sqrt(3.0), r6 = 1.0 / std::sqrt(6.0);
  Matrix reference(5, 5);
  reference << r2, r2, 0, 0, 0,
               0, 0, r3, r3, r3,
               0, 0, -r6, 2 * r6, -r6,
               -r2, r2, 0, 0, 0,
               0, 0, -r2, 0, r2;
  CHECK((tr.T.topRows(2) - reference.topRows(2)).cwiseAbs().maxCoeff() < 1e-12);
  std::vector<bool> used(5, false);
  for (int r = 2; r < 5; ++r) {
    bool matched = false;
    for (int s = 2; s < 5 && !matched; ++s) {
      if (used[s]) continue;
      if ((tr.T.row(r) - reference.row(s)).cwiseAbs().maxCoeff() < 1e-12 ||
          (tr.T.row(r) + reference.row(s)).cwiseAbs().maxCoeff() < 1e-12) {
        used[s] = matched = true;
      }
    }
    CHECK_MESSAGE(matched, "row " << r);
  }
  CHECK(tr.blocks.size() == 2);
  CHECK(tr.warnings.empty());
  check_block_triangular(tr);
  CHECK(std::any_of(tr.blocks.begin(), tr.blocks.end(), [](const auto& b) { return b.upper_triangular; }));
  CHECK(tr.classification.verdict(0) == Verdict::kIndependent);
  CHECK(tr.classification.verdict(1) == Verdict::kOneWay);
  CHECK(tr.classification.one_way_on(1) == std::vector<int>{0});
  CHECK(to_string(tr.classification.verdict(1)) == "one-way");
}

TEST_CASE("cluster basis realization") {
  const Partition base = Partition::from_labels(std::vector<int>{0, 0, 1, 1, 1});
  const ClusterBasis b = realize_patterns(base, 1, {"aba", "abc"});
  REQUIRE(b.rows.rows() == 3);
  CHECK_FALSE(b.fallback);
  CHECK(b.sources == std::vector<std::string>{"aba", "abc"});
  // Nothing to realize from: unit completion with a flag.
  const ClusterBasis none = realize_patterns(base, 1, {});
  CHECK(none.fallback);
  CHECK((none.rows * none.rows.transpose() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ranked patterns order by index, frequency, size, then text") {
  std::vector<BreakingVector> v;
  const auto add = [&](const std::string& local, int index) {
    BreakingVector b;
    b.cluster = 0;
    b.local = local;
    b.index = index;
    v.push_back(b);
  };
  add("abc", 0);
  add("aab", 0);
  add("abb", 1);
  add("abb", 0);
  add("abc", 0);
  add("aba", 2);
  CHECK(ranked_patterns(v, 0) == std::vector<std::string>{"abb", "abc", "aab", "aba"});
}

TEST_CASE("fig1net: memberships, three blocks and the expected classification") {
  const CaseConfig c = fixture("fig1net");
  const TransformResult tr = irreducible_transform(c.network, enumerate_balanced_partitions(c.network));
  std::vector<std::vector<int>> membership;
  for (const auto& cl : tr.partition.clusters()) {
    membership.emplace_back();
    for (int i : cl) membership.back().push_back(i + 1);
  }
  CHECK(membership == c.expected.at("membership").get<std::vector<std::vector<int>>>());
  CHECK(static_cast<int>(tr.blocks.size()) == c.expected.at("blocks").get<int>());
  for (int q = 0; q < 5; ++q) {
    CHECK(to_string(tr.classification.verdict(q)) ==
          c.expected.at("classification").at("C" + std::to_string(q + 1)).get<std::string>());
  }
  CHECK(tr.classification.one_way_on(1) == std::vector<int>{0});
  CHECK(tr.classification.intertwined_with(2) == std::vector<int>{3});
  check_block_triangular(tr);
}

TEST_CASE("fixtures: structure, zero block, expected verdicts") {
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    const CaseConfig c = fixture(name);
    const TransformResult tr = irreducible_transform(c.network, analysis_lattice(c.network));
    check_structure(tr, 1e-12);
    check_zero_block(c.network, tr, 1e-12);
    check_block_triangular(tr);
    if (c.expected.contains("clusters")) CHECK(tr.partition.cluster_count() == c.expected["clusters"].get<int>());
    if (c.expected.contains("classification")) {
      for (const auto& [cl, verdict] : c.expected["classification"].items()) {
        CHECK(to_string(tr.classification.verdict(std::stoi(cl.substr(1)) - 1)) == verdict.get<std::string>());
      }
    }
  }
}

TEST_CASE("neuron Q=12 partition") {
  const CaseConfig c = fixture("neuron_full");
  const Partition q12 = c.partitions.at("q12");
  const TransformResult tr = irreducible_transform(c.network, enumerate_balanced_partitions(c.network), q12);
  check_structure(tr, 1e-12);
  check_zero_block(c.network, tr, 1e-12);
  check_block_triangular(tr);
  for (int q = 0; q < 12; ++q) {
    if (q12.cluster_sizes()[q] == 1) continue;
    CHECK(tr.classification.verdict(q) == Verdict::kIntertwined);
  }
}

TEST_CASE("planted random networks satisfy constraints (A) and (B)") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    CAPTURE(trial);
    Partition planted;
    const Network net = oracle::planted_network(rng, 6 + trial % 5, 2 + trial % 3, 1 + trial % 2, &planted);
    CHECK(is_balanced(net, planted));
    const PartitionLattice lat = analysis_lattice(net);
    const TransformResult tr = irreducible_transform(net, lat);
    check_structure(tr, 1e-12);
    check_zero_block(net, tr, 1e-12);
    check_block_triangular(tr);
    if (lat.find(planted) >= 0 && planted != lat.minimal()) {
      const TransformResult tp = irreducible_transform(net, lat, planted);
      check_structure(tp, 1e-12);
      check_zero_block(net, tp, 1e-12);
    }
  }
}

TEST_CASE("unbalanced base and leaking T are rejected") {
  const Network net = fixture("example5").network;
  const PartitionLattice lat = enumerate_balanced_partitions(net);
  CHECK_THROWS_AS(irreducible_transform(net, lat, Partition::uniform(5)), UnbalancedPartition);
  // Rows built on the unbalanced partition {1,2,3},{4,5} leak into the parallel columns.
  Matrix t = Matrix::Zero(5, 5);
  t.row(0) << 1, 1, 1, 0, 0;
  t.row(1) << 0, 0, 0, 1, 1;
  t.row(2) << 1, -1, 0, 0, 0;
  t.row(3) << 1, 1, -2, 0, 0;
  t.row(4) << 0, 0, 0, 1, -1;
  t.rowwise().normalize();
  CHECK_THROWS_AS(transform_adjacency(net, t, 2), InvariantViolation);
}

TEST_CASE("reverse Cuthill-McKee recovers a narrow band") {
  // A path relabelled by a shuffle.
  std::mt19937_64 rng(2);
  const int n = 30;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i + 1 < n; ++i) {
    adj[perm[i]].push_back(perm[i + 1]);
    adj[perm[i + 1]].push_back(perm[i]);
  }
  std::vector<int> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  const auto order = reverse_cuthill_mckee(adj);
  CHECK(bandwidth(adj, order) == 1);
  CHECK(bandwidth(adj, identity) > 1);
  auto sorted = order;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == identity);
  // Two components and an isolated vertex keep every vertex exactly once.
  std::vector<std::vector<int>> two{{1}, {0}, {}, {4}, {3}};
  auto o2 = reverse_cuthill_mckee(two);
  std::sort(o2.begin(), o2.end());
  CHECK(o2 == std::vector<int>{0, 1, 2, 3, 4});
}
