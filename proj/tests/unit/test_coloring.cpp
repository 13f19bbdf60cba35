#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "csync/cases.hpp"
#include "csync/coloring.hpp"

using namespace csync;

namespace {

Partition parts(const std::vector<std::vector<int>>& one_based, int n) {
  std::vector<std::vector<int>> c;
  for (const auto& cl : one_based) {
    c.emplace_back();
    for (int i : cl) c.back().push_back(i - 1);
  }
  return Partition::from_clusters(c, n);
}

}  // namespace

TEST_CASE("partition basics") {
  const Partition p = Partition::from_labels(std::vector<int>{7, 7, 3, 3, 7});
  CHECK(p.assignment() == std::vector<int>{0, 0, 1, 1, 0});
  CHECK(p.cluster_count() == 2);
  CHECK(p.to_string() == "{1,2,5},{3,4}");
  CHECK(p.cluster_sizes() == std::vector<int>{3, 2});
  CHECK(refines(Partition::singletons(5), p));
  CHECK(refines(p, p));
  CHECK_FALSE(refines(p, parts({{1, 2}, {3, 4, 5}}, 5)));
  CHECK(join(parts({{1, 2}, {3}, {4}, {5}}, 5), parts({{1}, {2, 3}, {4, 5}}, 5)) == parts({{1, 2, 3}, {4, 5}}, 5));
  CHECK(meet(parts({{1, 2, 3}, {4, 5}}, 5), parts({{1, 2}, {3, 4, 5}}, 5)) == parts({{1, 2}, {3}, {4, 5}}, 5));
  CHECK_THROWS(Partition::from_clusters({{0, 1}, {1, 2}}, 3));
  CHECK_THROWS(Partition::from_clusters({{0, 1}}, 3));
}

TEST_CASE("balanced checks on the 5-node example") {
  const Network net = fixture("example5").network;
  CHECK(is_balanced(net, parts({{1, 2}, {3, 4, 5}}, 5)));
  CHECK(is_balanced(net, Partition::singletons(5)));
  CHECK_FALSE(is_balanced(net, Partition::uniform(5)));
  CHECK_FALSE(is_balanced(net, parts({{1, 3}, {2, 4, 5}}, 5)));
}

TEST_CASE("node types separate clusters") {
  Network net = fixture("example5").network;
  net.node_types = {1, 1, 2, 2, 2};
  net.node_models = {"stuart_landau", "stuart_landau"};
  CHECK_FALSE(is_balanced(net, parts({{1, 2, 3}, {4, 5}}, 5)));
}

TEST_CASE("minimal balanced colorings of the fixtures") {
  CHECK(minimal_balanced_coloring(fixture("example5").network) == parts({{1, 2}, {3, 4, 5}}, 5));
  CHECK(minimal_balanced_coloring(fixture("fig1net").network) ==
        parts({{1, 2, 3}, {4, 5, 6}, {7, 8}, {9, 10}, {11, 12}}, 12));
  CHECK(minimal_balanced_coloring(fixture("violin_undirected").network) == Partition::uniform(8));
  CHECK(minimal_balanced_coloring(fixture("violin_unidir").network) == Partition::uniform(8));
  const Partition arrow = minimal_balanced_coloring(fixture("violin_arrowhead").network);
  CHECK(arrow == parts({{1}, {2, 8}, {3, 7}, {4, 6}, {5}}, 8));
  int trivial = 0;
  for (int s : arrow.cluster_sizes()) trivial += s == 1;
  CHECK(trivial == 2);
  for (const char* name : {"neuron_full", "neuron_cut_up", "neuron_cut_down"}) {
    CHECK(minimal_balanced_coloring(fixture(name).network) ==
          parts({{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {11, 12, 13, 14, 15, 16, 17, 18, 19, 20}}, 20));
  }
}

TEST_CASE("quotient matrices") {
  const Network five = fixture("example5").network;
  const QuotientNetwork q = quotient(five, minimal_balanced_coloring(five));
  Matrix r(2, 2);
  r << 1, 2, 1, 4;
  CHECK(q.R[0] == r);
  CHECK(quotient_residual(five, q.partition) == 0.0);
  CHECK_THROWS_AS(quotient(five, Partition::uniform(5)), UnbalancedPartition);

  const Network neuron = fixture("neuron_full").network;
  const QuotientNetwork qn = quotient(neuron, minimal_balanced_coloring(neuron));
  CHECK(qn.R[0](1, 1) == 6.0);
  CHECK(qn.R[1](0, 1) == 1.0);
  CHECK(qn.R[1](1, 0) == 0.25);
  CHECK(qn.cluster_type == std::vector<int>{1, 2});

  const Network ring = fixture("violin_undirected").network;
  CHECK(quotient(ring, Partition::uniform(8)).R[0](0, 0) == 2.0);
}

TEST_CASE("coarsest refinement is idempotent, balanced and coarsest on random networks") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    Partition planted;
    const Network net = oracle::planted_network(rng, 7, 3, 2, &planted);
    REQUIRE(is_balanced(net, planted));
    const Partition minimal = minimal_balanced_coloring(net);
    CHECK(is_balanced(net, minimal));
    CHECK(refines(planted, minimal));
    CHECK(coarsest_balanced_refinement(net, minimal) == minimal);
    for (const auto& p : oracle::brute_force_balanced(net)) CHECK(refines(p, minimal));
  }
}

TEST_CASE("coloring commutes with relabeling") {
  const Network net = fixture("fig1net").network;
  std::vector<int> perm{11, 3, 7, 0, 9, 1, 5, 10, 2, 8, 4, 6};
  const Network moved = permute(net, perm);
  const Partition a = minimal_balanced_coloring(net);
  const Partition b = minimal_balanced_coloring(moved);
  std::vector<int> labels(net.size());
  for (int i = 0; i < net.size(); ++i) labels[perm[i]] = a.cluster_of(i);
  CHECK(Partition::from_labels(labels) == b);
}
