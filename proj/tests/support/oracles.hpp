#pragma once

#include <functional>
#include <random>
#include <vector>

#include "csync/dynamics.hpp"
#include "csync/network.hpp"
#include "csync/partition.hpp"
#include "csync/transform.hpp"

// Independent reference implementations used only by the tests.
namespace csync::oracle {

/// Every set partition of n nodes (restricted growth strings).
std::vector<Partition> all_set_partitions(int n);

/// Filter-all enumeration, canonical order.
std::vector<Partition> brute_force_balanced(const Network& net);

/// Random digraph with small integer weights.
Network random_network(std::mt19937_64& rng, int n, int layers, double density, int types);

/// Random network with a planted balanced partition: every node of cluster q
/// receives the same number of arrows of the same weight from cluster p.
Network planted_network(std::mt19937_64& rng, int n, int clusters, int layers, Partition* planted = nullptr);

/// Central differences of fn at x, column j = d fn / d x_j.
Matrix finite_difference(const std::function<Vector(const Vector&)>& fn, const Vector& x, double h = 1e-6);

/// Exponent from two full-network trajectories whose difference is projected
/// onto the given rows of T (tensor identity) and renormalized like mle().
double two_trajectory_mle(const Network& net, const ModelSet& models, const TransformResult& transform,
                          const std::vector<int>& rows, const Vector& s0, const MleOptions& options,
                          double epsilon = 1e-8);

/// Benettin estimate for one isolated node.
double isolated_node_mle(const NodeModel& model, const Vector& x0, double dt, double horizon,
                         double transient_fraction = 0.5);

}  // namespace csync::oracle
