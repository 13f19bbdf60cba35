#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "csync/coloring.hpp"
#include "csync/dde.hpp"
#include "csync/models.hpp"
#include "csync/network.hpp"
#include "csync/transform.hpp"

namespace csync {

class SimulationError : public std::runtime_error {
 public:
  SimulationError(double time, const std::string& what);
  double time() const { return time_; }

 private:
  double time_;
};

struct SimulationOptions {
  double dt = 1e-3;  // reduced so that delays are whole steps
  double horizon = 100.0;
  int record_every = 1;
  double blowup = 1e8;
};

/// Uniformly sampled states; row s of `states` is the full state at times[s].
struct Trajectory {
  int nodes = 0;
  int state_dim = 1;
  double dt = 0.0;
  std::vector<double> times;
  Matrix states;

  int samples() const { return static_cast<int>(times.size()); }
  Vector node_state(int sample, int node) const {
    return states.row(sample).segment(node * state_dim, state_dim).transpose();
  }
};

/// Right-hand side of the network equation: x_i' = f(x_i) + sum_k sigma_k sum_j
/// A^k_ij h^k(x_i(t), x_j(t - delay_k)). One delayed pointer per layer.
DelayRhs network_rhs(const Network& net, const ModelSet& models);

/// The quotient as a network with the R^k as adjacency and the parent's bindings.
Network quotient_network(const QuotientNetwork& q, const Network& parent);

/// Cluster states (Q * n) copied onto every member node (N * n).
Vector lift(const Partition& p, const Vector& cluster_states, int state_dim);

/// One sampled state per cluster (Q * n), drawn by each cluster's node model from `seed`.
Vector sample_cluster_states(const Network& net, const ModelSet& models, const Partition& p, std::uint64_t seed);

Trajectory simulate(const Network& net, const ModelSet& models, const Vector& x0, const SimulationOptions& options);
Trajectory integrate_quotient(const QuotientNetwork& q, const Network& parent, const ModelSet& models,
                              const Vector& s0, const SimulationOptions& options);

/// Largest within-cluster distance of node states over the recorded samples.
double cluster_spread(const Trajectory& traj, const Partition& p, double from_time = 0.0);

/// Groups of nodes whose recorded states stay within `tol` of each other for
/// every sample after `from_time`.
std::vector<std::vector<int>> coincident_groups(const Trajectory& traj, double tol, double from_time);

/// Linearization of the network about the cluster-synchronous solution,
/// expressed in the rows of T listed in `rows` (all transverse). State layout
/// of the augmented system: the Q cluster states, then one n-vector per row.
class VariationalSystem {
 public:
  VariationalSystem(const TransformResult& transform, const Network& net, const ModelSet& models,
                    std::vector<int> rows);

  int cluster_count() const { return q_; }
  int state_dim() const { return n_; }
  int dim() const { return (q_ + static_cast<int>(rows_.size())) * n_; }
  const std::vector<int>& rows() const { return rows_; }
  const std::vector<double>& delays() const { return delays_; }

  void rhs(double t, const double* z, const double* const* delayed, double* dz) const;

  /// Psi1 for the a-th selected row: Df(s_q(t)) + sum_k sigma_k sum_p R^k_qp D_recv h^k(s_q(t), s_p(t - delay_k)).
  Matrix psi1(int a, const double* s, const double* const* s_delayed) const;
  /// Psi2^k coupling selected row a to selected row b: sigma_k B^k_ab D_send h^k(s_qa(t), s_qb(t - delay_k)).
  Matrix psi2(int layer, int a, int b, const double* s, const double* const* s_delayed) const;

 private:
  struct Link {
    int to, from;
    double weight;
  };

  int q_, n_;
  std::vector<int> rows_;
  std::vector<int> row_cluster_;
  std::vector<double> sigma_, delays_;
  std::vector<std::vector<Link>> quotient_links_;  // per layer, R entries
  std::vector<std::vector<Link>> row_links_;       // per layer, B entries between selected rows
  std::vector<int> cluster_type_;
  ModelSet models_;
};

VariationalSystem assemble_variational(const TransformResult& transform, const Network& net, const ModelSet& models,
                                       const std::vector<int>& rows);

struct MleOptions {
  double dt = 1e-3;
  double horizon = 200.0;
  double transient_fraction = 0.5;
  int renorm_every = 100;
  std::uint64_t seed = 0;
  /// Running estimates at 80% and 100% of the horizon must agree this well.
  double drift_tolerance = 1e-2;
};

struct MleResult {
  double value = 0.0;
  double drift = 0.0;
  bool converged = true;
  double dt = 0.0;
};

/// Largest Lyapunov exponent of the variational system along the quotient
/// solution started from constant history s0, by repeated renormalization of
/// a perturbation whose norm is the RMS over the longest delay window.
MleResult mle(const VariationalSystem& system, const Vector& s0, const MleOptions& options);

/// One irreducible diagonal block of B_perp, i.e. a strongly connected row group.
struct StabilityBlock {
  std::vector<int> rows;
  std::vector<int> clusters;
};

std::vector<StabilityBlock> stability_blocks(const TransformResult& transform);

/// MLE of every stability block (in parallel).
std::vector<MleResult> block_mles(const TransformResult& transform, const Network& net, const ModelSet& models,
                                  const Vector& s0, const MleOptions& options, int threads = 0);

/// Sweep parameter: "sigma<k>" or "delay<k>" (1-based layer), or "delay" for all layers.
struct SweepSpec {
  std::string param;
  std::vector<double> grid;
  int bisection_steps = 6;
};

struct SweepPoint {
  double value = 0.0;
  std::vector<MleResult> blocks;
  double max_mle() const;
};

struct StabilityReport {
  std::string param;
  std::vector<StabilityBlock> blocks;
  std::vector<SweepPoint> points;
  /// First sign change of the largest block MLE along the grid, refined by bisection.
  std::optional<double> threshold;
  MleOptions options;
  /// Per cluster: the largest MLE among blocks with rows of that cluster, per point.
  std::vector<double> cluster_mle(int point, int cluster_count) const;
};

/// Copy of `net` with the named parameter set to value.
Network with_parameter(const Network& net, const std::string& param, double value);

StabilityReport sweep(const TransformResult& transform, const Network& net, const Params& params,
                      const Vector& s0, const SweepSpec& spec, const MleOptions& options, int threads = 0);

enum class BasinLabel { kInPhase, kAntiPhase, kOther };
std::string to_string(BasinLabel label);

struct BasinMap {
  std::vector<double> delays;
  std::vector<double> initial_lags;
  std::vector<std::vector<BasinLabel>> labels;   // [delay][initial lag]
  std::vector<std::vector<double>> final_lags;   // wrapped to (-pi, pi]
};

/// Two-cluster phase quotient: cluster 1 starts at phase 0, cluster 2 at the
/// initial lag; label the wrapped lag after `options.horizon`.
BasinMap basin_map(const Network& quotient, const ModelSet& models, const std::vector<double>& delays,
                   int lag_points, const SimulationOptions& options, double tolerance = 0.1, int threads = 0);

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct PhaseLagCurve {
  std::vector<double> delays;
  Matrix lags;  // [delay][node], phase of node minus phase of node 1, unwrapped along the delay grid
  std::vector<bool> locked;
  std::vector<LineFit> fits;  // per node
};

/// Full phase network simulated from small random phases for each delay.
PhaseLagCurve phase_lag_curve(const Network& net, const ModelSet& models, const std::vector<double>& delays,
                              const SimulationOptions& options, std::uint64_t seed, int threads = 0);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace csync
