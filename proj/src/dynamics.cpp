#include "csync/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <thread>

namespace csync {

SimulationError::SimulationError(double time, const std::string& what)
    : std::runtime_error(what + " at t = " + std::to_string(time)), time_(time) {}

namespace {

struct Edge {
  int to, from;
  double weight;
};

std::vector<Edge> edges_of(const Matrix& a) {
  std::vector<Edge> out;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) out.push_back({i, j, a(i, j)});
    }
  }
  return out;
}

std::vector<double> layer_delays(const Network& net) {
  std::vector<double> out;
  for (const auto& l : net.layers) out.push_back(l.delay);
  return out;
}

// Runs fn(i) for i in [0, count) on a small pool; results are placed by index.
template <typename Fn>
void parallel_for(int count, int threads, Fn fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> jobs;
  for (int w = 0; w < threads; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (int i = w; i < count; i += threads) fn(i);
    }));
  }
  for (auto& j : jobs) j.get();
}

void check_finite(const double* x, int dim, double limit, double t) {
  for (int i = 0; i < dim; ++i) {
    if (!std::isfinite(x[i]) || std::abs(x[i]) > limit) throw SimulationError(t, "state blew up");
  }
}

}  // namespace

DelayRhs network_rhs(const Network& net, const ModelSet& models) {
  std::vector<std::vector<Edge>> edges;
  for (const auto& l : net.layers) edges.push_back(edges_of(l.adjacency));
  const int n = net.state_dim;
  const int nodes = net.size();
  std::vector<double> sigma;
  for (const auto& l : net.layers) sigma.push_back(l.sigma);
  return [=, types = net.node_types](double, const double* x, const double* const* delayed, double* dx) {
    std::vector<double> h(n);
    for (int i = 0; i < nodes; ++i) models.for_type(types[i]).f(x + i * n, dx + i * n);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (sigma[k] == 0.0) continue;
      for (const auto& e : edges[k]) {
        models.coupling[k]->h(n, x + e.to * n, delayed[k] + e.from * n, h.data());
        for (int c = 0; c < n; ++c) dx[e.to * n + c] += sigma[k] * e.weight * h[c];
      }
    }
  };
}

Network quotient_network(const QuotientNetwork& q, const Network& parent) {
  Network out;
  out.state_dim = q.state_dim;
  out.node_types = q.cluster_type;
  out.node_models = parent.node_models;
  for (std::size_t k = 0; k < q.R.size(); ++k) {
    out.layers.push_back(Layer{q.R[k], q.sigma[k], q.delay[k], q.coupling[k]});
  }
  // Types absent from the quotient would break contiguity; keep the parent's
  // full model list, which is indexed by type id.
  return out;
}

Vector lift(const Partition& p, const Vector& cluster_states, int state_dim) {
  Vector x(p.size() * state_dim);
  for (int i = 0; i < p.size(); ++i) {
    x.segment(i * state_dim, state_dim) = cluster_states.segment(p.cluster_of(i) * state_dim, state_dim);
  }
  return x;
}

Vector sample_cluster_states(const Network& net, const ModelSet& models, const Partition& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = net.state_dim;
  Vector s(p.cluster_count() * n);
  for (int q = 0; q < p.cluster_count(); ++q) {
    models.for_type(net.node_types[p.cluster(q).front()]).sample_state(rng, s.data() + q * n);
  }
  return s;
}

Trajectory simulate(const Network& net, const ModelSet& models, const Vector& x0, const SimulationOptions& options) {
  const int dim = net.size() * net.state_dim;
  const double dt = aligned_step(options.dt, layer_delays(net));
  DelayIntegrator integrator(dim, layer_delays(net), dt, network_rhs(net, models), x0);
  const long total = std::lround(options.horizon / dt);
  const int every = std::max(1, options.record_every);

  Trajectory traj;
  traj.nodes = net.size();
  traj.state_dim = net.state_dim;
  traj.dt = dt * every;
  const long samples = total / every + 1;
  traj.states.resize(samples, dim);
  traj.times.reserve(samples);
  long s = 0;
  for (long step = 0; step <= total; ++step) {
    if (step % every == 0 && s < samples) {
      traj.states.row(s++) = Eigen::Map<const Eigen::RowVectorXd>(integrator.state(), dim);
      traj.times.push_back(integrator.time());
    }
    if (step == total) break;
    integrator.step();
    check_finite(integrator.state(), dim, options.blowup, integrator.time());
  }
  traj.states.conservativeResize(s, dim);
  return traj;
}

Trajectory integrate_quotient(const QuotientNetwork& q, const Network& parent, const ModelSet& models,
                              const Vector& s0, const SimulationOptions& options) {
  return simulate(quotient_network(q, parent), models, s0, options);
}

double cluster_spread(const Trajectory& traj, const Partition& p, double from_time) {
  double worst = 0.0;
  const int n = traj.state_dim;
  for (int s = 0; s < traj.samples(); ++s) {
    if (traj.times[s] < from_time) continue;
    for (const auto& c : p.clusters()) {
      for (std::size_t k = 1; k < c.size(); ++k) {
        const double d = (traj.states.row(s).segment(c[k] * n, n) - traj.states.row(s).segment(c[0] * n, n))
                             .cwiseAbs()
                             .maxCoeff();
        worst = std::max(worst, d);
      }
    }
  }
  return worst;
}

std::vector<std::vector<int>> coincident_groups(const Trajectory& traj, double tol, double from_time) {
  const int n = traj.state_dim;
  auto distance = [&](int a, int b) {
    double worst = 0.0;
    for (int s = 0; s < traj.samples(); ++s) {
      if (traj.times[s] < from_time) continue;
      worst = std::max(worst, (traj.states.row(s).segment(a * n, n) - traj.states.row(s).segment(b * n, n))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    return worst;
  };
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < traj.nodes; ++i) {
    bool placed = false;
    for (auto& g : groups) {
      if (distance(g.front(), i) <= tol) {
        g.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({i});
  }
  return groups;
}

VariationalSystem::VariationalSystem(const TransformResult& transform, const Network& net, const ModelSet& models,
                                     std::vector<int> rows)
    : q_(transform.parallel_rows), n_(net.state_dim), rows_(std::move(rows)), models_(models) {
  for (int r : rows_) {
    if (r < transform.parallel_rows || r >= transform.size()) {
      throw std::invalid_argument("variational block must consist of transverse rows");
    }
    row_cluster_.push_back(transform.row_cluster[r]);
  }
  const QuotientNetwork qn = quotient(net, transform.partition);
  cluster_type_ = qn.cluster_type;
  for (int k = 0; k < net.layer_count(); ++k) {
    sigma_.push_back(net.layers[k].sigma);
    delays_.push_back(net.layers[k].delay);
    std::vector<Link> ql;
    for (const auto& e : edges_of(qn.R[k])) ql.push_back({e.to, e.from, e.weight});
    quotient_links_.push_back(std::move(ql));
    std::vector<Link> rl;
    for (std::size_t a = 0; a < rows_.size(); ++a) {
      for (std::size_t b = 0; b < rows_.size(); ++b) {
        const double w = transform.B[k](rows_[a], rows_[b]);
        if (std::abs(w) > 1e-14) rl.push_back({static_cast<int>(a), static_cast<int>(b), w});
      }
    }
    row_links_.push_back(std::move(rl));
  }
}

Matrix VariationalSystem::psi1(int a, const double* s, const double* const* s_delayed) const {
  const int q = row_cluster_[a];
  Matrix out(n_, n_);
  Matrix jac(n_, n_);
  // Row-major buffers map onto the transposed column-major layout.
  std::vector<double> buf(n_ * n_);
  models_.for_type(cluster_type_[q]).df(s + q * n_, buf.data());
  out = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(buf.data(), n_, n_);
  for (std::size_t k = 0; k < quotient_links_.size(); ++k) {
    if (sigma_[k] == 0.0) continue;
    for (const auto& l : quotient_links_[k]) {
      if (l.to != q) continue;
      models_.coupling[k]->d_receiver(n_, s + q * n_, s_delayed[k] + l.from * n_, buf.data());
      jac = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(buf.data(), n_, n_);
      out += sigma_[k] * l.weight * jac;
    }
  }
  return out;
}

Matrix VariationalSystem::psi2(int layer, int a, int b, const double* s, const double* const* s_delayed) const {
  Matrix out = Matrix::Zero(n_, n_);
  for (const auto& l : row_links_[layer]) {
    if (l.to != a || l.from != b) continue;
    std::vector<double> buf(n_ * n_);
    models_.coupling[layer]->d_sender(n_, s + row_cluster_[a] * n_, s_delayed[layer] + row_cluster_[b] * n_,
                                      buf.data());
    out += sigma_[layer] * l.weight *
           Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(buf.data(), n_, n_);
  }
  return out;
}

void VariationalSystem::rhs(double, const double* z, const double* const* delayed, double* dz) const {
  const int n = n_;
  const int m = static_cast<int>(rows_.size());
  std::vector<double> h(n), jac(n * n);

  // Quotient.
  for (int q = 0; q < q_; ++q) models_.for_type(cluster_type_[q]).f(z + q * n, dz + q * n);
  for (std::size_t k = 0; k < quotient_links_.size(); ++k) {
    if (sigma_[k] == 0.0) continue;
    for (const auto& l : quotient_links_[k]) {
      models_.coupling[k]->h(n, z + l.to * n, delayed[k] + l.from * n, h.data());
      for (int c = 0; c < n; ++c) dz[l.to * n + c] += sigma_[k] * l.weight * h[c];
    }
  }

  // Perturbations.
  const double* eta = z + q_ * n;
  double* deta = dz + q_ * n;
  std::fill(deta, deta + m * n, 0.0);
  std::vector<Matrix> psi1_of(q_);
  std::vector<char> have(q_, 0);
  for (int a = 0; a < m; ++a) {
    const int q = row_cluster_[a];
    if (!have[q]) {
      psi1_of[q] = psi1(a, z, delayed);
      have[q] = 1;
    }
    const Matrix& p = psi1_of[q];
    for (int r = 0; r < n; ++r) {
      double acc = 0.0;
      for (int c = 0; c < n; ++c) acc += p(r, c) * eta[a * n + c];
      deta[a * n + r] += acc;
    }
  }
  for (std::size_t k = 0; k < row_links_.size(); ++k) {
    if (sigma_[k] == 0.0) continue;
    const double* eta_delayed = delayed[k] + q_ * n;
    for (const auto& l : row_links_[k]) {
      models_.coupling[k]->d_sender(n, z + row_cluster_[l.to] * n, delayed[k] + row_cluster_[l.from] * n, jac.data());
      const double w = sigma_[k] * l.weight;
      for (int r = 0; r < n; ++r) {
        double acc = 0.0;
        for (int c = 0; c < n; ++c) acc += jac[r * n + c] * eta_delayed[l.from * n + c];
        deta[l.to * n + r] += w * acc;
      }
    }
  }
}

VariationalSystem assemble_variational(const TransformResult& transform, const Network& net, const ModelSet& models,
                                       const std::vector<int>& rows) {
  return VariationalSystem(transform, net, models, rows);
}

MleResult mle(const VariationalSystem& system, const Vector& s0, const MleOptions& options) {
  const int qn = system.cluster_count() * system.state_dim();
  if (s0.size() != qn) throw std::invalid_argument("quotient initial state has the wrong dimension");
  const int m = system.dim() - qn;

  Vector z0(system.dim());
  z0.head(qn) = s0;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  for (int i = 0; i < m; ++i) z0[qn + i] = normal(rng);
  z0.tail(m).normalize();

  const double dt = aligned_step(options.dt, system.delays());
  DelayIntegrator integrator(
      system.dim(), system.delays(), dt,
      [&system](double t, const double* z, const double* const* d, double* dz) { system.rhs(t, z, d, dz); }, z0);

  const long total = std::lround(options.horizon / dt);
  const long transient = std::lround(options.transient_fraction * static_cast<double>(total));
  const long checkpoint = transient + std::lround(0.6 * static_cast<double>(total - transient));
  const int every = std::max(1, options.renorm_every);

  double log_sum = 0.0;
  long counted_from = -1;
  double estimate_at_checkpoint = std::numeric_limits<double>::quiet_NaN();

  for (long step = 1; step <= total; ++step) {
    integrator.step();
    if (step % every != 0 && step != total) continue;
    check_finite(integrator.state(), qn, 1e8, integrator.time());

    double sq = 0.0;
    const int window = integrator.max_lag();
    for (int back = 0; back <= window; ++back) {
      const double* z = integrator.lagged(back);
      for (int i = 0; i < m; ++i) sq += z[qn + i] * z[qn + i];
    }
    const double norm = std::sqrt(sq / (window + 1));
    if (!(norm > 0.0) || !std::isfinite(norm)) throw SimulationError(integrator.time(), "perturbation norm degenerate");
    integrator.transform_history([&](double* x, double* dx) {
      for (int i = 0; i < m; ++i) {
        x[qn + i] /= norm;
        dx[qn + i] /= norm;
      }
    });
    if (step >= transient) {
      if (counted_from < 0) {
        counted_from = step;
      } else {
        log_sum += std::log(norm);
      }
    }
    if (counted_from >= 0 && step >= checkpoint && std::isnan(estimate_at_checkpoint) && step > counted_from) {
      estimate_at_checkpoint = log_sum / (static_cast<double>(step - counted_from) * dt);
    }
  }

  MleResult out;
  out.dt = dt;
  const long span = total - std::max(counted_from, 0L);
  out.value = span > 0 ? log_sum / (static_cast<double>(span) * dt) : 0.0;
  out.drift = std::isnan(estimate_at_checkpoint) ? 0.0 : std::abs(out.value - estimate_at_checkpoint);
  out.converged = out.drift <= options.drift_tolerance;
  return out;
}

std::vector<StabilityBlock> stability_blocks(const TransformResult& transform) {
  std::vector<StabilityBlock> out;
  for (const auto& block : transform.blocks) {
    for (const auto& group : block.groups) {
      StabilityBlock s;
      s.rows = group;
      for (int r : group) s.clusters.push_back(transform.row_cluster[r]);
      std::sort(s.clusters.begin(), s.clusters.end());
      s.clusters.erase(std::unique(s.clusters.begin(), s.clusters.end()), s.clusters.end());
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<MleResult> block_mles(const TransformResult& transform, const Network& net, const ModelSet& models,
                                  const Vector& s0, const MleOptions& options, int threads) {
  const auto blocks = stability_blocks(transform);
  std::vector<MleResult> out(blocks.size());
  parallel_for(static_cast<int>(blocks.size()), threads, [&](int b) {
    out[b] = mle(VariationalSystem(transform, net, models, blocks[b].rows), s0, options);
  });
  return out;
}

double SweepPoint::max_mle() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) best = std::max(best, b.value);
  return best;
}

std::vector<double> StabilityReport::cluster_mle(int point, int cluster_count) const {
  std::vector<double> out(cluster_count, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (int c : blocks[b].clusters) {
      const double v = points[point].blocks[b].value;
      if (std::isnan(out[c]) || v > out[c]) out[c] = v;
    }
  }
  return out;
}

Network with_parameter(const Network& net, const std::string& param, double value) {
  Network out = net;
  auto layer_index = [&](std::size_t prefix) {
    const std::string digits = param.substr(prefix);
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(digits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != digits.size() || k < 1 || k > net.layer_count()) {
      throw std::invalid_argument("unknown sweep parameter '" + param + "'");
    }
    return k - 1;
  };
  if (param == "delay") {
    for (auto& l : out.layers) l.delay = value;
  } else if (param.rfind("sigma", 0) == 0) {
    out.layers[layer_index(5)].sigma = value;
  } else if (param.rfind("delay", 0) == 0) {
    out.layers[layer_index(5)].delay = value;
  } else {
    throw std::invalid_argument("unknown sweep parameter '" + param + "'");
  }
  return out;
}

StabilityReport sweep(const TransformResult& transform, const Network& net, const Params& params, const Vector& s0,
                      const SweepSpec& spec, const MleOptions& options, int threads) {
  StabilityReport report;
  report.param = spec.param;
  report.blocks = stability_blocks(transform);
  report.options = options;
  const int nb = static_cast<int>(report.blocks.size());
  const int np = static_cast<int>(spec.grid.size());
  report.points.resize(np);
  for (int p = 0; p < np; ++p) {
    report.points[p].value = spec.grid[p];
    report.points[p].blocks.resize(nb);
  }

  auto evaluate = [&](double value, int b) {
    const Network v = with_parameter(net, spec.param, value);
    const ModelSet models = bind_models(v, params);
    return mle(VariationalSystem(transform, v, models, report.blocks[b].rows), s0, options);
  };
  parallel_for(np * nb, threads, [&](int task) {
    const int p = task / nb;
    const int b = task % nb;
    report.points[p].blocks[b] = evaluate(spec.grid[p], b);
  });

  auto largest = [&](double value) {
    std::vector<double> vals(nb);
    parallel_for(nb, threads, [&](int b) { vals[b] = evaluate(value, b).value; });
    return nb ? *std::max_element(vals.begin(), vals.end()) : 0.0;
  };
  for (int p = 0; p + 1 < np; ++p) {
    const double a = report.points[p].max_mle();
    const double b = report.points[p + 1].max_mle();
    if ((a < 0.0) == (b < 0.0)) continue;
    double lo = spec.grid[p], hi = spec.grid[p + 1];
    const bool lo_negative = a < 0.0;
    for (int it = 0; it < spec.bisection_steps; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((largest(mid) < 0.0) == lo_negative) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    report.threshold = 0.5 * (lo + hi);
    break;
  }
  return report;
}

std::string to_string(BasinLabel label) {
  switch (label) {
    case BasinLabel::kInPhase: return "in-phase";
    case BasinLabel::kAntiPhase: return "anti-phase";
    case BasinLabel::kOther: return "other";
  }
  return "?";
}

double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a + std::numbers::pi, two_pi);
  if (w <= 0.0) w += two_pi;
  return w - std::numbers::pi;
}

BasinMap basin_map(const Network& quotient, const ModelSet& models, const std::vector<double>& delays, int lag_points,
                   const SimulationOptions& options, double tolerance, int threads) {
  if (quotient.size() != 2 || quotient.state_dim != 1) {
    throw std::invalid_argument("basin map needs a two-node phase quotient");
  }
  BasinMap map;
  map.delays = delays;
  for (int k = 0; k < lag_points; ++k) {
    map.initial_lags.push_back((k + 0.5) * 2.0 * std::numbers::pi / lag_points);
  }
  const int nd = static_cast<int>(delays.size());
  map.labels.assign(nd, std::vector<BasinLabel>(lag_points, BasinLabel::kOther));
  map.final_lags.assign(nd, std::vector<double>(lag_points, 0.0));
  SimulationOptions opts = options;
  opts.record_every = std::max(1, static_cast<int>(std::lround(options.horizon / options.dt)));
  parallel_for(nd * lag_points, threads, [&](int task) {
    const int d = task / lag_points;
    const int k = task % lag_points;
    const Network net = with_parameter(quotient, "delay", delays[d]);
    Vector x0(2);
    x0 << 0.0, map.initial_lags[k];
    const Trajectory traj = simulate(net, models, x0, opts);
    const int last = traj.samples() - 1;
    const double lag = wrap_angle(traj.states(last, 1) - traj.states(last, 0));
    map.final_lags[d][k] = lag;
    if (std::abs(lag) < tolerance) {
      map.labels[d][k] = BasinLabel::kInPhase;
    } else if (std::numbers::pi - std::abs(lag) < tolerance) {
      map.labels[d][k] = BasinLabel::kAntiPhase;
    }
  });
  return map;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  LineFit fit;
  if (n == 0) return fit;
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  // A constant series is fitted exactly.
  fit.r2 = syy > 1e-24 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

PhaseLagCurve phase_lag_curve(const Network& net, const ModelSet& models, const std::vector<double>& delays,
                              const SimulationOptions& options, std::uint64_t seed, int threads) {
  if (net.state_dim != 1) throw std::invalid_argument("phase lag curve needs phase oscillators");
  const int n = net.size();
  const int nd = static_cast<int>(delays.size());
  PhaseLagCurve curve;
  curve.delays = delays;
  curve.lags = Matrix::Zero(nd, n);
  curve.locked.assign(nd, false);

  Vector x0(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  for (int i = 0; i < n; ++i) x0[i] = jitter(rng);
  const Partition coloring = minimal_balanced_coloring(net);

  SimulationOptions opts = options;
  opts.record_every = std::max(1, static_cast<int>(std::lround(1.0 / options.dt)));
  parallel_for(nd, threads, [&](int d) {
    const Network v = with_parameter(net, "delay", delays[d]);
    const Trajectory traj = simulate(v, models, x0, opts);
    const int last = traj.samples() - 1;
    for (int i = 0; i < n; ++i) curve.lags(d, i) = wrap_angle(traj.states(last, i) - traj.states(last, 0));
    curve.locked[d] = cluster_spread(traj, coloring, 0.9 * options.horizon) < 1e-3;
  });

  for (int i = 0; i < n; ++i) {
    for (int d = 1; d < nd; ++d) {
      double step = curve.lags(d, i) - curve.lags(d - 1, i);
      curve.lags(d, i) = curve.lags(d - 1, i) + wrap_angle(step);
    }
    std::vector<double> y(nd);
    for (int d = 0; d < nd; ++d) y[d] = curve.lags(d, i);
    curve.fits.push_back(fit_line(delays, y));
  }
  return curve;
}

}  // namespace csync
