#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include "csync/coloring.hpp"
#include "csync/dde.hpp"

namespace csync::oracle {

std::vector<Partition> all_set_partitions(int n) {
  std::vector<Partition> out;
  std::vector<int> rgs(n, 0);
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (i == n) {
      out.push_back(Partition::from_labels(rgs));
      return;
    }
    for (int c = 0; c <= used; ++c) {
      rgs[i] = c;
      rec(i + 1, std::max(used, c + 1));
    }
  };
  if (n > 0) {
    rgs[0] = 0;
    rec(1, 1);
  }
  return out;
}

std::vector<Partition> brute_force_balanced(const Network& net) {
  std::vector<Partition> out;
  for (auto& p : all_set_partitions(net.size())) {
    if (is_balanced(net, p)) out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Network random_network(std::mt19937_64& rng, int n, int layers, double density, int types) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> weight(1, 2);
  std::uniform_int_distribution<int> type(1, types);
  Network net;
  net.node_types.resize(n);
  for (int i = 0; i < n; ++i) net.node_types[i] = i < types ? i + 1 : type(rng);
  for (int k = 0; k < layers; ++k) {
    Layer l;
    l.adjacency = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && u(rng) < density) l.adjacency(i, j) = weight(rng);
      }
    }
    l.coupling = "diffusive";
    net.layers.push_back(std::move(l));
  }
  return net;
}

Network planted_network(std::mt19937_64& rng, int n, int clusters, int layers, Partition* planted) {
  clusters = std::min(clusters, n);
  // Random surjective labels.
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i < clusters ? i : std::uniform_int_distribution<int>(0, clusters - 1)(rng);
  std::shuffle(labels.begin(), labels.end(), rng);
  const Partition p = Partition::from_labels(labels);
  const auto members = p.clusters();

  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double weights[] = {0.5, 1.0, 1.5, 2.0, 3.0};
  Network net;
  net.node_types.resize(n);
  std::vector<int> cluster_type(clusters);
  for (int q = 0; q < clusters; ++q) cluster_type[q] = std::uniform_int_distribution<int>(1, 2)(rng);
  // Keep type ids contiguous from 1.
  if (std::find(cluster_type.begin(), cluster_type.end(), 1) == cluster_type.end()) cluster_type[0] = 1;
  for (int i = 0; i < n; ++i) net.node_types[i] = cluster_type[p.cluster_of(i)];

  for (int k = 0; k < layers; ++k) {
    Layer l;
    l.adjacency = Matrix::Zero(n, n);
    for (int q = 0; q < clusters; ++q) {
      for (int s = 0; s < clusters; ++s) {
        if (u(rng) < 0.4) continue;
        const auto& senders = members[s];
        const int degree = std::uniform_int_distribution<int>(1, static_cast<int>(senders.size()))(rng);
        const double w = weights[std::uniform_int_distribution<int>(0, 4)(rng)];
        for (int i : members[q]) {
          std::vector<int> pool = senders;
          std::shuffle(pool.begin(), pool.end(), rng);
          for (int d = 0; d < degree; ++d) l.adjacency(i, pool[d]) += w;
        }
      }
    }
    l.coupling = "diffusive";
    net.layers.push_back(std::move(l));
  }
  if (planted) *planted = p;
  return net;
}

Matrix finite_difference(const std::function<Vector(const Vector&)>& fn, const Vector& x, double h) {
  const Vector f0 = fn(x);
  Matrix out(f0.size(), x.size());
  for (int j = 0; j < x.size(); ++j) {
    const double step = h * std::max(1.0, std::abs(x[j]));
    Vector plus = x, minus = x;
    plus[j] += step;
    minus[j] -= step;
    out.col(j) = (fn(plus) - fn(minus)) / (2.0 * step);
  }
  return out;
}

double two_trajectory_mle(const Network& net, const ModelSet& models, const TransformResult& transform,
                          const std::vector<int>& rows, const Vector& s0, const MleOptions& options, double epsilon) {
  const int n = net.state_dim;
  const int size = net.size() * n;
  std::vector<double> delays;
  for (const auto& l : net.layers) delays.push_back(l.delay);
  const DelayRhs single = network_rhs(net, models);
  const int nd = static_cast<int>(delays.size());
  DelayRhs both = [&, single](double t, const double* x, const double* const* d, double* dx) {
    std::vector<const double*> second(nd);
    for (int k = 0; k < nd; ++k) second[k] = d[k] + size;
    single(t, x, d, dx);
    single(t, x + size, second.data(), dx + size);
  };

  // Projector onto span{T_r (x) e_c : r in rows}.
  Matrix basis(rows.size(), net.size());
  for (std::size_t a = 0; a < rows.size(); ++a) basis.row(a) = transform.T.row(rows[a]);
  auto project = [&](const double* d, double* out) {
    for (int c = 0; c < n; ++c) {
      Vector comp(net.size());
      for (int i = 0; i < net.size(); ++i) comp[i] = d[i * n + c];
      const Vector proj = basis.transpose() * (basis * comp);
      for (int i = 0; i < net.size(); ++i) out[i * n + c] = proj[i];
    }
  };

  const Vector x1 = lift(transform.partition, s0, n);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Vector raw(size);
  for (int i = 0; i < size; ++i) raw[i] = normal(rng);
  Vector dir(size);
  project(raw.data(), dir.data());
  dir *= epsilon / dir.norm();
  Vector z0(2 * size);
  z0 << x1, x1 + dir;

  const double dt = aligned_step(options.dt, delays);
  DelayIntegrator integ(2 * size, delays, dt, both, z0);
  const long total = std::lround(options.horizon / dt);
  const long transient = std::lround(options.transient_fraction * total);
  double log_sum = 0.0;
  long counted_from = -1;
  std::vector<double> diff(size), proj(size);
  for (long step = 1; step <= total; ++step) {
    integ.step();
    if (step % options.renorm_every != 0 && step != total) continue;
    double sq = 0.0;
    for (int back = 0; back <= integ.max_lag(); ++back) {
      const double* z = integ.lagged(back);
      for (int i = 0; i < size; ++i) diff[i] = z[size + i] - z[i];
      project(diff.data(), proj.data());
      for (int i = 0; i < size; ++i) sq += proj[i] * proj[i];
    }
    const double norm = std::sqrt(sq / (integ.max_lag() + 1));
    const double scale = epsilon / norm;
    integ.transform_history([&](double* x, double* dx) {
      for (int i = 0; i < size; ++i) diff[i] = x[size + i] - x[i];
      project(diff.data(), proj.data());
      for (int i = 0; i < size; ++i) x[size + i] = x[i] + scale * proj[i];
      for (int i = 0; i < size; ++i) diff[i] = dx[size + i] - dx[i];
      project(diff.data(), proj.data());
      for (int i = 0; i < size; ++i) dx[size + i] = dx[i] + scale * proj[i];
    });
    if (step >= transient) {
      if (counted_from < 0) {
        counted_from = step;
      } else {
        log_sum += std::log(norm / epsilon);
      }
    }
  }
  return log_sum / (static_cast<double>(total - counted_from) * dt);
}

double isolated_node_mle(const NodeModel& model, const Vector& x0, double dt, double horizon,
                         double transient_fraction) {
  const int n = model.dim();
  DelayRhs rhs = [&model, n](double, const double* z, const double* const*, double* dz) {
    model.f(z, dz);
    std::vector<double> jac(n * n);
    model.df(z, jac.data());
    for (int r = 0; r < n; ++r) {
      double acc = 0.0;
      for (int c = 0; c < n; ++c) acc += jac[r * n + c] * z[n + c];
      dz[n + r] = acc;
    }
  };
  Vector z0(2 * n);
  z0.head(n) = x0;
  z0.tail(n) = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  DelayIntegrator integ(2 * n, {}, dt, rhs, z0);
  const long total = std::lround(horizon / dt);
  const long transient = std::lround(transient_fraction * total);
  double log_sum = 0.0;
  long from = -1;
  for (long step = 1; step <= total; ++step) {
    integ.step();
    if (step % 10 != 0) continue;
    double* z = integ.state();
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += z[n + i] * z[n + i];
    norm = std::sqrt(norm);
    for (int i = 0; i < n; ++i) z[n + i] /= norm;
    if (step >= transient) {
      if (from < 0) {
        from = step;
      } else {
        log_sum += std::log(norm);
      }
    }
  }
  return log_sum / (static_cast<double>(total - from) * dt);
}

}  // namespace csync::oracle
