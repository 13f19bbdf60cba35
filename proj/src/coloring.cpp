#include "csync/coloring.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace csync {

namespace {

// Row sums of every layer over the clusters of p: sums(i, k * Q + c).
Matrix cluster_input_sums(const Network& net, const Partition& p) {
  const int n = net.size();
  const int q = p.cluster_count();
  Matrix sums = Matrix::Zero(n, net.layer_count() * q);
  for (int k = 0; k < net.layer_count(); ++k) {
    const Matrix& a = net.layers[k].adjacency;
    for (int j = 0; j < n; ++j) {
      const int col = k * q + p.cluster_of(j);
      for (int i = 0; i < n; ++i) sums(i, col) += a(i, j);
    }
  }
  return sums;
}

int compare_rows(const Matrix& m, int a, int b, double tol) {
  for (int c = 0; c < m.cols(); ++c) {
    const double d = m(a, c) - m(b, c);
    if (d < -tol) return -1;
    if (d > tol) return 1;
  }
  return 0;
}

}  // namespace

bool is_balanced(const Network& net, const Partition& p, double tol) {
  if (p.size() != net.size()) throw std::invalid_argument("partition does not cover the network");
  const Matrix sums = cluster_input_sums(net, p);
  std::vector<int> representative(p.cluster_count(), -1);
  for (int i = 0; i < net.size(); ++i) {
    int& r = representative[p.cluster_of(i)];
    if (r == -1) {
      r = i;
      continue;
    }
    if (net.node_types[i] != net.node_types[r]) return false;
    if ((sums.row(i) - sums.row(r)).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

Partition coarsest_balanced_refinement(const Network& net, const Partition& start, double tol) {
  if (start.size() != net.size()) throw std::invalid_argument("partition does not cover the network");
  const int n = net.size();
  // Node types are folded into the starting labels.
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = start.cluster_of(i) * (net.type_count() + 1) + net.node_types[i];
  Partition current = Partition::from_labels(labels);

  while (true) {
    const Matrix sums = cluster_input_sums(net, current);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (current.cluster_of(a) != current.cluster_of(b)) return current.cluster_of(a) < current.cluster_of(b);
      return compare_rows(sums, a, b, tol) < 0;
    });
    std::vector<int> next(n);
    int label = 0;
    for (int k = 0; k < n; ++k) {
      if (k > 0) {
        const int prev = order[k - 1];
        const int cur = order[k];
        if (current.cluster_of(prev) != current.cluster_of(cur) || compare_rows(sums, prev, cur, tol) != 0) {
          ++label;
        }
      }
      next[order[k]] = label;
    }
    Partition refined = Partition::from_labels(next);
    if (refined.cluster_count() == current.cluster_count()) break;
    current = std::move(refined);
  }
  // Fixed point of the refinement must be balanced.
  assert(is_balanced(net, current, tol));
  return current;
}

Partition minimal_balanced_coloring(const Network& net) {
  return coarsest_balanced_refinement(net, Partition::uniform(net.size()));
}

double QuotientNetwork::max_delay() const {
  double d = 0.0;
  for (double x : delay) d = std::max(d, x);
  return d;
}

double quotient_residual(const Network& net, const Partition& p) {
  const Matrix sums = cluster_input_sums(net, p);
  std::vector<int> representative(p.cluster_count(), -1);
  double worst = 0.0;
  for (int i = 0; i < net.size(); ++i) {
    int& r = representative[p.cluster_of(i)];
    if (r == -1) {
      r = i;
      continue;
    }
    worst = std::max(worst, (sums.row(i) - sums.row(r)).cwiseAbs().maxCoeff());
  }
  return worst;
}

QuotientNetwork quotient(const Network& net, const Partition& p) {
  if (!is_balanced(net, p)) {
    throw UnbalancedPartition("partition " + p.to_string() + " is not balanced");
  }
  const int q = p.cluster_count();
  const Matrix sums = cluster_input_sums(net, p);
  QuotientNetwork out;
  out.partition = p;
  out.state_dim = net.state_dim;
  out.cluster_type.assign(q, 0);
  std::vector<int> representative(q, -1);
  for (int i = 0; i < net.size(); ++i) {
    if (representative[p.cluster_of(i)] == -1) representative[p.cluster_of(i)] = i;
  }
  for (int c = 0; c < q; ++c) out.cluster_type[c] = net.node_types[representative[c]];
  for (int k = 0; k < net.layer_count(); ++k) {
    Matrix r(q, q);
    for (int c = 0; c < q; ++c) {
      for (int d = 0; d < q; ++d) r(c, d) = sums(representative[c], k * q + d);
    }
    out.R.push_back(std::move(r));
    out.sigma.push_back(net.layers[k].sigma);
    out.delay.push_back(net.layers[k].delay);
    out.coupling.push_back(net.layers[k].coupling);
  }
  return out;
}

}  // namespace csync
