#include "csync/partition.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace csync {

Partition Partition::from_labels(std::span<const int> labels) {
  Partition p;
  p.assignment_.resize(labels.size());
  std::map<int, int> relabel;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = relabel.try_emplace(labels[i], static_cast<int>(relabel.size()));
    p.assignment_[i] = it->second;
  }
  p.count_ = static_cast<int>(relabel.size());
  return p;
}

Partition Partition::from_clusters(const std::vector<std::vector<int>>& clusters, int n) {
  std::vector<int> labels(n, -1);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].empty()) throw std::invalid_argument("empty cluster");
    for (int v : clusters[c]) {
      if (v < 0 || v >= n) throw std::invalid_argument("node out of range in cluster list");
      if (labels[v] != -1) throw std::invalid_argument("node listed in two clusters");
      labels[v] = static_cast<int>(c);
    }
  }
  if (std::find(labels.begin(), labels.end(), -1) != labels.end()) {
    throw std::invalid_argument("clusters do not cover every node");
  }
  return from_labels(labels);
}

Partition Partition::singletons(int n) {
  std::vector<int> labels(n);
  std::iota(labels.begin(), labels.end(), 0);
  return from_labels(labels);
}

Partition Partition::uniform(int n) {
  std::vector<int> labels(n, 0);
  return from_labels(labels);
}

std::vector<std::vector<int>> Partition::clusters() const {
  std::vector<std::vector<int>> out(count_);
  for (int i = 0; i < size(); ++i) out[assignment_[i]].push_back(i);
  return out;
}

std::vector<int> Partition::cluster_sizes() const {
  std::vector<int> out(count_, 0);
  for (int c : assignment_) ++out[c];
  return out;
}

std::vector<int> Partition::cluster(int q) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (assignment_[i] == q) out.push_back(i);
  }
  return out;
}

std::strong_ordering Partition::operator<=>(const Partition& other) const {
  if (auto c = count_ <=> other.count_; c != 0) return c;
  return assignment_ <=> other.assignment_;
}

std::string Partition::to_string() const {
  std::string s;
  for (const auto& c : clusters()) {
    if (!s.empty()) s += ',';
    s += '{';
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k) s += ',';
      s += std::to_string(c[k] + 1);
    }
    s += '}';
  }
  return s;
}

bool refines(const Partition& fine, const Partition& coarse) {
  if (fine.size() != coarse.size()) throw std::invalid_argument("partitions over different node sets");
  std::vector<int> image(fine.cluster_count(), -1);
  for (int i = 0; i < fine.size(); ++i) {
    int& target = image[fine.cluster_of(i)];
    if (target == -1) {
      target = coarse.cluster_of(i);
    } else if (target != coarse.cluster_of(i)) {
      return false;
    }
  }
  return true;
}

Partition join(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw std::invalid_argument("partitions over different node sets");
  const int n = a.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite_by = [&](const Partition& p) {
    std::vector<int> first(p.cluster_count(), -1);
    for (int i = 0; i < n; ++i) {
      int& f = first[p.cluster_of(i)];
      if (f == -1) {
        f = i;
      } else {
        parent[find(i)] = find(f);
      }
    }
  };
  unite_by(a);
  unite_by(b);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = find(i);
  return Partition::from_labels(labels);
}

Partition meet(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw std::invalid_argument("partitions over different node sets");
  std::vector<int> labels(a.size());
  for (int i = 0; i < a.size(); ++i) labels[i] = a.cluster_of(i) * b.cluster_count() + b.cluster_of(i);
  return Partition::from_labels(labels);
}

}  // namespace csync
