#include "csync/rcm.hpp"

#include <algorithm>
#include <cstdlib>
#include <queue>

namespace csync {

std::vector<int> reverse_cuthill_mckee(const std::vector<std::vector<int>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  auto degree = [&](int v) { return static_cast<int>(adjacency[v].size()); };
  auto by_degree = [&](int a, int b) { return degree(a) != degree(b) ? degree(a) < degree(b) : a < b; };

  std::vector<int> order;
  order.reserve(n);
  std::vector<char> visited(n, 0);
  std::vector<int> seeds(n);
  for (int v = 0; v < n; ++v) seeds[v] = v;
  std::sort(seeds.begin(), seeds.end(), by_degree);

  for (int seed : seeds) {
    if (visited[seed]) continue;
    const std::size_t start = order.size();
    std::queue<int> frontier;
    frontier.push(seed);
    visited[seed] = 1;
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop();
      order.push_back(v);
      std::vector<int> next;
      for (int w : adjacency[v]) {
        if (!visited[w]) {
          visited[w] = 1;
          next.push_back(w);
        }
      }
      std::sort(next.begin(), next.end(), by_degree);
      for (int w : next) frontier.push(w);
    }
    std::reverse(order.begin() + static_cast<long>(start), order.end());
  }
  return order;
}

int bandwidth(const std::vector<std::vector<int>>& adjacency, const std::vector<int>& order) {
  std::vector<int> pos(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<int>(k);
  int width = 0;
  for (std::size_t v = 0; v < adjacency.size(); ++v) {
    for (int w : adjacency[v]) width = std::max(width, std::abs(pos[v] - pos[w]));
  }
  return width;
}

}  // namespace csync
