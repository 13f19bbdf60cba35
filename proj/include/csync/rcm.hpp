#pragma once

#include <vector>

namespace csync {

/// Reverse Cuthill-McKee ordering of an undirected graph given as symmetric
/// adjacency lists. order[k] is the vertex placed at position k. Each
/// component starts from its lowest-degree vertex (ties: smallest id).
std::vector<int> reverse_cuthill_mckee(const std::vector<std::vector<int>>& adjacency);

/// max |pos(u) - pos(v)| over edges under the given order.
int bandwidth(const std::vector<std::vector<int>>& adjacency, const std::vector<int>& order);

}  // namespace csync
