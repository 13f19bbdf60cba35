#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace csync {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One kind of link: weighted directed adjacency plus coupling strength and delay.
/// adjacency(i, j) is the weight of the arrow j -> i (0-based).
struct Layer {
  Matrix adjacency;
  double sigma = 1.0;
  double delay = 0.0;
  std::string coupling;
};

/// Directed, weighted, delayed multilayer network. Node types are 1-based
/// identifiers selecting the vector field of each node.
struct Network {
  int state_dim = 1;
  std::vector<int> node_types;
  std::vector<Layer> layers;
  /// Optional model id per node type (index type-1); empty when unbound.
  std::vector<std::string> node_models;

  int size() const { return static_cast<int>(node_types.size()); }
  int layer_count() const { return static_cast<int>(layers.size()); }
  int type_count() const;
  double max_delay() const;
};

/// Parse or validation failure with a location such as "/layers/0/entries/3".
class NetworkError : public std::runtime_error {
 public:
  NetworkError(std::string location, const std::string& what);
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

struct Diagnostic {
  std::string code;  // "shape", "weight", "node-type", "delay", "layers", "state-dim"
  std::string location;
  std::string message;
};

/// Empty iff every Network invariant holds.
std::vector<Diagnostic> validate_network(const Network& net);

Network parse_network(const nlohmann::json& doc);
Network load_network(const std::filesystem::path& path);

/// Emits the file schema with 1-based (i, j, w) entries. Integral weights are
/// written as integers so they survive a round trip unchanged.
nlohmann::json to_json(const Network& net);
void save_network(const Network& net, const std::filesystem::path& path);

/// Relabels nodes: new node perm[i] is old node i (0-based).
Network permute(const Network& net, std::span<const int> perm);

}  // namespace csync
