#include "csync/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace csync {

using nlohmann::json;

NetworkError::NetworkError(std::string location, const std::string& what)
    : std::runtime_error(location.empty() ? what : location + ": " + what),
      location_(std::move(location)) {}

int Network::type_count() const {
  if (node_types.empty()) return 0;
  return *std::max_element(node_types.begin(), node_types.end());
}

double Network::max_delay() const {
  double d = 0.0;
  for (const auto& l : layers) d = std::max(d, l.delay);
  return d;
}

std::vector<Diagnostic> validate_network(const Network& net) {
  std::vector<Diagnostic> out;
  const int n = net.size();
  if (n < 1) out.push_back({"shape", "/n", "network has no nodes"});
  if (net.state_dim < 1) out.push_back({"state-dim", "/state_dim", "state_dim must be >= 1"});
  if (net.layers.empty()) out.push_back({"layers", "/layers", "at least one layer is required"});

  std::set<int> types(net.node_types.begin(), net.node_types.end());
  if (!types.empty()) {
    if (*types.begin() != 1 || *types.rbegin() != static_cast<int>(types.size())) {
      out.push_back({"node-type", "/node_types",
                     "node type identifiers must be contiguous starting at 1"});
    }
  }
  if (!net.node_models.empty() && static_cast<int>(net.node_models.size()) != net.type_count()) {
    out.push_back({"node-type", "/node_models",
                   "node_models must list one model per node type (" +
                       std::to_string(net.type_count()) + ")"});
  }

  for (int k = 0; k < net.layer_count(); ++k) {
    const auto& l = net.layers[k];
    const std::string where = "/layers/" + std::to_string(k);
    if (l.adjacency.rows() != n || l.adjacency.cols() != n) {
      std::ostringstream msg;
      msg << "adjacency is " << l.adjacency.rows() << "x" << l.adjacency.cols() << ", expected " << n
          << "x" << n;
      out.push_back({"shape", where, msg.str()});
    } else if (!l.adjacency.allFinite()) {
      out.push_back({"weight", where, "adjacency contains non-finite weights"});
    }
    if (!(l.delay >= 0.0) || !std::isfinite(l.delay)) {
      out.push_back({"delay", where + "/delay", "delay must be finite and >= 0"});
    }
    if (!std::isfinite(l.sigma)) {
      out.push_back({"weight", where + "/sigma", "coupling strength must be finite"});
    }
  }
  return out;
}

namespace {

double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) throw NetworkError(where, "expected a number");
  return v.get<double>();
}

int integer_at(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw NetworkError(where, "expected an integer");
  return v.get<int>();
}

Layer parse_layer(const json& doc, int n, const std::string& where) {
  if (!doc.is_object()) throw NetworkError(where, "layer must be an object");
  Layer layer;
  layer.sigma = doc.contains("sigma") ? number_at(doc["sigma"], where + "/sigma") : 1.0;
  layer.delay = doc.contains("delay") ? number_at(doc["delay"], where + "/delay") : 0.0;
  if (doc.contains("coupling")) {
    if (!doc["coupling"].is_string()) throw NetworkError(where + "/coupling", "expected a string");
    layer.coupling = doc["coupling"].get<std::string>();
  }
  if (layer.delay < 0.0) throw NetworkError(where + "/delay", "negative delay");

  const bool has_entries = doc.contains("entries");
  const bool has_matrix = doc.contains("matrix");
  if (has_entries == has_matrix) {
    throw NetworkError(where, "layer needs exactly one of 'entries' or 'matrix'");
  }
  if (has_matrix) {
    const auto& rows = doc["matrix"];
    if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
      throw NetworkError(where + "/matrix", "non-square adjacency: expected " + std::to_string(n) +
                                                " rows");
    }
    layer.adjacency = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const auto& row = rows[i];
      const std::string rw = where + "/matrix/" + std::to_string(i);
      if (!row.is_array() || static_cast<int>(row.size()) != n) {
        throw NetworkError(rw, "non-square adjacency: expected " + std::to_string(n) + " columns");
      }
      for (int j = 0; j < n; ++j) layer.adjacency(i, j) = number_at(row[j], rw + "/" + std::to_string(j));
    }
  } else {
    const auto& entries = doc["entries"];
    if (!entries.is_array()) throw NetworkError(where + "/entries", "expected an array");
    layer.adjacency = Matrix::Zero(n, n);
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const std::string ew = where + "/entries/" + std::to_string(e);
      const auto& t = entries[e];
      if (!t.is_array() || t.size() != 3) throw NetworkError(ew, "entry must be [i, j, w]");
      const int i = integer_at(t[0], ew + "/0");
      const int j = integer_at(t[1], ew + "/1");
      const double w = number_at(t[2], ew + "/2");
      if (i < 1 || i > n || j < 1 || j > n) {
        throw NetworkError(ew, "node label out of range 1.." + std::to_string(n));
      }
      if (!std::isfinite(w)) throw NetworkError(ew + "/2", "non-finite weight");
      layer.adjacency(i - 1, j - 1) += w;
    }
  }
  return layer;
}

}  // namespace

Network parse_network(const json& doc) {
  if (!doc.is_object()) throw NetworkError("", "network document must be a JSON object");
  if (!doc.contains("n")) throw NetworkError("/n", "missing field");
  const int n = integer_at(doc["n"], "/n");
  if (n < 1) throw NetworkError("/n", "node count must be >= 1");

  Network net;
  net.state_dim = doc.contains("state_dim") ? integer_at(doc["state_dim"], "/state_dim") : 1;

  if (doc.contains("node_types")) {
    const auto& types = doc["node_types"];
    if (!types.is_array() || static_cast<int>(types.size()) != n) {
      throw NetworkError("/node_types", "expected an array of length " + std::to_string(n));
    }
    for (std::size_t i = 0; i < types.size(); ++i) {
      net.node_types.push_back(integer_at(types[i], "/node_types/" + std::to_string(i)));
    }
  } else {
    net.node_types.assign(n, 1);
  }

  if (doc.contains("node_models")) {
    const auto& models = doc["node_models"];
    if (!models.is_array()) throw NetworkError("/node_models", "expected an array of strings");
    for (std::size_t i = 0; i < models.size(); ++i) {
      if (!models[i].is_string()) {
        throw NetworkError("/node_models/" + std::to_string(i), "expected a string");
      }
      net.node_models.push_back(models[i].get<std::string>());
    }
  }

  if (!doc.contains("layers") || !doc["layers"].is_array()) {
    throw NetworkError("/layers", "expected an array of layers");
  }
  for (std::size_t k = 0; k < doc["layers"].size(); ++k) {
    net.layers.push_back(parse_layer(doc["layers"][k], n, "/layers/" + std::to_string(k)));
  }

  if (auto diags = validate_network(net); !diags.empty()) {
    throw NetworkError(diags.front().location, diags.front().message);
  }
  return net;
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NetworkError(path.string(), "cannot open network file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw NetworkError(path.string(), std::string("malformed JSON: ") + e.what());
  }
  try {
    return parse_network(doc);
  } catch (const NetworkError& e) {
    throw NetworkError(path.string() + ":" + e.location(), e.what());
  }
}

namespace {

json weight_json(double w) {
  if (std::abs(w) < 9.0e15 && w == std::floor(w)) return static_cast<long long>(w);
  return w;
}

}  // namespace

json to_json(const Network& net) {
  json doc;
  doc["n"] = net.size();
  doc["state_dim"] = net.state_dim;
  doc["node_types"] = net.node_types;
  if (!net.node_models.empty()) doc["node_models"] = net.node_models;
  doc["layers"] = json::array();
  for (const auto& l : net.layers) {
    json layer;
    layer["sigma"] = weight_json(l.sigma);
    layer["delay"] = weight_json(l.delay);
    layer["coupling"] = l.coupling;
    json entries = json::array();
    for (int i = 0; i < l.adjacency.rows(); ++i) {
      for (int j = 0; j < l.adjacency.cols(); ++j) {
        if (l.adjacency(i, j) != 0.0) entries.push_back({i + 1, j + 1, weight_json(l.adjacency(i, j))});
      }
    }
    layer["entries"] = std::move(entries);
    doc["layers"].push_back(std::move(layer));
  }
  return doc;
}

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw NetworkError(path.string(), "cannot write network file");
  out << to_json(net).dump(2) << '\n';
}

Network permute(const Network& net, std::span<const int> perm) {
  const int n = net.size();
  if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("permutation size mismatch");
  Network out = net;
  for (int i = 0; i < n; ++i) out.node_types[perm[i]] = net.node_types[i];
  for (int k = 0; k < net.layer_count(); ++k) {
    const Matrix& a = net.layers[k].adjacency;
    Matrix& b = out.layers[k].adjacency;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) b(perm[i], perm[j]) = a(i, j);
    }
  }
  return out;
}

}  // namespace csync
