#include "csync/cases.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace csync {

namespace {

const std::vector<std::string> kFixtures{"example5",          "fig1net",          "violin_undirected",
                                         "violin_arrowhead",  "violin_unidir",    "neuron_full",
                                         "neuron_cut_up",     "neuron_cut_down"};

}  // namespace

std::filesystem::path fixture_dir() {
  if (const char* env = std::getenv("CSYNC_FIXTURES"); env && *env) return env;
  return CSYNC_FIXTURE_DIR;
}

std::vector<std::string> fixture_names() { return kFixtures; }

std::vector<double> linspace(double from, double to, int n) {
  std::vector<double> out;
  if (n == 1) return {from};
  for (int i = 0; i < n; ++i) out.push_back(from + (to - from) * i / (n - 1));
  return out;
}

CaseConfig load_case(const std::filesystem::path& path) {
  CaseConfig c;
  c.file = path;
  c.network = load_network(path);
  std::ifstream in(path);
  const auto doc = nlohmann::json::parse(in);
  c.name = doc.value("name", path.stem().string());
  if (!doc.contains("case")) return c;
  const auto& meta = doc["case"];
  const auto params = meta.value("params", nlohmann::json::object());
  for (const auto& [k, v] : params.items()) c.params[k] = v.get<double>();
  c.dt = meta.value("dt", c.dt);
  c.horizon = meta.value("horizon", c.horizon);
  if (meta.contains("sweep")) {
    const auto& s = meta["sweep"];
    c.sweep_param = s.at("param").get<std::string>();
    c.grid = linspace(s.at("from").get<double>(), s.at("to").get<double>(), s.at("points").get<int>());
  }
  if (meta.contains("partitions")) {
    for (const auto& [k, v] : meta["partitions"].items()) {
      std::vector<std::vector<int>> clusters;
      for (const auto& cl : v) {
        std::vector<int> nodes;
        for (const auto& i : cl) nodes.push_back(i.get<int>() - 1);
        clusters.push_back(std::move(nodes));
      }
      c.partitions.emplace(k, Partition::from_clusters(clusters, c.network.size()));
    }
  }
  c.expected = meta.value("expected", nlohmann::json::object());
  // Bindings must resolve against the registry.
  bind_models(c.network, c.params);
  return c;
}

CaseConfig fixture(const std::string& name) {
  if (std::find(kFixtures.begin(), kFixtures.end(), name) == kFixtures.end()) {
    throw std::invalid_argument("unknown fixture '" + name + "'");
  }
  return load_case(fixture_dir() / (name + ".json"));
}

}  // namespace csync
