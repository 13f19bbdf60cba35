#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "csync/models.hpp"
#include "csync/network.hpp"
#include "csync/partition.hpp"

namespace csync {

/// A shipped example: the network plus simulation defaults and the outcomes
/// the test harness expects. Stored as a network file with an extra "case" object.
struct CaseConfig {
  std::string name;
  std::filesystem::path file;
  Network network;
  Params params;
  double dt = 1e-3;
  double horizon = 100.0;
  std::string sweep_param;
  std::vector<double> grid;
  std::map<std::string, Partition> partitions;
  nlohmann::json expected;
};

/// $CSYNC_FIXTURES if set, else the fixtures/ directory of the source tree.
std::filesystem::path fixture_dir();

std::vector<std::string> fixture_names();

/// Throws std::invalid_argument for an unknown name.
CaseConfig fixture(const std::string& name);

/// Reads any network file; the "case" object is optional.
CaseConfig load_case(const std::filesystem::path& path);

/// n evenly spaced values from `from` to `to` inclusive.
std::vector<double> linspace(double from, double to, int n);

}  // namespace csync
