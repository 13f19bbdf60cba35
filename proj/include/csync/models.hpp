#pragma once

#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "csync/network.hpp"

namespace csync {

/// Model parameters. A key "model.name" applies to that model only and wins
/// over a plain "name".
using Params = std::map<std::string, double>;

/// Isolated node vector field. Jacobians are row-major n x n.
class NodeModel {
 public:
  virtual ~NodeModel() = default;
  virtual const std::string& id() const = 0;
  virtual int dim() const = 0;
  virtual void f(const double* x, double* out) const = 0;
  virtual void df(const double* x, double* jac) const = 0;
  /// A state near the attractor, for seeding simulations. Default: uniform in [-1, 1].
  virtual void sample_state(std::mt19937_64& rng, double* out) const;
};

/// Pairwise interaction h(x_i, x_j delayed) with its two partial Jacobians.
class CouplingFunction {
 public:
  virtual ~CouplingFunction() = default;
  virtual const std::string& id() const = 0;
  virtual void h(int n, const double* xi, const double* xj, double* out) const = 0;
  virtual void d_receiver(int n, const double* xi, const double* xj, double* jac) const = 0;
  virtual void d_sender(int n, const double* xi, const double* xj, double* jac) const = 0;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::shared_ptr<const NodeModel> make_node_model(const std::string& id, const Params& params = {});
std::shared_ptr<const CouplingFunction> make_coupling(const std::string& id, const Params& params = {});

std::vector<std::string> node_model_ids();
std::vector<std::string> coupling_ids();

/// Models bound to a network: one node model per node type, one coupling per layer.
struct ModelSet {
  std::vector<std::shared_ptr<const NodeModel>> node;
  std::vector<std::shared_ptr<const CouplingFunction>> coupling;

  const NodeModel& for_type(int type) const { return *node.at(type - 1); }
};

/// Throws ModelError if the network lacks bindings, names unknown ids, or a
/// model's dimension differs from state_dim.
ModelSet bind_models(const Network& net, const Params& params = {});

}  // namespace csync
