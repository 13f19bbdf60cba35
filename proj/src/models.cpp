#include "csync/models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace csync {

void NodeModel::sample_state(std::mt19937_64& rng, double* out) const {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < dim(); ++i) out[i] = u(rng);
}

namespace {

double param(const Params& params, const std::string& model, const std::string& key, double fallback) {
  if (auto it = params.find(model + "." + key); it != params.end()) return it->second;
  if (auto it = params.find(key); it != params.end()) return it->second;
  return fallback;
}

class Phase final : public NodeModel {
 public:
  Phase(std::string id, double omega) : id_(std::move(id)), omega_(omega) {}
  const std::string& id() const override { return id_; }
  int dim() const override { return 1; }
  void f(const double*, double* out) const override { out[0] = omega_; }
  void df(const double*, double* jac) const override { jac[0] = 0.0; }
  void sample_state(std::mt19937_64& rng, double* out) const override {
    out[0] = std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(rng);
  }

 private:
  std::string id_;
  double omega_;
};

// x' = a x^2 - x^3 - y - z, y' = (a + alpha) x^2 - y, z' = c (b x - z + e)
class HindmarshRose final : public NodeModel {
 public:
  HindmarshRose(std::string id, const Params& p, double alpha)
      : id_(std::move(id)),
        a_(param(p, id_, "a", 2.8)),
        alpha_(param(p, id_, "alpha", alpha)),
        b_(param(p, id_, "b", 9.0)),
        c_(param(p, id_, "c", 0.001)),
        e_(param(p, id_, "e", 5.0)) {}
  const std::string& id() const override { return id_; }
  int dim() const override { return 3; }
  void f(const double* x, double* out) const override {
    out[0] = a_ * x[0] * x[0] - x[0] * x[0] * x[0] - x[1] - x[2];
    out[1] = (a_ + alpha_) * x[0] * x[0] - x[1];
    out[2] = c_ * (b_ * x[0] - x[2] + e_);
  }
  void df(const double* x, double* jac) const override {
    jac[0] = 2.0 * a_ * x[0] - 3.0 * x[0] * x[0];
    jac[1] = -1.0;
    jac[2] = -1.0;
    jac[3] = 2.0 * (a_ + alpha_) * x[0];
    jac[4] = -1.0;
    jac[5] = 0.0;
    jac[6] = c_ * b_;
    jac[7] = 0.0;
    jac[8] = -c_;
  }
  // Box around the bursting attractor; z moves on the slow 1/c time scale.
  void sample_state(std::mt19937_64& rng, double* out) const override {
    out[0] = std::uniform_real_distribution<double>(-1.5, 1.5)(rng);
    out[1] = std::uniform_real_distribution<double>(-10.0, 0.0)(rng);
    out[2] = std::uniform_real_distribution<double>(2.5, 3.5)(rng);
  }

 private:
  std::string id_;
  double a_, alpha_, b_, c_, e_;
};

class StuartLandau final : public NodeModel {
 public:
  StuartLandau(std::string id, const Params& p)
      : id_(std::move(id)), mu_(param(p, id_, "mu", 1.0)), omega_(param(p, id_, "omega", 1.0)) {}
  const std::string& id() const override { return id_; }
  int dim() const override { return 2; }
  void f(const double* x, double* out) const override {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    out[0] = mu_ * x[0] - omega_ * x[1] - r2 * x[0];
    out[1] = omega_ * x[0] + mu_ * x[1] - r2 * x[1];
  }
  void df(const double* x, double* jac) const override {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    jac[0] = mu_ - r2 - 2.0 * x[0] * x[0];
    jac[1] = -omega_ - 2.0 * x[0] * x[1];
    jac[2] = omega_ - 2.0 * x[0] * x[1];
    jac[3] = mu_ - r2 - 2.0 * x[1] * x[1];
  }

 private:
  std::string id_;
  double mu_, omega_;
};

class Rossler final : public NodeModel {
 public:
  Rossler(std::string id, const Params& p)
      : id_(std::move(id)),
        a_(param(p, id_, "a", 0.2)),
        b_(param(p, id_, "b", 0.2)),
        c_(param(p, id_, "c", 5.7)) {}
  const std::string& id() const override { return id_; }
  int dim() const override { return 3; }
  void f(const double* x, double* out) const override {
    out[0] = -x[1] - x[2];
    out[1] = x[0] + a_ * x[1];
    out[2] = b_ + x[2] * (x[0] - c_);
  }
  void df(const double* x, double* jac) const override {
    jac[0] = 0.0;
    jac[1] = -1.0;
    jac[2] = -1.0;
    jac[3] = 1.0;
    jac[4] = a_;
    jac[5] = 0.0;
    jac[6] = x[2];
    jac[7] = 0.0;
    jac[8] = x[0] - c_;
  }
  void sample_state(std::mt19937_64& rng, double* out) const override {
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    out[0] = u(rng);
    out[1] = u(rng);
    out[2] = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }

 private:
  std::string id_;
  double a_, b_, c_;
};

void zero(int n, double* out) { std::fill(out, out + n, 0.0); }

class KuramotoSine final : public CouplingFunction {
 public:
  const std::string& id() const override { return id_; }
  void h(int n, const double* xi, const double* xj, double* out) const override {
    zero(n, out);
    out[0] = std::sin(xj[0] - xi[0]);
  }
  void d_receiver(int n, const double* xi, const double* xj, double* jac) const override {
    zero(n * n, jac);
    jac[0] = -std::cos(xj[0] - xi[0]);
  }
  void d_sender(int n, const double* xi, const double* xj, double* jac) const override {
    zero(n * n, jac);
    jac[0] = std::cos(xj[0] - xi[0]);
  }

 private:
  std::string id_ = "kuramoto_sine";
};

// x_j - x_i on all components, or on the first one only.
class Diffusive final : public CouplingFunction {
 public:
  explicit Diffusive(bool first_only) : id_(first_only ? "diffusive_x" : "diffusive"), first_only_(first_only) {}
  const std::string& id() const override { return id_; }
  void h(int n, const double* xi, const double* xj, double* out) const override {
    zero(n, out);
    for (int c = 0; c < (first_only_ ? 1 : n); ++c) out[c] = xj[c] - xi[c];
  }
  void d_receiver(int n, const double*, const double*, double* jac) const override {
    zero(n * n, jac);
    for (int c = 0; c < (first_only_ ? 1 : n); ++c) jac[c * n + c] = -1.0;
  }
  void d_sender(int n, const double*, const double*, double* jac) const override {
    zero(n * n, jac);
    for (int c = 0; c < (first_only_ ? 1 : n); ++c) jac[c * n + c] = 1.0;
  }

 private:
  std::string id_;
  bool first_only_;
};

// Excitatory synapse on the first component: (d - x_i) / (1 + exp(-lambda (x_j - theta))).
class Chemical final : public CouplingFunction {
 public:
  explicit Chemical(const Params& p)
      : d_(param(p, id_, "d", 2.0)), lambda_(param(p, id_, "lambda", 10.0)), theta_(param(p, id_, "theta", -0.25)) {}
  const std::string& id() const override { return id_; }
  void h(int n, const double* xi, const double* xj, double* out) const override {
    zero(n, out);
    out[0] = (d_ - xi[0]) * sigmoid(xj[0]);
  }
  void d_receiver(int n, const double*, const double* xj, double* jac) const override {
    zero(n * n, jac);
    jac[0] = -sigmoid(xj[0]);
  }
  void d_sender(int n, const double* xi, const double* xj, double* jac) const override {
    zero(n * n, jac);
    const double s = sigmoid(xj[0]);
    jac[0] = (d_ - xi[0]) * lambda_ * s * (1.0 - s);
  }

 private:
  double sigmoid(double x) const { return 1.0 / (1.0 + std::exp(-lambda_ * (x - theta_))); }

  std::string id_ = "chemical";
  double d_, lambda_, theta_;
};

using NodeFactory = std::function<std::shared_ptr<const NodeModel>(const Params&)>;
using CouplingFactory = std::function<std::shared_ptr<const CouplingFunction>(const Params&)>;

const std::map<std::string, NodeFactory>& node_registry() {
  static const std::map<std::string, NodeFactory> registry{
      {"phase", [](const Params& p) { return std::make_shared<Phase>("phase", param(p, "phase", "omega", 1.0)); }},
      {"hindmarsh_rose", [](const Params& p) { return std::make_shared<HindmarshRose>("hindmarsh_rose", p, 1.6); }},
      {"hr_layer1", [](const Params& p) { return std::make_shared<HindmarshRose>("hr_layer1", p, 1.6); }},
      {"hr_layer2", [](const Params& p) { return std::make_shared<HindmarshRose>("hr_layer2", p, 1.7); }},
      {"stuart_landau", [](const Params& p) { return std::make_shared<StuartLandau>("stuart_landau", p); }},
      {"rossler", [](const Params& p) { return std::make_shared<Rossler>("rossler", p); }},
  };
  return registry;
}

const std::map<std::string, CouplingFactory>& coupling_registry() {
  static const std::map<std::string, CouplingFactory> registry{
      {"kuramoto_sine", [](const Params&) { return std::make_shared<KuramotoSine>(); }},
      {"diffusive", [](const Params&) { return std::make_shared<Diffusive>(false); }},
      {"diffusive_x", [](const Params&) { return std::make_shared<Diffusive>(true); }},
      {"chemical", [](const Params& p) { return std::make_shared<Chemical>(p); }},
  };
  return registry;
}

template <typename Map>
std::vector<std::string> keys(const Map& m) {
  std::vector<std::string> out;
  for (const auto& [k, v] : m) out.push_back(k);
  return out;
}

}  // namespace

std::shared_ptr<const NodeModel> make_node_model(const std::string& id, const Params& params) {
  const auto& reg = node_registry();
  auto it = reg.find(id);
  if (it == reg.end()) throw ModelError("unknown node model '" + id + "'");
  return it->second(params);
}

std::shared_ptr<const CouplingFunction> make_coupling(const std::string& id, const Params& params) {
  const auto& reg = coupling_registry();
  auto it = reg.find(id);
  if (it == reg.end()) throw ModelError("unknown coupling '" + id + "'");
  return it->second(params);
}

std::vector<std::string> node_model_ids() { return keys(node_registry()); }
std::vector<std::string> coupling_ids() { return keys(coupling_registry()); }

ModelSet bind_models(const Network& net, const Params& params) {
  if (static_cast<int>(net.node_models.size()) != net.type_count()) {
    throw ModelError("network binds " + std::to_string(net.node_models.size()) + " node models for " +
                     std::to_string(net.type_count()) + " node types");
  }
  ModelSet out;
  for (const auto& id : net.node_models) {
    auto model = make_node_model(id, params);
    if (model->dim() != net.state_dim) {
      throw ModelError("node model '" + id + "' has dimension " + std::to_string(model->dim()) +
                       " but state_dim is " + std::to_string(net.state_dim));
    }
    out.node.push_back(std::move(model));
  }
  for (int k = 0; k < net.layer_count(); ++k) {
    if (net.layers[k].coupling.empty()) throw ModelError("layer " + std::to_string(k + 1) + " has no coupling id");
    out.coupling.push_back(make_coupling(net.layers[k].coupling, params));
  }
  return out;
}

}  // namespace csync
