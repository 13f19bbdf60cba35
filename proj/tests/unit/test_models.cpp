#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "csync/models.hpp"

using namespace csync;

namespace {

Matrix jacobian_of(const std::function<void(const double*, double*)>& df, int n, const Vector& x) {
  std::vector<double> jac(n * n);
  df(x.data(), jac.data());
  Matrix out(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out(r, c) = jac[r * n + c];
  return out;
}

double relative_error(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("node model Jacobians match finite differences") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& id : node_model_ids()) {
    CAPTURE(id);
    const auto model = make_node_model(id, {});
    const int n = model->dim();
    for (int trial = 0; trial < 20; ++trial) {
      Vector x(n);
      for (int i = 0; i < n; ++i) x[i] = u(rng);
      const auto fn = [&](const Vector& v) {
        Vector out(n);
        model->f(v.data(), out.data());
        return out;
      };
      const Matrix fd = oracle::finite_difference(fn, x);
      const Matrix an = jacobian_of([&](const double* p, double* j) { model->df(p, j); }, n, x);
      CHECK(relative_error(an, fd) <= 1e-6);
    }
  }
}

TEST_CASE("coupling derivatives match finite differences") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (const auto& id : coupling_ids()) {
    const auto h = make_coupling(id, {});
    for (int n : {1, 2, 3}) {
      CAPTURE(id);
      CAPTURE(n);
      for (int trial = 0; trial < 20; ++trial) {
        Vector xi(n), xj(n);
        for (int i = 0; i < n; ++i) {
          xi[i] = u(rng);
          xj[i] = u(rng);
        }
        const auto recv = [&](const Vector& v) {
          Vector out(n);
          h->h(n, v.data(), xj.data(), out.data());
          return out;
        };
        const auto send = [&](const Vector& v) {
          Vector out(n);
          h->h(n, xi.data(), v.data(), out.data());
          return out;
        };
        const Matrix dr = jacobian_of([&](const double*, double* j) { h->d_receiver(n, xi.data(), xj.data(), j); }, n, xi);
        const Matrix ds = jacobian_of([&](const double*, double* j) { h->d_sender(n, xi.data(), xj.data(), j); }, n, xj);
        CHECK(relative_error(dr, oracle::finite_difference(recv, xi)) <= 1e-6);
        CHECK(relative_error(ds, oracle::finite_difference(send, xj)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("parameters and registry errors") {
  const double x[3] = {1.0, 0.0, 0.0};
  double out[3];
  make_node_model("hr_layer2", {})->f(x, out);
  CHECK(out[1] == doctest::Approx(2.8 + 1.7 - 0.0));
  make_node_model("hr_layer2", {{"hr_layer2.alpha", 2.0}, {"alpha", 5.0}})->f(x, out);
  CHECK(out[1] == doctest::Approx(4.8));
  make_node_model("hr_layer1", {{"alpha", 5.0}})->f(x, out);
  CHECK(out[1] == doctest::Approx(7.8));
  const double phi = 0.0;
  double w;
  make_node_model("phase", {{"phase.omega", 0.25}})->f(&phi, &w);
  CHECK(w == 0.25);
  CHECK_THROWS_AS(make_node_model("lorenz", {}), ModelError);
  CHECK_THROWS_AS(make_coupling("gap", {}), ModelError);

  Network net;
  net.state_dim = 2;
  net.node_types = {1, 1};
  net.node_models = {"hr_layer1"};
  net.layers.push_back(Layer{Matrix::Zero(2, 2), 1.0, 0.0, "diffusive"});
  CHECK_THROWS_AS(bind_models(net, {}), ModelError);
  net.node_models = {"stuart_landau"};
  CHECK(bind_models(net, {}).node.size() == 1);
  net.node_models.clear();
  CHECK_THROWS_AS(bind_models(net, {}), ModelError);
}
