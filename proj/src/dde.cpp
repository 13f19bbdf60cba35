#include "csync/dde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csync {

double aligned_step(double requested, const std::vector<double>& delays) {
  if (!(requested > 0.0)) throw std::invalid_argument("step size must be positive");
  std::vector<double> positive;
  for (double d : delays) {
    if (d > 0.0) positive.push_back(d);
  }
  if (positive.empty()) return requested;
  const double longest = *std::max_element(positive.begin(), positive.end());
  const long first = static_cast<long>(std::ceil(longest / requested - 1e-9));
  for (long m = std::max(1L, first); m < first + 1'000'000; ++m) {
    const double dt = longest / static_cast<double>(m);
    const bool fits = std::all_of(positive.begin(), positive.end(), [&](double d) {
      const double ratio = d / dt;
      return std::abs(ratio - std::round(ratio)) < 1e-9 * std::max(1.0, ratio);
    });
    if (fits) return dt;
  }
  throw std::invalid_argument("no step size divides every delay");
}

DelayIntegrator::DelayIntegrator(int dim, std::vector<double> delays, double dt, DelayRhs rhs, const Vector& x0)
    : dim_(dim), delays_(std::move(delays)), dt_(dt), rhs_(std::move(rhs)) {
  if (x0.size() != dim_) throw std::invalid_argument("initial state has the wrong dimension");
  for (double d : delays_) {
    const double ratio = d / dt_;
    const long lag = std::lround(ratio);
    if (d < 0.0 || std::abs(ratio - static_cast<double>(lag)) > 1e-6 * std::max(1.0, ratio)) {
      throw std::invalid_argument("delay is not a whole number of steps; use aligned_step");
    }
    lags_.push_back(static_cast<int>(lag));
    max_lag_ = std::max(max_lag_, static_cast<int>(lag));
  }
  capacity_ = max_lag_ + 2;
  states_.assign(static_cast<std::size_t>(capacity_ * dim_), 0.0);
  derivs_.assign(states_.size(), 0.0);
  for (long n = 0; n < capacity_; ++n) std::copy(x0.data(), x0.data() + dim_, slot(n));
  for (auto* v : {&k1_, &k2_, &k3_, &k4_, &stage_}) v->assign(dim_, 0.0);
  mid_.assign(delays_.size() * dim_, 0.0);
  zero_.assign(dim_, 0.0);
  delayed_.assign(delays_.size(), nullptr);
}

void DelayIntegrator::step() {
  const long n = steps_;
  const double t = time();
  double* x = slot(n);
  const int nd = static_cast<int>(delays_.size());

  for (int k = 0; k < nd; ++k) delayed_[k] = lags_[k] == 0 ? x : slot(n - lags_[k]);
  rhs_(t, x, delayed_.data(), k1_.data());
  std::copy(k1_.begin(), k1_.end(), dslot(n));

  // Delayed values at t + dt/2.
  for (int k = 0; k < nd; ++k) {
    if (lags_[k] == 0) continue;
    const double* y0 = slot(n - lags_[k]);
    const double* y1 = slot(n - lags_[k] + 1);
    const double* f0 = dslot(n - lags_[k]);
    // The history is constant up to t = 0, so its derivative there is zero
    // whatever the solution does just after.
    const double* f1 = n - lags_[k] + 1 <= 0 ? zero_.data() : dslot(n - lags_[k] + 1);
    double* m = mid_.data() + k * dim_;
    for (int i = 0; i < dim_; ++i) m[i] = 0.5 * (y0[i] + y1[i]) + dt_ * (f0[i] - f1[i]) / 8.0;
  }
  auto midpoint_lags = [&](const double* current) {
    for (int k = 0; k < nd; ++k) delayed_[k] = lags_[k] == 0 ? current : mid_.data() + k * dim_;
  };

  for (int i = 0; i < dim_; ++i) stage_[i] = x[i] + 0.5 * dt_ * k1_[i];
  midpoint_lags(stage_.data());
  rhs_(t + 0.5 * dt_, stage_.data(), delayed_.data(), k2_.data());

  for (int i = 0; i < dim_; ++i) stage_[i] = x[i] + 0.5 * dt_ * k2_[i];
  midpoint_lags(stage_.data());
  rhs_(t + 0.5 * dt_, stage_.data(), delayed_.data(), k3_.data());

  for (int i = 0; i < dim_; ++i) stage_[i] = x[i] + dt_ * k3_[i];
  for (int k = 0; k < nd; ++k) delayed_[k] = lags_[k] == 0 ? stage_.data() : slot(n - lags_[k] + 1);
  rhs_(t + dt_, stage_.data(), delayed_.data(), k4_.data());

  // The slot for n + 1 holds the oldest sample, which no delay needs any more.
  double* next = slot(n + 1);
  for (int i = 0; i < dim_; ++i) next[i] = x[i] + dt_ / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  ++steps_;
}

void DelayIntegrator::transform_history(const std::function<void(double* x, double* dx)>& fn) {
  for (long back = 0; back <= max_lag_; ++back) fn(slot(steps_ - back), dslot(steps_ - back));
}

}  // namespace csync
