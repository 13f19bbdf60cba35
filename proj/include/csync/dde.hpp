#pragma once

#include <functional>
#include <vector>

#include "csync/network.hpp"

namespace csync {

/// delayed[k] points at x(t - delays[k]); all arrays have the system dimension.
using DelayRhs = std::function<void(double t, const double* x, const double* const* delayed, double* dx)>;

/// Largest step <= requested that makes every positive delay an integer
/// number of steps. Throws std::invalid_argument if none is found.
double aligned_step(double requested, const std::vector<double>& delays);

/// Fixed-step classical Runge-Kutta for delay equations. Delays are whole
/// multiples of dt, so delayed states at step boundaries come straight from the
/// stored history; the half-step values use the cubic Hermite interpolant of
/// the two neighbouring samples. History before t = 0 is the constant x0.
class DelayIntegrator {
 public:
  DelayIntegrator(int dim, std::vector<double> delays, double dt, DelayRhs rhs, const Vector& x0);

  void step();
  void advance(long count) {
    for (long i = 0; i < count; ++i) step();
  }

  double dt() const { return dt_; }
  double time() const { return static_cast<double>(steps_) * dt_; }
  long steps() const { return steps_; }
  int dim() const { return dim_; }
  int max_lag() const { return max_lag_; }
  int lag_steps(int k) const { return lags_[k]; }

  double* state() { return slot(steps_); }
  const double* state() const { return const_cast<DelayIntegrator*>(this)->slot(steps_); }
  /// State `back` steps ago, 0 <= back <= max_lag().
  const double* lagged(int back) const { return const_cast<DelayIntegrator*>(this)->slot(steps_ - back); }

  /// Applies fn(state, derivative) to the current state and every stored past
  /// sample that can still be read as a delayed value.
  void transform_history(const std::function<void(double* x, double* dx)>& fn);

 private:
  double* slot(long n) { return states_.data() + index(n) * dim_; }
  double* dslot(long n) { return derivs_.data() + index(n) * dim_; }
  long index(long n) const { return ((n % capacity_) + capacity_) % capacity_; }

  int dim_;
  std::vector<double> delays_;
  std::vector<int> lags_;
  int max_lag_ = 0;
  double dt_;
  DelayRhs rhs_;
  long capacity_;
  long steps_ = 0;
  std::vector<double> states_, derivs_;
  std::vector<double> k1_, k2_, k3_, k4_, stage_;
  std::vector<double> mid_;  // one interpolated sample per delay
  std::vector<double> zero_;
  std::vector<const double*> delayed_;
};

}  // namespace csync
