#pragma once

#include <string>

#include <Eigen/Dense>

namespace smeme {

/// Discrete variance-preserving noise schedule.
///
/// Index convention (used everywhere in this repo): t = 0 is data,
/// t = T_steps is noise. abar[t] = prod_{s<=t} (1 - beta[s]) with
/// abar[0] = 1, so abar is strictly decreasing. Samplers run the reversed
/// index, from t = T_steps down to t = 1.
///
/// The schedule also exposes a continuous-time view used by the
/// probability-flow ODE: lambda(tau) is piecewise-linear through the
/// per-step increments delta_t = -log(1 - beta_t) placed at tau = t - 1/2,
/// so that exp(-int_0^t lambda) reproduces abar[t] exactly at every
/// integer t for any schedule.
struct NoiseSchedule {
  Eigen::ArrayXd beta;  // beta[t-1] is the step-t value, t = 1..T
  Eigen::ArrayXd abar;  // abar[t], t = 0..T
  std::string id;

  int steps() const { return static_cast<int>(beta.size()); }

  double lambda(double tau) const;
  /// Exact integral: log abar_c(tau) = -int_0^tau lambda.
  double log_abar_c(double tau) const;
  double abar_c(double tau) const { return std::exp(log_abar_c(tau)); }
  double sigma2_c(double tau) const { return 1.0 - abar_c(tau); }

  /// Rebuilds the continuous-view tables; called by the factory functions
  /// and after deserialization.
  void finalize();

 private:
  Eigen::ArrayXd delta_;     // -log(1 - beta_t), node values at tau = t - 1/2
  Eigen::ArrayXd cum_node_;  // cum_node_[t] = int_0^{t-1/2} lambda, t = 1..T
};

/// beta_t linear in t between beta_min and beta_max (inclusive).
/// Requires 0 < beta_min <= beta_max < 1.
NoiseSchedule linear_schedule(int t_steps, double beta_min, double beta_max);

/// Schedule from an explicit beta table (all entries in (0,1)).
NoiseSchedule schedule_from_betas(const Eigen::ArrayXd& betas, std::string id = "custom");

}  // namespace smeme
