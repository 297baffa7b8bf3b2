#pragma once

#include <cmath>
#include <stdexcept>

#include "dremr/linalg.hpp"
#include "dremr/regularization.hpp"
#include "dremr/signals.hpp"

namespace dremr {

enum class Law { Gradient, Drem, DremRegularized };
enum class DremGainMode { PerElement, Normalized };

struct EstimatorState {
  Vec theta_hat;
  Law law = Law::Gradient;
  Mat Gamma;                       // gradient law gain (SPD)
  Vec gamma_i;                     // plain DREM per-element gains
  double gamma0 = 5.0;             // switched-schedule gains
  double gamma1 = 1.0;
  double last_gamma = 0.0;         // gamma actually applied at the last step
  bool overshoot_clamped = false;  // set when the no-overshoot guard fired
};

inline EstimatorState make_gradient(const Vec& theta0, const Mat& gamma) {
  EstimatorState st;
  st.theta_hat = theta0;
  st.law = Law::Gradient;
  st.Gamma = gamma;
  return st;
}

inline EstimatorState make_drem(const Vec& theta0, double gamma0, double gamma1, Vec gamma_i = {}) {
  EstimatorState st;
  st.theta_hat = theta0;
  st.law = Law::Drem;
  st.gamma0 = gamma0;
  st.gamma1 = gamma1;
  st.gamma_i = std::move(gamma_i);
  return st;
}

inline EstimatorState make_dremr(const Vec& theta0, double gamma0, double gamma1) {
  if (gamma0 <= 0.0 || gamma1 <= 0.0) throw std::invalid_argument("estimator: gains must be positive");
  EstimatorState st;
  st.theta_hat = theta0;
  st.law = Law::DremRegularized;
  st.gamma0 = gamma0;
  st.gamma1 = gamma1;
  return st;
}

/// theta_hat <- theta_hat - tau * Gamma * phibar * (phibar^T theta_hat - z)
inline void gradient_step(EstimatorState& st, const RegressorSample& s, double tau_s) {
  if (st.law != Law::Gradient) throw std::logic_error("gradient_step: wrong law");
  const double tilde_z = dot(s.phibar, st.theta_hat) - s.z;
  const Vec g = matvec(st.Gamma, s.phibar);
  for (std::size_t i = 0; i < st.theta_hat.size(); ++i) st.theta_hat[i] -= tau_s * g[i] * tilde_z;
}

/// Switched gain: gamma1 while the scalar regressor is at or below the
/// excitation threshold, gamma0/omega^2 once it exceeds it.
inline double gain_schedule(double omega, double lambda_min_nonzero, int n, double eps, double gamma0,
                            double gamma1) {
  if (eps <= 0.0) throw std::invalid_argument("gain_schedule: eps must be positive");
  const double threshold = std::min(std::pow(lambda_min_nonzero, n), std::pow(eps, n));
  if (omega <= threshold) return gamma1;
  return gamma0 / (omega * omega);
}

namespace detail {

// Shared scalar-regression update so the plain and regularized laws produce
// bit-identical results when fed identical inputs.
inline void scalar_mix_update(Vec& theta_hat, double gamma, double omega, const Vec& mixed, double tau_s) {
  for (std::size_t i = 0; i < theta_hat.size(); ++i)
    theta_hat[i] -= tau_s * gamma * omega * (omega * theta_hat[i] - mixed[i]);
}

}  // namespace detail

/// Plain DREM update from the unregularized mixing quantities
/// omega = det(phi), Y = adj(phi)*y.
inline void drem_step(EstimatorState& st, double omega, const Vec& y_mixed, double tau_s, DremGainMode mode,
                      double lambda_min_nonzero = 0.0, double eps = 0.4) {
  if (st.law != Law::Drem) throw std::logic_error("drem_step: wrong law");
  if (mode == DremGainMode::PerElement) {
    if (st.gamma_i.size() != st.theta_hat.size()) throw std::invalid_argument("drem_step: gamma_i size mismatch");
    for (std::size_t i = 0; i < st.theta_hat.size(); ++i)
      st.theta_hat[i] -= tau_s * st.gamma_i[i] * omega * (omega * st.theta_hat[i] - y_mixed[i]);
    st.last_gamma = 0.0;
    return;
  }
  const int n = static_cast<int>(st.theta_hat.size());
  const double gamma = gain_schedule(omega, lambda_min_nonzero, n, eps, st.gamma0, st.gamma1);
  st.last_gamma = gamma;
  detail::scalar_mix_update(st.theta_hat, gamma, omega, y_mixed, tau_s);
}

/// Regularized DREM update. Guards the discrete step against overshoot: when
/// tau*gamma*omega^2 > 1 the explicit step would cross the fixed point, so
/// the estimate is set to it instead and the event is flagged.
inline void dremr_step(EstimatorState& st, const RegularizedRegression& reg, const EigenDecomposition& eig,
                       double tau_s) {
  if (st.law != Law::DremRegularized) throw std::logic_error("dremr_step: wrong law");
  const int n = static_cast<int>(st.theta_hat.size());
  const double lambda_min_nonzero = eig.r_eff >= 1 ? eig.lambda[eig.r_eff - 1] : 0.0;
  const double gamma = gain_schedule(reg.omega, lambda_min_nonzero, n, reg.eps, st.gamma0, st.gamma1);
  st.last_gamma = gamma;
  if (tau_s * gamma * reg.omega * reg.omega > 1.0 && reg.omega != 0.0) {
    for (int i = 0; i < n; ++i) st.theta_hat[i] = reg.Upsilon[i] / reg.omega;
    st.overshoot_clamped = true;
    return;
  }
  detail::scalar_mix_update(st.theta_hat, gamma, reg.omega, reg.Upsilon, tau_s);
}

}  // namespace dremr
