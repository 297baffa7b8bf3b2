#pragma once

#include <cmath>
#include <stdexcept>

#include "dremr/linalg.hpp"
#include "dremr/signals.hpp"

namespace dremr {

/// Kreisselmeyer extension filter state. Forward-Euler integration of
///   phi' = -l*phi + phibar*phibar^T,   y' = -l*y + phibar*z,
/// from zero initial conditions. phi stays symmetric (re-symmetrized each
/// step) and PSD as long as l*tau_s < 1.
struct ExtensionState {
  Mat phi;
  Vec y;
  double l = 0.0;
  double t = 0.0;

  void step(const RegressorSample& s, double tau_s) {
    if (l * tau_s >= 1.0) throw std::invalid_argument("extension: stability violation (l*tau_s >= 1)");
    if (std::abs(s.t - t) > 1e-9 * std::max(1.0, std::abs(t)))
      throw std::invalid_argument("extension: sample time inconsistent with filter time");
    const int n = phi.n();
    const double decay = 1.0 - l * tau_s;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double v = decay * (0.5 * (phi(i, j) + phi(j, i))) + tau_s * s.phibar[i] * s.phibar[j];
        phi(i, j) = v;
        phi(j, i) = v;
      }
      y[i] = decay * y[i] + tau_s * s.phibar[i] * s.z;
    }
    t += tau_s;
  }

  /// ||y - phi*theta||_inf; zero up to roundoff because y and phi*theta obey
  /// the same discrete recurrence from zero initial state.
  double consistency_residual(const Vec& theta_true) const {
    Vec r = matvec(phi, theta_true);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
    return inf_norm(r);
  }
};

inline ExtensionState make_extension(int n, double l) {
  if (l <= 0.0) throw std::invalid_argument("extension: filter gain must be positive");
  if (n <= 0) throw std::invalid_argument("extension: dimension must be positive");
  ExtensionState st;
  st.phi = Mat(n);
  st.y.assign(n, 0.0);
  st.l = l;
  st.t = 0.0;
  return st;
}

}  // namespace dremr
