#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dremr/linalg.hpp"

namespace dremr {

/// Runtime excitation classification parameters. mu is the eigenvalue floor,
/// window_T and k set the persistent-excitation horizon, delta_min the
/// minimal qualifying interval length, eps_bar the rank threshold.
struct ExcitationConfig {
  double mu = 1e-6;
  double window_T = 0.5;
  double k = 1.0;
  double eps_bar = 1e-10;
  double delta_min = 1e-3;

  void validate() const {
    if (mu <= 0.0 || window_T <= 0.0 || k < 1.0 || delta_min <= 0.0)
      throw std::invalid_argument("excitation config: invalid parameters");
  }
};

enum class ExcitationClass { PE, FE, SemiPE, SemiFE, None };

inline std::string to_string(ExcitationClass c) {
  switch (c) {
    case ExcitationClass::PE: return "PE";
    case ExcitationClass::FE: return "FE";
    case ExcitationClass::SemiPE: return "s-PE";
    case ExcitationClass::SemiFE: return "s-FE";
    case ExcitationClass::None: return "none";
  }
  throw std::logic_error("unknown excitation class");
}

struct Interval {
  double begin = 0.0;
  double end = 0.0;
  double length() const { return end - begin; }
};

struct ExcitationReport {
  ExcitationClass cls = ExcitationClass::None;
  bool pe = false, fe = false, s_pe = false, s_fe = false;
  int s_pe_rank = 0;
  std::vector<std::pair<double, int>> rank_trace;   // (t, count of lambda >= eps_bar)
  std::vector<Interval> qualifying_intervals;       // >= 1 eigenvalue above mu
  std::vector<Interval> full_rank_intervals;        // all eigenvalues above mu
  std::vector<double> switch_times;                 // rank-change instants
};

inline int rank_of(const EigenDecomposition& eig, double eps_bar) {
  return static_cast<int>(std::count_if(eig.lambda.begin(), eig.lambda.end(),
                                        [&](double l) { return l >= eps_bar; }));
}

namespace detail {

inline std::vector<Interval> active_intervals(const std::vector<std::pair<double, Vec>>& trace,
                                              const std::vector<char>& active, double min_length) {
  std::vector<Interval> out;
  bool open = false;
  Interval cur;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (active[i] && !open) {
      cur.begin = trace[i].first;
      open = true;
    } else if (!active[i] && open) {
      cur.end = trace[i - 1].first;
      open = false;
      if (cur.length() >= min_length) out.push_back(cur);
    }
  }
  if (open) {
    cur.end = trace.back().first;
    if (cur.length() >= min_length) out.push_back(cur);
  }
  return out;
}

}  // namespace detail

/// Classify the excitation of a regressor from the eigenvalue trajectory of
/// its extension filter. The trace holds (t, eigenvalues sorted descending).
inline ExcitationReport classify(const std::vector<std::pair<double, Vec>>& lambda_trace,
                                 const ExcitationConfig& cfg) {
  cfg.validate();
  if (lambda_trace.empty()) throw std::invalid_argument("classify: empty trace");
  const double duration = lambda_trace.back().first - lambda_trace.front().first;
  const double settle = cfg.k * cfg.window_T;
  if (duration < settle) throw std::invalid_argument("classify: trace shorter than excitation window");

  const int n = static_cast<int>(lambda_trace.front().second.size());
  ExcitationReport rep;

  std::vector<char> any_active(lambda_trace.size());
  std::vector<char> full_active(lambda_trace.size());
  int min_count_after_settle = n;
  int prev_rank = -1;
  for (std::size_t i = 0; i < lambda_trace.size(); ++i) {
    const auto& [t, lam] = lambda_trace[i];
    int above_mu = 0;
    int rank = 0;
    for (double l : lam) {
      if (l > cfg.mu) ++above_mu;
      if (l >= cfg.eps_bar) ++rank;
    }
    any_active[i] = above_mu >= 1;
    full_active[i] = above_mu == n;
    if (t >= lambda_trace.front().first + settle) min_count_after_settle = std::min(min_count_after_settle, above_mu);
    rep.rank_trace.emplace_back(t, rank);
    if (rank != prev_rank && prev_rank >= 0) rep.switch_times.push_back(t);
    prev_rank = rank;
  }

  rep.qualifying_intervals = detail::active_intervals(lambda_trace, any_active, cfg.delta_min);
  rep.full_rank_intervals = detail::active_intervals(lambda_trace, full_active, cfg.delta_min);

  rep.pe = (min_count_after_settle == n);
  rep.fe = rep.pe || !rep.full_rank_intervals.empty();
  rep.s_pe = rep.pe || (min_count_after_settle >= 1);
  rep.s_pe_rank = rep.s_pe ? min_count_after_settle : 0;
  rep.s_fe = rep.fe || rep.s_pe || !rep.qualifying_intervals.empty();

  if (rep.pe) rep.cls = ExcitationClass::PE;
  else if (rep.fe) rep.cls = ExcitationClass::FE;
  else if (rep.s_pe) rep.cls = ExcitationClass::SemiPE;
  else if (rep.s_fe) rep.cls = ExcitationClass::SemiFE;
  else rep.cls = ExcitationClass::None;
  return rep;
}

/// Nullspace-basis switch instants: times where the projector V2 V2^T jumps.
/// Projector comparison is invariant to eigenvector sign and ordering.
inline std::vector<double> nullspace_switches(const std::vector<std::pair<double, Mat>>& v2_trace,
                                              double row_tol = 1e-6) {
  std::vector<double> out;
  Mat prev_proj;
  bool have_prev = false;
  for (const auto& [t, v2] : v2_trace) {
    Mat proj = v2.cols() > 0 ? matmul(v2, transpose(v2)) : Mat(v2.rows());
    if (have_prev && inf_norm(sub(proj, prev_proj)) > 10.0 * row_tol) out.push_back(t);
    prev_proj = std::move(proj);
    have_prev = true;
  }
  return out;
}

/// Per-instant error bookkeeping: theta error, reachable-parameter error,
/// tracking error.
struct ErrorRecord {
  double t = 0.0;
  Vec tilde_theta;
  Vec tilde_Theta;
  double tilde_z = 0.0;
};

struct ContractionReport {
  double t_start = 0.0, t_end = 0.0;
  double beta1 = 0.0;  // ||tilde_theta(t_r+)|| / theta_max
  double beta = 0.0;   // e^{-0.5 gamma0 delta} + 1/beta1
  double theta_start_norm = 0.0, theta_end_norm = 0.0;
  double z_start = 0.0, z_end = 0.0;
  bool sufficient_condition_met = false;  // beta1 > 1 and beta in (0, 1)
  bool theta_contracted = false;
  bool z_contracted = false;
};

namespace detail {

inline const ErrorRecord& record_at(const std::vector<ErrorRecord>& errors, double t) {
  const ErrorRecord* best = nullptr;
  double dist = 0.0;
  for (const auto& e : errors) {
    const double d = std::abs(e.t - t);
    if (!best || d < dist) {
      best = &e;
      dist = d;
    }
  }
  if (!best) throw std::invalid_argument("contraction_check: empty error series");
  return *best;
}

}  // namespace detail

inline ContractionReport contraction_check(const std::vector<ErrorRecord>& errors, double t_start, double t_end,
                                           double gamma0, double theta_max) {
  if (errors.empty()) throw std::invalid_argument("contraction_check: empty error series");
  if (errors.front().t > t_start || errors.back().t < t_end)
    throw std::invalid_argument("contraction_check: series does not cover the interval");

  const ErrorRecord& r0 = detail::record_at(errors, t_start);
  const ErrorRecord& r1 = detail::record_at(errors, t_end);

  ContractionReport rep;
  rep.t_start = r0.t;
  rep.t_end = r1.t;
  rep.theta_start_norm = norm2(r0.tilde_theta);
  rep.theta_end_norm = norm2(r1.tilde_theta);
  rep.z_start = std::abs(r0.tilde_z);
  rep.z_end = std::abs(r1.tilde_z);
  rep.beta1 = rep.theta_start_norm / theta_max;
  const double delta = r1.t - r0.t;
  rep.beta = std::exp(-0.5 * gamma0 * delta) + 1.0 / rep.beta1;
  rep.sufficient_condition_met = rep.beta1 > 1.0 && rep.beta > 0.0 && rep.beta < 1.0;
  // Zero initial error contracts trivially; beta is infinite there and the
  // product would be NaN.
  rep.theta_contracted = rep.theta_start_norm == 0.0 ? rep.theta_end_norm == 0.0
                                                     : rep.theta_end_norm <= rep.beta * rep.theta_start_norm;
  rep.z_contracted = rep.z_start == 0.0 ? rep.z_end == 0.0 : rep.z_end <= rep.beta * rep.z_start;
  return rep;
}

struct MonotonicityViolation {
  int index = 0;  // zero-based component
  double t = 0.0;
  double increase = 0.0;
};

struct MonotonicityReport {
  std::vector<MonotonicityViolation> violations;
  bool pass() const { return violations.empty(); }
};

/// Each |tilde_Theta_i| must be non-increasing between consecutive records,
/// except across declared switch times where jumps are allowed.
inline MonotonicityReport monotonicity_check(const std::vector<std::pair<double, Vec>>& abs_error_trace,
                                             const std::vector<double>& switch_times, double tol = 1e-9) {
  MonotonicityReport rep;
  std::size_t sw = 0;
  for (std::size_t i = 1; i < abs_error_trace.size(); ++i) {
    const auto& [t_prev, prev] = abs_error_trace[i - 1];
    const auto& [t_cur, cur] = abs_error_trace[i];
    bool crosses_switch = false;
    while (sw < switch_times.size() && switch_times[sw] <= t_cur) {
      if (switch_times[sw] > t_prev) crosses_switch = true;
      ++sw;
    }
    if (crosses_switch) continue;
    for (std::size_t j = 0; j < cur.size(); ++j) {
      if (cur[j] > prev[j] + tol)
        rep.violations.push_back({static_cast<int>(j), t_cur, cur[j] - prev[j]});
    }
  }
  return rep;
}

struct EnvelopeReport {
  double a_max = 0.0;
  bool pass = true;
};

/// Inter-switch exponential envelope: within each window,
/// ||tilde_Theta(t)|| <= A e^{-gamma0 (t - t0)} ||tilde_Theta(t0)||.
/// Records whose error has already reached floor_abs are excluded; the
/// fixed-step integration residual floors the error at a small nonzero value.
inline EnvelopeReport envelope_check(const std::vector<std::pair<double, double>>& norm_trace,
                                     const std::vector<Interval>& windows, double gamma0,
                                     double a_limit = 2.0, double floor_abs = 1e-3) {
  EnvelopeReport rep;
  for (const auto& w : windows) {
    bool started = false;
    double t0 = 0.0, n0 = 0.0;
    for (const auto& [t, nrm] : norm_trace) {
      if (t < w.begin || t > w.end) continue;
      if (!started) {
        t0 = t;
        n0 = nrm;
        started = true;
        continue;
      }
      if (nrm <= floor_abs || n0 <= floor_abs) continue;
      const double bound = std::exp(-gamma0 * (t - t0)) * n0;
      if (bound > 0.0) rep.a_max = std::max(rep.a_max, nrm / bound);
    }
  }
  rep.pass = rep.a_max <= a_limit;
  return rep;
}

}  // namespace dremr
