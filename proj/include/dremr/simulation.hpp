#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dremr/diagnostics.hpp"
#include "dremr/estimators.hpp"
#include "dremr/extension.hpp"
#include "dremr/linalg.hpp"
#include "dremr/regularization.hpp"
#include "dremr/signals.hpp"

namespace dremr {

struct RunConfig {
  ScenarioSpec scenario;
  bool run_gradient = true;
  bool run_drem = true;
  bool run_dremr = true;
  double tau_s = 1e-4;
  double l = 100.0;
  double eps = 0.4;
  double eps_bar = 1e-10;
  double gamma0 = 5.0;
  double gamma1 = 1.0;
  double Gamma_scalar = 1.0;  // gradient gain Gamma = Gamma_scalar * I
  Vec theta0;
  int log_stride = 10;
  double row_tol = 1e-6;

  void validate() const {
    scenario.validate();
    if (tau_s <= 0.0) throw std::invalid_argument("config: tau_s must be positive");
    if (l <= 0.0 || l * tau_s >= 1.0) throw std::invalid_argument("config: need 0 < l*tau_s < 1");
    if (eps <= 0.0 || eps_bar < 0.0) throw std::invalid_argument("config: invalid eps/eps_bar");
    if (gamma0 <= 0.0 || gamma1 <= 0.0 || Gamma_scalar <= 0.0)
      throw std::invalid_argument("config: gains must be positive");
    if (static_cast<int>(theta0.size()) != scenario.n) throw std::invalid_argument("config: theta0 size mismatch");
    if (log_stride < 1) throw std::invalid_argument("config: log_stride must be >= 1");
  }
};

/// One logged instant. Everything the CSV schema needs plus in-memory-only
/// diagnostics (V2, the baseline estimates) that the analysis checks use.
struct TraceRecord {
  double t = 0.0;
  Vec phibar;
  double z = 0.0;
  double omega = 0.0;          // regularized scalar regressor det(Phi)
  double omega_raw = 0.0;      // det(phi), plain-mixing scalar regressor
  double gamma = 0.0;          // switched gain at this instant
  int rank = 0;
  double tilde_z_grad = 0.0;
  double tilde_z_drem = 0.0;
  double tilde_z_dremr = 0.0;
  Vec lambda;
  Vec lambda_bar;
  Vec theta_hat_grad;
  Vec theta_hat_drem;
  Vec theta_hat_dremr;
  Vec tilde_theta_dremr;
  Vec tilde_Theta;
  Vec d;
  std::vector<int> identifiable;
  Mat V2;
  Mat Phi;
  Vec Upsilon;
};

struct TraceLog {
  int n = 0;
  Vec theta_true;
  std::vector<TraceRecord> records;
};

inline TraceLog run(const RunConfig& cfg) {
  cfg.validate();
  const int n = cfg.scenario.n;
  const Vec& theta = cfg.scenario.theta_true;
  const long steps = std::lround(cfg.scenario.horizon / cfg.tau_s);

  ExtensionState ext = make_extension(n, cfg.l);
  EstimatorState grad = make_gradient(cfg.theta0, [&] {
    Mat g = Mat::identity(n);
    for (int i = 0; i < n; ++i) g(i, i) = cfg.Gamma_scalar;
    return g;
  }());
  EstimatorState drem = make_drem(cfg.theta0, cfg.gamma0, cfg.gamma1);
  EstimatorState dremr = make_dremr(cfg.theta0, cfg.gamma0, cfg.gamma1);

  TraceLog log;
  log.n = n;
  log.theta_true = theta;
  log.records.reserve(static_cast<std::size_t>(steps / cfg.log_stride) + 2);

  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * cfg.tau_s;
    RegressorSample s = sample(cfg.scenario, std::min(t, cfg.scenario.horizon));
    if (cfg.scenario.normalize) s = normalize(s);

    const EigenDecomposition eig = eig_sym(ext.phi, cfg.eps_bar);
    const auto [lambda_bar, xi] = regularize(eig, cfg.eps, cfg.eps_bar);
    const RegularizedRegression reg = mix(eig, lambda_bar, ext.y, cfg.eps, cfg.eps_bar);
    const double omega_raw = determinant(ext.phi);

    if (k % cfg.log_stride == 0 || k == steps) {
      TraceRecord r;
      r.t = t;
      r.phibar = s.phibar;
      r.z = s.z;
      r.omega = reg.omega;
      r.omega_raw = omega_raw;
      const double lmin = eig.r_eff >= 1 ? eig.lambda[eig.r_eff - 1] : 0.0;
      r.gamma = gain_schedule(reg.omega, lmin, n, cfg.eps, cfg.gamma0, cfg.gamma1);
      r.rank = eig.r_eff;
      r.tilde_z_grad = dot(s.phibar, grad.theta_hat) - s.z;
      r.tilde_z_drem = dot(s.phibar, drem.theta_hat) - s.z;
      r.tilde_z_dremr = dot(s.phibar, dremr.theta_hat) - s.z;
      r.lambda = eig.lambda;
      r.lambda_bar = lambda_bar;
      r.theta_hat_grad = grad.theta_hat;
      r.theta_hat_drem = drem.theta_hat;
      r.theta_hat_dremr = dremr.theta_hat;
      const OracleDecomposition od = oracle_decompose(reg.V2, theta, cfg.row_tol);
      r.d = od.d;
      r.identifiable = od.identifiable;
      r.tilde_theta_dremr.resize(n);
      r.tilde_Theta.resize(n);
      for (int i = 0; i < n; ++i) {
        r.tilde_theta_dremr[i] = dremr.theta_hat[i] - theta[i];
        r.tilde_Theta[i] = dremr.theta_hat[i] - od.Theta[i];
      }
      r.V2 = reg.V2;
      r.Phi = reg.Phi;
      r.Upsilon = reg.Upsilon;
      log.records.push_back(std::move(r));
    }

    if (k == steps) break;

    if (cfg.run_gradient) gradient_step(grad, s, cfg.tau_s);
    if (cfg.run_drem) {
      const double lmin_raw = eig.r_eff >= 1 ? eig.lambda[eig.r_eff - 1] : 0.0;
      const Vec y_mixed = matvec(adjugate_from_eigen(eig.V, eig.lambda), ext.y);
      drem_step(drem, omega_raw, y_mixed, cfg.tau_s, DremGainMode::Normalized, lmin_raw, cfg.eps);
    }
    if (cfg.run_dremr) dremr_step(dremr, reg, eig, cfg.tau_s);
    ext.step(s, cfg.tau_s);
  }
  return log;
}

// ---- preset run configurations ----------------------------------------------

inline RunConfig preset_config(const std::string& scenario_name, const std::string& theta0_variant = "zero") {
  RunConfig cfg;
  cfg.scenario = preset(scenario_name);
  cfg.Gamma_scalar = (scenario_name == "exp-a") ? 5.0 : 1.0;
  if (theta0_variant == "zero") cfg.theta0 = Vec(cfg.scenario.n, 0.0);
  else if (theta0_variant == "mid") cfg.theta0 = Vec{0.0, 5.0, 0.0};
  else if (theta0_variant == "far") cfg.theta0 = Vec{0.0, -10.0, 14.0};
  else throw std::invalid_argument("unknown theta0 variant: " + theta0_variant);
  return cfg;
}

// ---- CSV emission / parsing --------------------------------------------------

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::vector<std::string> csv_header(int n) {
  std::vector<std::string> h{"t", "z", "omega", "gamma", "rank", "tilde_z_grad", "tilde_z_drem", "tilde_z_dremr"};
  auto block = [&](const std::string& base) {
    for (int i = 1; i <= n; ++i) h.push_back(base + "_" + std::to_string(i));
  };
  block("phibar");
  block("lambda");
  block("thetahat_dremr");
  block("tilde_theta_dremr");
  block("tilde_Theta");
  block("d");
  h.push_back("identifiable_mask");
  return h;
}

inline void emit_csv(const TraceLog& log, std::ostream& out) {
  const int n = log.n;
  const auto header = csv_header(n);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& r : log.records) {
    out << detail::fmt17(r.t) << ',' << detail::fmt17(r.z) << ',' << detail::fmt17(r.omega) << ','
        << detail::fmt17(r.gamma) << ',' << r.rank << ',' << detail::fmt17(r.tilde_z_grad) << ','
        << detail::fmt17(r.tilde_z_drem) << ',' << detail::fmt17(r.tilde_z_dremr);
    auto block = [&](const Vec& v) {
      for (int i = 0; i < n; ++i) out << ',' << detail::fmt17(v[i]);
    };
    block(r.phibar);
    block(r.lambda);
    block(r.theta_hat_dremr);
    block(r.tilde_theta_dremr);
    block(r.tilde_Theta);
    block(r.d);
    std::string mask(n, '0');
    for (int i : r.identifiable) mask[i] = '1';
    out << ',' << mask << "\n";
  }
}

inline void emit_csv(const TraceLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file for writing: " + path);
  emit_csv(log, out);
  out.flush();
  if (!out) throw std::runtime_error("write failure: " + path);
}

/// Parsed CSV trace: column-name lookup plus numeric rows. The mask column is
/// stored as a string per row.
struct ParsedTrace {
  std::vector<std::string> header;
  std::vector<Vec> rows;  // numeric columns only (mask excluded)
  std::vector<std::string> masks;
  int n = 0;

  int col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw std::invalid_argument("trace: missing column " + name);
  }
  double at(std::size_t row, const std::string& name) const { return rows[row][col(name)]; }
  Vec vec_at(std::size_t row, const std::string& base) const {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = rows[row][col(base + "_" + std::to_string(i + 1))];
    return v;
  }
};

inline ParsedTrace parse_csv(std::istream& in) {
  ParsedTrace tr;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace: empty file");
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) tr.header.push_back(cell);
  if (tr.header.empty() || tr.header.back() != "identifiable_mask")
    throw std::runtime_error("trace: unexpected header");
  int n = 0;
  for (const auto& h : tr.header)
    if (h.rfind("phibar_", 0) == 0) ++n;
  tr.n = n;
  tr.header.pop_back();  // numeric columns only; mask handled separately
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    Vec row;
    row.reserve(tr.header.size());
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != tr.header.size() + 1) throw std::runtime_error("trace: ragged row");
    for (std::size_t i = 0; i < tr.header.size(); ++i) row.push_back(std::stod(cells[i]));
    tr.rows.push_back(std::move(row));
    tr.masks.push_back(cells.back());
  }
  return tr;
}

inline ParsedTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return parse_csv(in);
}

}  // namespace dremr
