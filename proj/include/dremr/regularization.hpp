#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dremr/linalg.hpp"

namespace dremr {

/// Result of eigenvalue substitution and mixing: the regularized regressor
/// Phi with virtual eigenvalues lambda_bar, its scalar regressor
/// omega = det(Phi), the mixed regressand Upsilon = adj(Phi)*y, and the
/// nullspace basis V2 (columns of V with eigenvalue below eps_bar).
struct RegularizedRegression {
  Vec lambda_bar;
  Vec xi;  // lambda_bar - lambda
  Mat Phi;
  double omega = 0.0;
  Vec Upsilon;
  Mat V2;
  double eps = 0.0;
  double eps_bar = 0.0;
};

/// Per-eigenvalue substitution rule: keep lambda_i when lambda_i >= eps_bar,
/// substitute eps otherwise. When every eigenvalue was substituted the whole
/// diagonal collapses to zero instead (a genuine eigenvalue equal to eps
/// alongside substituted ones must not trigger the zero branch).
inline std::pair<Vec, Vec> regularize(const EigenDecomposition& eig, double eps, double eps_bar) {
  if (eps <= 0.0) throw std::invalid_argument("regularize: eps must be positive");
  if (eps_bar < 0.0) throw std::invalid_argument("regularize: eps_bar must be non-negative");
  const std::size_t n = eig.lambda.size();
  Vec lambda_bar(n);
  bool all_substituted = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (eig.lambda[i] >= eps_bar) {
      lambda_bar[i] = eig.lambda[i];
      all_substituted = false;
    } else {
      lambda_bar[i] = eps;
    }
  }
  if (all_substituted) lambda_bar.assign(n, 0.0);
  Vec xi(n);
  for (std::size_t i = 0; i < n; ++i) xi[i] = lambda_bar[i] - eig.lambda[i];
  return {lambda_bar, xi};
}

inline RegularizedRegression mix(const EigenDecomposition& eig, const Vec& lambda_bar, const Vec& y,
                                 double eps, double eps_bar) {
  const int n = eig.V.n();
  if (static_cast<int>(lambda_bar.size()) != n || static_cast<int>(y.size()) != n)
    throw std::invalid_argument("mix: dimension mismatch");

  RegularizedRegression reg;
  reg.lambda_bar = lambda_bar;
  reg.xi.resize(n);
  for (int i = 0; i < n; ++i) reg.xi[i] = lambda_bar[i] - eig.lambda[i];
  reg.eps = eps;
  reg.eps_bar = eps_bar;

  const int rbar = n - eig.r_eff;
  reg.V2 = Mat(n, rbar);
  int col = 0;
  for (int i = 0; i < n; ++i) {
    if (eig.lambda[i] < eps_bar) {
      for (int row = 0; row < n; ++row) reg.V2(row, col) = eig.V(row, i);
      ++col;
    }
  }

  reg.Phi = recompose(eig.V, lambda_bar);
  double omega = 1.0;
  for (double l : lambda_bar) omega *= l;
  reg.omega = omega;
  if (eig.r_eff == 0) {
    reg.omega = 0.0;
    reg.Upsilon.assign(n, 0.0);
  } else {
    reg.Upsilon = matvec(adjugate_from_eigen(eig.V, lambda_bar), y);
  }
  return reg;
}

/// Ground-truth diagnostics: the nullspace projection d = V2 V2^T theta, the
/// reachable parameters Theta = theta - d, and the identifiable index set
/// (zero rows of V2).
struct OracleDecomposition {
  Vec d;
  Vec Theta;
  std::vector<int> identifiable;  // zero-based indices
};

inline OracleDecomposition oracle_decompose(const EigenDecomposition& eig, const Vec& theta_true,
                                            double row_tol, double eps_bar) {
  const int n = eig.V.n();
  if (static_cast<int>(theta_true.size()) != n) throw std::invalid_argument("oracle_decompose: dimension mismatch");

  OracleDecomposition od;
  od.d.assign(n, 0.0);
  od.Theta.resize(n);
  std::vector<double> row_max(n, 0.0);
  for (int c = 0; c < n; ++c) {
    if (eig.lambda[c] >= eps_bar) continue;
    double proj = 0.0;
    for (int i = 0; i < n; ++i) proj += eig.V(i, c) * theta_true[i];
    for (int i = 0; i < n; ++i) {
      od.d[i] += eig.V(i, c) * proj;
      row_max[i] = std::max(row_max[i], std::abs(eig.V(i, c)));
    }
  }
  for (int i = 0; i < n; ++i) {
    od.Theta[i] = theta_true[i] - od.d[i];
    if (row_max[i] <= row_tol) od.identifiable.push_back(i);
  }
  return od;
}

inline OracleDecomposition oracle_decompose(const Mat& v2, const Vec& theta_true, double row_tol) {
  const int n = v2.rows();
  OracleDecomposition od;
  od.d.assign(n, 0.0);
  od.Theta.resize(n);
  for (int c = 0; c < v2.cols(); ++c) {
    double proj = 0.0;
    for (int i = 0; i < n; ++i) proj += v2(i, c) * theta_true[i];
    for (int i = 0; i < n; ++i) od.d[i] += v2(i, c) * proj;
  }
  for (int i = 0; i < n; ++i) {
    double row_max = 0.0;
    for (int c = 0; c < v2.cols(); ++c) row_max = std::max(row_max, std::abs(v2(i, c)));
    od.Theta[i] = theta_true[i] - od.d[i];
    if (row_max <= row_tol) od.identifiable.push_back(i);
  }
  return od;
}

}  // namespace dremr
