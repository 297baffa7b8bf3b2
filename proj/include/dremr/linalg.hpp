#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace dremr {

using Vec = std::vector<double>;

/// Dense row-major matrix. Sized for small problems (n <= 8); everything is
/// by value, no views.
class Mat {
public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative dimension");
  }
  explicit Mat(int n) : Mat(n, n) {}

  static Mat identity(int n) {
    Mat m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  int n() const {
    if (!square()) throw std::logic_error("Mat: not square");
    return rows_;
  }

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  bool all_finite() const {
    return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const Mat& x, const Mat& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

/// Entrywise max-abs norm. All tolerance checks in this library use it.
inline double inf_norm(const Mat& m) {
  double v = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) v = std::max(v, std::abs(m(i, j)));
  return v;
}

inline double inf_norm(const Vec& v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

inline double norm2(const Vec& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

inline double dot(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

inline Mat transpose(const Mat& m) {
  Mat r(m.cols(), m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(j, i) = m(i, j);
  return r;
}

inline Mat matmul(const Mat& x, const Mat& y) {
  if (x.cols() != y.rows()) throw std::invalid_argument("matmul: dimension mismatch");
  Mat r(x.rows(), y.cols());
  for (int i = 0; i < x.rows(); ++i)
    for (int k = 0; k < x.cols(); ++k) {
      const double xik = x(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < y.cols(); ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

inline Vec matvec(const Mat& m, const Vec& v) {
  if (m.cols() != static_cast<int>(v.size())) throw std::invalid_argument("matvec: dimension mismatch");
  Vec r(m.rows(), 0.0);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r[i] += m(i, j) * v[j];
  return r;
}

inline Mat sub(const Mat& x, const Mat& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw std::invalid_argument("sub: dimension mismatch");
  Mat r(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) r(i, j) = x(i, j) - y(i, j);
  return r;
}

inline Mat outer(const Vec& x, const Vec& y) {
  Mat r(static_cast<int>(x.size()), static_cast<int>(y.size()));
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) r(i, j) = x[i] * y[j];
  return r;
}

inline double orthogonality_defect(const Mat& v) {
  return inf_norm(sub(matmul(transpose(v), v), Mat::identity(v.cols())));
}

/// Symmetric eigendecomposition A = V diag(lambda) V^T with eigenvalues
/// sorted descending and a deterministic sign/order convention. r_eff counts
/// eigenvalues at or above eps_bar.
struct EigenDecomposition {
  Mat V;
  Vec lambda;
  int r_eff = 0;
};

namespace detail {

inline void jacobi_rotate(Mat& d, Mat& v, int p, int q) {
  const double apq = d(p, q);
  if (apq == 0.0) return;
  const double theta = (d(q, q) - d(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);
  const int n = d.n();

  const double app = d(p, p);
  const double aqq = d(q, q);
  d(p, p) = app - t * apq;
  d(q, q) = aqq + t * apq;
  d(p, q) = 0.0;
  d(q, p) = 0.0;
  for (int k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = d(k, p);
    const double akq = d(k, q);
    d(k, p) = akp - s * (akq + tau * akp);
    d(p, k) = d(k, p);
    d(k, q) = akq + s * (akp - tau * akq);
    d(q, k) = d(k, q);
  }
  for (int k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = vkp - s * (vkq + tau * vkp);
    v(k, q) = vkq + s * (vkp - tau * vkq);
  }
}

inline double offdiag_frobenius(const Mat& d) {
  double sum = 0.0;
  for (int i = 0; i < d.n(); ++i)
    for (int j = 0; j < d.n(); ++j)
      if (i != j) sum += d(i, j) * d(i, j);
  return std::sqrt(sum);
}

inline double frobenius(const Mat& d) {
  double sum = 0.0;
  for (int i = 0; i < d.rows(); ++i)
    for (int j = 0; j < d.cols(); ++j) sum += d(i, j) * d(i, j);
  return std::sqrt(sum);
}

// Column sign convention: largest-magnitude component positive, ties broken
// by lowest index.
inline void fix_column_sign(Mat& v, int col) {
  int best = 0;
  double mag = -1.0;
  for (int i = 0; i < v.rows(); ++i) {
    const double m = std::abs(v(i, col));
    if (m > mag) {
      mag = m;
      best = i;
    }
  }
  if (v(best, col) < 0.0) {
    for (int i = 0; i < v.rows(); ++i) v(i, col) = -v(i, col);
  }
}

}  // namespace detail

inline EigenDecomposition eig_sym(const Mat& a, double eps_bar) {
  const int n = a.n();
  if (!a.all_finite()) throw std::invalid_argument("eig_sym: non-finite entries");
  const double scale = std::max(1.0, inf_norm(a));
  double asym = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) asym = std::max(asym, std::abs(a(i, j) - a(j, i)));
  if (asym > 1e-9 * scale) throw std::invalid_argument("eig_sym: symmetry violation");

  Mat d(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = 0.5 * (a(i, j) + a(j, i));
  Mat v = Mat::identity(n);

  const double norm_f = detail::frobenius(d);
  for (int sweep = 0; sweep < 100; ++sweep) {
    if (detail::offdiag_frobenius(d) <= 1e-14 * norm_f) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) detail::jacobi_rotate(d, v, p, q);
  }

  for (int c = 0; c < n; ++c) detail::fix_column_sign(v, c);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (d(i, i) != d(j, j)) return d(i, i) > d(j, j);
    // Equal eigenvalues: order by the sign-fixed eigenvector's first
    // differing component.
    for (int k = 0; k < n; ++k) {
      if (v(k, i) != v(k, j)) return v(k, i) > v(k, j);
    }
    return false;
  });

  EigenDecomposition e;
  e.V = Mat(n);
  e.lambda.resize(n);
  for (int c = 0; c < n; ++c) {
    e.lambda[c] = d(order[c], order[c]);
    for (int i = 0; i < n; ++i) e.V(i, c) = v(i, order[c]);
  }
  e.r_eff = static_cast<int>(std::count_if(e.lambda.begin(), e.lambda.end(),
                                           [&](double l) { return l >= eps_bar; }));
  return e;
}

namespace detail {

inline double det2(double a, double b, double c, double d) { return a * d - b * c; }

inline double det_elimination(Mat m) {
  const int n = m.n();
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int i = col + 1; i < n; ++i)
      if (std::abs(m(i, col)) > std::abs(m(pivot, col))) pivot = i;
    if (m(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(m(pivot, j), m(col, j));
      det = -det;
    }
    det *= m(col, col);
    for (int i = col + 1; i < n; ++i) {
      const double f = m(i, col) / m(col, col);
      for (int j = col; j < n; ++j) m(i, j) -= f * m(col, j);
    }
  }
  return det;
}

inline Mat drop_row_col(const Mat& m, int row, int col) {
  Mat r(m.n() - 1);
  int ri = 0;
  for (int i = 0; i < m.n(); ++i) {
    if (i == row) continue;
    int rj = 0;
    for (int j = 0; j < m.n(); ++j) {
      if (j == col) continue;
      r(ri, rj) = m(i, j);
      ++rj;
    }
    ++ri;
  }
  return r;
}

}  // namespace detail

inline double determinant(const Mat& a) {
  const int n = a.n();
  if (!a.all_finite()) throw std::invalid_argument("determinant: non-finite entries");
  switch (n) {
    case 0:
      return 1.0;
    case 1:
      return a(0, 0);
    case 2:
      return detail::det2(a(0, 0), a(0, 1), a(1, 0), a(1, 1));
    case 3:
      return a(0, 0) * detail::det2(a(1, 1), a(1, 2), a(2, 1), a(2, 2)) -
             a(0, 1) * detail::det2(a(1, 0), a(1, 2), a(2, 0), a(2, 2)) +
             a(0, 2) * detail::det2(a(1, 0), a(1, 1), a(2, 0), a(2, 1));
    default:
      return detail::det_elimination(a);
  }
}

/// Recompose V diag(lambda) V^T. The result is exactly symmetric.
inline Mat recompose(const Mat& v, const Vec& lambda) {
  if (v.n() != static_cast<int>(lambda.size())) throw std::invalid_argument("recompose: dimension mismatch");
  if (orthogonality_defect(v) > 1e-8) throw std::invalid_argument("recompose: V is not orthogonal");
  const int n = v.n();
  Mat r(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += lambda[k] * v(i, k) * v(j, k);
      r(i, j) = s;
      r(j, i) = s;
    }
  return r;
}

/// adj{A} for A = V diag(lambda) V^T: V diag(prod_{j != i} lambda_j) V^T.
/// Avoids cancellation near rank boundaries when the eigenstructure is known.
inline Mat adjugate_from_eigen(const Mat& v, const Vec& lambda) {
  const int n = static_cast<int>(lambda.size());
  Vec comp(n, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) comp[i] *= lambda[j];
  return recompose(v, comp);
}

inline Mat adjugate(const Mat& a) {
  const int n = a.n();
  if (!a.all_finite()) throw std::invalid_argument("adjugate: non-finite entries");
  if (n == 1) {
    Mat r(1);
    r(0, 0) = 1.0;
    return r;
  }
  if (n <= 4) {
    // adj(A)_{ji} = (-1)^{i+j} det(minor_{ij})
    Mat r(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double minor = determinant(detail::drop_row_col(a, i, j));
        r(j, i) = (((i + j) % 2) == 0 ? minor : -minor);
      }
    return r;
  }
  const auto e = eig_sym(a, 0.0);
  return adjugate_from_eigen(e.V, e.lambda);
}

}  // namespace dremr
