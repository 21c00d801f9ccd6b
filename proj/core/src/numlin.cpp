#include "metallab/numlin.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "metallab/errors.hpp"

namespace metallab {

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    assert(r.size() == cols_);
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diagonal(std::span<const double> d) {
  Mat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Mat Mat::from_columns(std::size_t rows, std::span<const Vec> cols) {
  Mat m(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    assert(cols[j].size() == rows);
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
  }
  return m;
}

Vec Mat::column(std::size_t j) const {
  Vec c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Vec Mat::row(std::size_t i) const {
  return Vec(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
             data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Mat::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Mat& Mat::operator+=(const Mat& rhs) {
  assert(rows_ == rhs.rows_ && cols_ == rhs.cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

Mat& Mat::operator-=(const Mat& rhs) {
  assert(rows_ == rhs.rows_ && cols_ == rhs.cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
  assert(a.cols_ == b.rows_);
  Mat c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vec operator*(const Mat& a, const Vec& x) {
  assert(a.cols_ == x.size());
  Vec y(a.rows_, 0.0);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec operator+(Vec a, const Vec& b) {
  axpy(a, 1.0, b);
  return a;
}

Vec operator-(Vec a, const Vec& b) {
  axpy(a, -1.0, b);
  return a;
}

Vec operator*(double s, Vec a) {
  for (auto& v : a) v *= s;
  return a;
}

Vec operator-(Vec a) { return -1.0 * std::move(a); }

void axpy(Vec& a, double s, const Vec& b) {
  assert(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
}

Vec unit(std::size_t n, std::size_t i) {
  Vec e(n, 0.0);
  e[i] = 1.0;
  return e;
}

double max_abs(const Mat& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::fabs(v));
  return m;
}

double max_abs_diff(const Mat& a, const Mat& b) { return max_abs(a - b); }

Subspace gram_schmidt(std::span<const Vec> vectors, double tol) {
  return gram_schmidt(vectors.empty() ? 0 : vectors.front().size(), vectors, tol);
}

Subspace gram_schmidt(std::size_t ambient_dim, std::span<const Vec> vectors, double tol) {
  Subspace s{ambient_dim, {}};
  double scale = 0.0;
  for (const auto& v : vectors) scale = std::max(scale, norm(v));
  if (scale == 0.0) return s;
  const double drop = tol * scale;
  for (const auto& v : vectors) {
    assert(v.size() == ambient_dim);
    Vec r = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : s.basis) axpy(r, -dot(r, b), b);
    }
    const double n = norm(r);
    if (n < drop) continue;
    s.basis.push_back((1.0 / n) * std::move(r));
    if (s.basis.size() == ambient_dim) break;
  }
  return s;
}

Vec project(const Vec& v, const Subspace& s) {
  Vec out(s.ambient_dim, 0.0);
  for (const auto& b : s.basis) axpy(out, dot(v, b), b);
  return out;
}

Subspace complement(const Subspace& s) {
  std::vector<Vec> seeds = s.basis;
  for (std::size_t i = 0; i < s.ambient_dim; ++i) seeds.push_back(unit(s.ambient_dim, i));
  // Every seed has norm 1, so the relative drop threshold is absolute here.
  Subspace full = gram_schmidt(s.ambient_dim, seeds, 1e-8);
  Subspace out{s.ambient_dim, {}};
  out.basis.assign(full.basis.begin() + static_cast<std::ptrdiff_t>(s.rank()), full.basis.end());
  return out;
}

namespace {

// Lower-triangular Cholesky factor, row-major.
Mat cholesky(const Mat& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw SingularMetric("metric is not square");
  const double scale = std::max(max_abs(a), 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::fabs(a(i, j) - a(j, i)) > 1e-12 * scale) throw SingularMetric("metric is not symmetric");
  Mat l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 1e-14 * scale)) throw SingularMetric("metric is not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Vec cholesky_solve(const Mat& l, const Vec& b) {
  const std::size_t n = l.rows();
  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  Vec x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

}  // namespace

Vec solve_sym(const Mat& a, const Vec& b) {
  assert(a.rows() == b.size());
  return cholesky_solve(cholesky(a), b);
}

Mat inverse_sym(const Mat& a) {
  const Mat l = cholesky(a);
  const std::size_t n = a.rows();
  Mat inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec col = cholesky_solve(l, unit(n, j));
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  // Exactly symmetric.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = v;
      inv(j, i) = v;
    }
  return inv;
}

}  // namespace metallab
