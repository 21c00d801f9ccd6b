#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace metallab {

using Vec = std::vector<double>;

/// Dense row-major real matrix. Sizes here are tiny (ambient dimension is a
/// handful), so everything is by value.
class Mat {
public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(std::size_t n);
  static Mat diagonal(std::span<const double> d);
  /// Matrix whose columns are `cols` (all of equal length `rows`).
  static Mat from_columns(std::size_t rows, std::span<const Vec> cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }

  Vec column(std::size_t j) const;
  Vec row(std::size_t i) const;
  Mat transpose() const;
  bool all_finite() const;

  Mat& operator+=(const Mat& rhs);
  Mat& operator-=(const Mat& rhs);
  Mat& operator*=(double s);

  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(Mat a, double s) { return a *= s; }
  friend Mat operator*(double s, Mat a) { return a *= s; }
  friend Mat operator*(const Mat& a, const Mat& b);
  friend Vec operator*(const Mat& a, const Vec& x);
  friend bool operator==(const Mat&, const Mat&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double s, Vec a);
Vec operator-(Vec a);
/// a += s * b
void axpy(Vec& a, double s, const Vec& b);
Vec unit(std::size_t n, std::size_t i);
/// Largest absolute entry.
double max_abs(const Mat& a);
/// Largest absolute entry of a - b.
double max_abs_diff(const Mat& a, const Mat& b);

/// Orthonormal basis of a subspace of R^ambient_dim.
struct Subspace {
  std::size_t ambient_dim = 0;
  std::vector<Vec> basis;

  std::size_t rank() const { return basis.size(); }
  /// ambient_dim x rank matrix of basis columns.
  Mat matrix() const { return Mat::from_columns(ambient_dim, basis); }
};

inline constexpr double kDefaultRankTol = 1e-10;

/// Modified Gram-Schmidt with one re-orthogonalization pass. A vector is
/// dropped when its residual norm falls below tol * (largest input norm).
Subspace gram_schmidt(std::span<const Vec> vectors, double tol = kDefaultRankTol);
Subspace gram_schmidt(std::size_t ambient_dim, std::span<const Vec> vectors, double tol = kDefaultRankTol);

/// Orthogonal projection sum_i <v,b_i> b_i.
Vec project(const Vec& v, const Subspace& s);

/// Orthogonal complement, seeded deterministically from the canonical basis
/// e_0, e_1, ... in index order.
Subspace complement(const Subspace& s);

/// Cholesky solve of A x = b for symmetric positive-definite A.
/// Throws SingularMetric on asymmetry beyond 1e-12 (relative) or a
/// nonpositive pivot.
Vec solve_sym(const Mat& a, const Vec& b);

/// Inverse of a symmetric positive-definite matrix via solve_sym.
Mat inverse_sym(const Mat& a);

}  // namespace metallab
