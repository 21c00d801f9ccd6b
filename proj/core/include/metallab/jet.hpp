#pragma once

#include <cstddef>
#include <vector>

namespace metallab {

/// Second-order forward jet: value, gradient and Hessian of a scalar
/// function with respect to `size()` active variables.
///
/// The Hessian is stored row-major and every operation writes both (i,j)
/// and (j,i) from the same computed number, so it stays exactly symmetric.
class Jet2 {
public:
  Jet2() = default;
  explicit Jet2(std::size_t n, double value = 0.0);

  static Jet2 constant(std::size_t n, double value) { return Jet2(n, value); }
  static Jet2 variable(std::size_t n, std::size_t index, double value);

  std::size_t size() const { return grad_.size(); }

  double value() const { return value_; }
  double& value() { return value_; }

  const std::vector<double>& gradient() const { return grad_; }
  double grad(std::size_t i) const { return grad_[i]; }
  double& grad(std::size_t i) { return grad_[i]; }

  const std::vector<double>& hessian() const { return hess_; }
  double hess(std::size_t i, std::size_t j) const { return hess_[i * size() + j]; }

  /// True when gradient and Hessian are identically zero.
  bool is_constant() const;

  /// Chain rule for a scalar function f applied to this jet, given
  /// f(x), f'(x), f''(x) at x = value().
  Jet2 compose(double f, double df, double d2f) const;

  Jet2& operator+=(const Jet2& rhs);
  Jet2& operator-=(const Jet2& rhs);
  Jet2& operator*=(double s);

  friend Jet2 operator+(Jet2 lhs, const Jet2& rhs) { return lhs += rhs; }
  friend Jet2 operator-(Jet2 lhs, const Jet2& rhs) { return lhs -= rhs; }
  friend Jet2 operator*(const Jet2& a, const Jet2& b);
  friend Jet2 operator*(Jet2 a, double s) { return a *= s; }
  friend Jet2 operator*(double s, Jet2 a) { return a *= s; }
  friend Jet2 operator-(Jet2 a);

  friend bool operator==(const Jet2&, const Jet2&) = default;

private:
  void set_hess(std::size_t i, std::size_t j, double v) {
    hess_[i * size() + j] = v;
    hess_[j * size() + i] = v;
  }

  double value_ = 0.0;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

/// Multiplicative inverse. The caller guarantees value() != 0.
Jet2 reciprocal(const Jet2& a);

/// a^n for integer n by binary powering at the jet level (n < 0 goes
/// through reciprocal). The caller guarantees a.value() != 0 when n < 0.
Jet2 integer_power(const Jet2& a, long long n);

}  // namespace metallab
