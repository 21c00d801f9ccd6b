#include "metallab/jet.hpp"

#include <algorithm>
#include <cstdlib>

namespace metallab {

Jet2::Jet2(std::size_t n, double value) : value_(value), grad_(n, 0.0), hess_(n * n, 0.0) {}

Jet2 Jet2::variable(std::size_t n, std::size_t index, double value) {
  Jet2 j(n, value);
  j.grad_[index] = 1.0;
  return j;
}

bool Jet2::is_constant() const {
  auto zero = [](double v) { return v == 0.0; };
  return std::all_of(grad_.begin(), grad_.end(), zero) &&
         std::all_of(hess_.begin(), hess_.end(), zero);
}

Jet2 Jet2::compose(double f, double df, double d2f) const {
  const std::size_t n = size();
  Jet2 out(n, f);
  for (std::size_t i = 0; i < n; ++i) out.grad_[i] = df * grad_[i];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      out.set_hess(i, j, df * hess(i, j) + d2f * grad_[i] * grad_[j]);
    }
  }
  return out;
}

Jet2& Jet2::operator+=(const Jet2& rhs) {
  value_ += rhs.value_;
  for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] += rhs.grad_[i];
  for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] += rhs.hess_[i];
  return *this;
}

Jet2& Jet2::operator-=(const Jet2& rhs) {
  value_ -= rhs.value_;
  for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] -= rhs.grad_[i];
  for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] -= rhs.hess_[i];
  return *this;
}

Jet2& Jet2::operator*=(double s) {
  value_ *= s;
  for (auto& g : grad_) g *= s;
  for (auto& h : hess_) h *= s;
  return *this;
}

Jet2 operator*(const Jet2& a, const Jet2& b) {
  const std::size_t n = a.size();
  Jet2 out(n, a.value_ * b.value_);
  for (std::size_t i = 0; i < n; ++i) out.grad_[i] = a.value_ * b.grad_[i] + b.value_ * a.grad_[i];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double h = a.value_ * b.hess(i, j) + b.value_ * a.hess(i, j) +
                       a.grad_[i] * b.grad_[j] + b.grad_[i] * a.grad_[j];
      out.set_hess(i, j, h);
    }
  }
  return out;
}

Jet2 operator-(Jet2 a) {
  a *= -1.0;
  return a;
}

Jet2 reciprocal(const Jet2& a) {
  const double x = a.value();
  const double inv = 1.0 / x;
  return a.compose(inv, -inv * inv, 2.0 * inv * inv * inv);
}

Jet2 integer_power(const Jet2& a, long long n) {
  if (n < 0) return reciprocal(integer_power(a, -n));
  Jet2 result = Jet2::constant(a.size(), 1.0);
  Jet2 base = a;
  auto e = static_cast<unsigned long long>(n);
  while (e != 0) {
    if (e & 1ULL) result = result * base;
    e >>= 1ULL;
    if (e != 0) base = base * base;
  }
  return result;
}

}  // namespace metallab
