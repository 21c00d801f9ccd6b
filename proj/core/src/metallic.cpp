#include "metallab/metallic.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <string>

#include "metallab/errors.hpp"
#include "metallab/rng.hpp"

namespace metallab {

MetallicParams metallic_number(int p, int q) {
  assert(p >= 1 && q >= 1);
  MetallicParams m;
  m.p = p;
  m.q = q;
  const double pd = p;
  const double qd = q;
  m.sigma = 0.5 * (pd + std::sqrt(pd * pd + 4.0 * qd));
  // Same root as p - sigma, without cancellation.
  m.sigma_bar = -qd / m.sigma;
  return m;
}

StructureOp::StructureOp(Mat matrix, MetallicParams params, StructureKind kind)
    : matrix_(std::move(matrix)), params_(params), kind_(kind) {
  const std::size_t m = matrix_.rows();
  const double c = 2.0 * params_.sigma - params_.p;
  product_.matrix = (matrix_ - (0.5 * params_.p) * Mat::identity(m)) * (2.0 / c);
}

StructureOp diagonal_structure(std::span<const AxisValue> pattern, const MetallicParams& params) {
  Vec d(pattern.size());
  std::transform(pattern.begin(), pattern.end(), d.begin(),
                 [&](AxisValue a) { return a == AxisValue::Sigma ? params.sigma : params.sigma_bar; });
  StructureOp j(Mat::diagonal(d), params, StructureKind::DiagonalPattern);
  // Recovered F is exactly diagonal +-1.
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    j.product_.matrix(i, i) = pattern[i] == AxisValue::Sigma ? 1.0 : -1.0;
  }
  return j;
}

StructureOp from_product(const ProductStructure& f, const MetallicParams& params, ProductSign sign) {
  const Mat& fm = f.matrix;
  const std::size_t m = fm.rows();
  if (fm.cols() != m) throw InvalidProduct("product structure matrix is not square");
  if (max_abs_diff(fm, fm.transpose()) > 1e-9) throw InvalidProduct("product structure matrix is not symmetric");
  const double sq_err = max_abs_diff(fm * fm, Mat::identity(m));
  if (sq_err > 1e-9) {
    throw InvalidProduct("product structure fails F^2 = I (max residual " + std::to_string(sq_err) + ")");
  }
  const double s = sign == ProductSign::Plus ? 1.0 : -1.0;
  const double c = 0.5 * (2.0 * params.sigma - params.p);
  Mat jm = (0.5 * params.p) * Mat::identity(m) + (s * c) * fm;
  StructureOp j(std::move(jm), params, StructureKind::ProductInduced);
  j.product_ = f;
  j.sign_ = sign;
  return j;
}

StructureOp custom_structure(const Mat& j, const MetallicParams& params) {
  return StructureOp(j, params, StructureKind::Custom);
}

StructureOp validated_structure(const Mat& j, const MetallicParams& params, std::size_t samples,
                                std::uint64_t seed) {
  if (j.rows() != j.cols()) throw InvalidStructure("structure matrix is not square");
  StructureOp op = custom_structure(j, params);
  const CheckReport r = verify_structure(op, samples, seed);
  if (!r.passed()) {
    throw InvalidStructure("matrix is not a metallic structure for (p,q)=(" + std::to_string(params.p) + "," +
                           std::to_string(params.q) + "): " + r.note);
  }
  return op;
}

CheckReport verify_structure(const StructureOp& j, std::size_t samples, std::uint64_t seed) {
  const auto& prm = j.params();
  const std::size_t m = j.ambient_dim();
  SampleRng rng = SampleRng::stream(seed, 0x5eed);
  double r1 = 0.0, r2 = 0.0, r3 = 0.0;
  ResidualTally tally("STRUCTURE", "", 1e-10);
  for (std::size_t s = 0; s < samples; ++s) {
    tally.count_sample();
    Vec x = rng.normal_vector(m);
    Vec y = rng.normal_vector(m);
    x = (1.0 / norm(x)) * x;
    y = (1.0 / norm(y)) * y;
    const Vec jx = j.apply(x);
    const Vec jy = j.apply(y);
    const Vec jjx = j.apply(jx);
    // J^2 X = pJX + qX
    Vec e1 = jjx;
    axpy(e1, -prm.p, jx);
    axpy(e1, -prm.q, x);
    const double a = norm(e1);
    // <JX,Y> = <X,JY>
    const double b = std::fabs(dot(jx, y) - dot(x, jy));
    // <JX,JY> = p<JX,Y> + q<X,Y>
    const double c = std::fabs(dot(jx, jy) - prm.p * dot(jx, y) - prm.q * dot(x, y));
    r1 = std::max(r1, a);
    r2 = std::max(r2, b);
    r3 = std::max(r3, c);
    tally.add(std::max({a, b, c}), s, {});
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "J^2=pJ+qI: %.3e; <JX,Y>=<X,JY>: %.3e; <JX,JY>=p<JX,Y>+q<X,Y>: %.3e", r1, r2,
                r3);
  return tally.finish(buf);
}

Mat inverse(const StructureOp& j) {
  const auto& prm = j.params();
  return (j.matrix() - static_cast<double>(prm.p) * Mat::identity(j.ambient_dim())) *
         (1.0 / static_cast<double>(prm.q));
}

}  // namespace metallab
