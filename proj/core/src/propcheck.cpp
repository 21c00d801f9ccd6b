#include "metallab/propcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>

#include "metallab/errors.hpp"

namespace metallab {

namespace {

constexpr double kAlgebraic = 1e-10;
constexpr double kConnection = 1e-8;

using R = Requirement;

// clang-format off
constexpr CheckInfo kChecks[] = {
  {CheckId::E7_SYM, "E7_SYM", "g(TX,Y) = g(X,TY); <nU,V> = <U,nV>", kAlgebraic, R::None},
  {CheckId::E8_ADJ, "E8_ADJ", "<NX,V> = g(X,tV)", kAlgebraic, R::None},
  {CheckId::E99, "E99", "T^2 = pT + qI - tN; pN = NT + nN", kAlgebraic, R::None},
  {CheckId::E100, "E100", "n^2 = pn + qI - Nt; pt = Tt + tn", kAlgebraic, R::None},
  {CheckId::E9E10_PRODUCT, "E9E10_PRODUCT", "T,N,t,n = (p/2)I + s((2sigma-p)/2)(f,w,B,C) from the product structure", kAlgebraic, R::None},
  {CheckId::E12_SHAPE, "E12_SHAPE", "<h(X,Y),V> = g(A_V X,Y)", kAlgebraic, R::None},
  {CheckId::E16_NABLA_T_SYM, "E16_NABLA_T_SYM", "g((nabla_X T)Y,Z) = g(Y,(nabla_X T)Z)", kAlgebraic, R::None},
  {CheckId::E17i, "E17i", "(nabla_X T)Y = A_{NY}X + t h(X,Y)", kConnection, R::None},
  {CheckId::E17ii, "E17ii", "(nabla_X N)Y = n h(X,Y) - h(X,TY)", kConnection, R::None},
  {CheckId::E18i, "E18i", "(nabla_X t)V = A_{nV}X - T A_V X", kConnection, R::None},
  {CheckId::E18ii, "E18ii", "(nabla_X n)V = -h(X,tV) - N A_V X", kConnection, R::None},
  {CheckId::E19_DUALITY, "E19_DUALITY", "<(nabla_X N)Y,V> = g((nabla_X t)V,Y)", kConnection, R::None},
  {CheckId::E20_BRACKET_T, "E20_BRACKET_T", "T[X,Y] = nabla_X TY - nabla_Y TX - A_{NY}X + A_{NX}Y", kConnection, R::None},
  {CheckId::E21_BRACKET_N, "E21_BRACKET_N", "N[X,Y] = h(X,TY) - h(TX,Y) + nabla^perp_X NY - nabla^perp_Y NX", kConnection, R::None},
  {CheckId::E26, "E26", "g(TP1X,TP1Y) = cos^2(theta)[p g(TP1X,P1Y) + q g(P1X,P1Y)]", kAlgebraic, R::HemiSlant},
  {CheckId::E27, "E27", "<NX,NY> = sin^2(theta)[p g(TX,Y) + q g(X,Y)], X,Y in D1", kAlgebraic, R::HemiSlant},
  {CheckId::E28, "E28", "(TP1)^2 X = cos^2(theta)(p TP1 X + qX), X in D1", kAlgebraic, R::HemiSlant},
  {CheckId::E28_RECOVERY, "E28_RECOVERY", "X = T(TX - p cos^2(theta) X)/(q cos^2(theta)) and TX in D1, X in D1", kAlgebraic, R::HemiSlant},
  {CheckId::E29_DERIV, "E29_DERIV", "nabla((TP1)^2) = p cos^2(theta) nabla(TP1)", kConnection, R::HemiSlant},
  {CheckId::E30_DTHETA_CLOSED, "E30_DTHETA_CLOSED", "nabla_X TY - nabla_Y TX - A_{NY}X + A_{NX}Y in D1, X,Y in D1", kConnection, R::HemiSlant},
  {CheckId::E31_ANTIINV_SHAPE, "E31_ANTIINV_SHAPE", "A_{NZ}W = 0, Z,W in D2", kAlgebraic, R::AntiInvariant},
  {CheckId::E32_NABLA_SYM, "E32_NABLA_SYM", "(nabla_Z T)W = (nabla_W T)Z, Z,W in D2", kConnection, R::AntiInvariant},
  {CheckId::E33_SHAPE_COMM, "E33_SHAPE_COMM", "nabla N = 0 and nabla t = 0 iff A_{nV} = T A_V = A_V T", 1e-9, R::None},
  {CheckId::E34_EQUIV, "E34_EQUIV", "<(nabla_X N)Y,V> = g(A_{nV}X - T A_V X,Y) = g(A_{nV}Y - A_V TY,X)", kConnection, R::None},
  {CheckId::E35_EIGEN, "E35_EIGEN", "n^2 h = p cos^2(theta) n h + q cos^2(theta) h when nabla N = 0 on D1", kConnection, R::HemiSlant},
  {CheckId::DTHETA_INTEGRABLE, "DTHETA_INTEGRABLE", "[X,Y] in D1 for X,Y in D1", kConnection, R::HemiSlant},
  {CheckId::DPERP_INTEGRABLE, "DPERP_INTEGRABLE", "[Z,W] in D2 for Z,W in D2", kConnection, R::AntiInvariant},
  {CheckId::MIXED_GEODESIC, "MIXED_GEODESIC", "(nabla_X N)Z = 0 implies h(D1,D2) = 0; h(D1,D2) = 0 iff A_V D1 in D1, A_V D2 in D2", kConnection, R::ProperHemiSlant},
  {CheckId::TOTALLY_GEODESIC_VANISH, "TOTALLY_GEODESIC_VANISH", "h = 0 implies nabla T = nabla N = nabla t = nabla n = 0", 1e-9, R::None},
};
// clang-format on

std::string fmt_vec(const Vec& v) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Field with coefficients affine in the coordinates around the sample point:
/// value at the point and a constant jacobian.
FieldSample affine_field(Vec value, Mat jacobian) { return {std::move(value), std::move(jacobian)}; }

/// Everything the checks need at one sample point.
class Site {
public:
  Site(const ImmersionScenario& scn, const Vec& point)
      : scn_(scn), geom_(frame_at(scn, point)), ops_(induced_ops(geom_, scn.structure)), e_(geom_.normal_matrix()) {
    if (const auto* d = scn.distribution("D1")) {
      d1_fields_ = sample_fields(*d);
      d1_.emplace(geom_, values(d1_fields_));
    }
    if (const auto* d = scn.distribution("D2")) {
      d2_fields_ = sample_fields(*d);
      d2_.emplace(geom_, values(d2_fields_));
    }
  }
  Site(const Site&) = delete;
  Site& operator=(const Site&) = delete;

  const PointGeometry& geom() const { return geom_; }
  const InducedOps& ops() const { return ops_; }
  const StructureOp& j() const { return scn_.structure; }
  const MetallicParams& prm() const { return scn_.structure.params(); }
  std::size_t k() const { return geom_.dim(); }
  std::size_t m() const { return geom_.ambient_dim(); }
  std::size_t r() const { return m() - k(); }
  const DistributionFrame& d1() const { return *d1_; }
  const DistributionFrame& d2() const { return *d2_; }
  const std::vector<FieldSample>& d1_fields() const { return d1_fields_; }
  const std::vector<FieldSample>& d2_fields() const { return d2_fields_; }

  double gn(const Vec& x) const { return geom_.g_norm(x); }
  double g(const Vec& x, const Vec& y) const { return geom_.g(x, y); }
  Vec g_unit(const Vec& x) const {
    const double n = gn(x);
    return n > 0.0 ? (1.0 / n) * x : x;
  }

  Vec T(const Vec& x) const { return ops_.T * x; }
  /// NX as an ambient normal vector.
  Vec N(const Vec& x) const { return e_ * (ops_.N * x); }
  /// tV in coordinates for an ambient normal V.
  Vec t(const Vec& v) const { return geom_.tangent_coords(j().apply(v)); }
  /// nV as an ambient normal vector.
  Vec n(const Vec& v) const { return geom_.normal_part(j().apply(v)); }
  Mat A(const Vec& v) const { return shape_operator(geom_, v); }
  Vec h(const Vec& x, const Vec& y) const { return second_fundamental_form(geom_, x, y); }

  Vec random_tangent(SampleRng& rng) const { return g_unit(rng.normal_vector(k())); }
  /// Unit normal vector, ambient.
  Vec random_normal(SampleRng& rng) const {
    Vec c = rng.normal_vector(r());
    c = (1.0 / norm(c)) * c;
    return e_ * c;
  }
  Vec random_in(const DistributionFrame& d, SampleRng& rng) const {
    Vec x(k(), 0.0);
    for (const auto& s : d.spanning()) axpy(x, rng.normal(), s);
    return g_unit(x);
  }

  FieldSample random_tangent_field(SampleRng& rng) const {
    Vec a = random_tangent(rng);
    Mat b(k(), k());
    for (std::size_t i = 0; i < k(); ++i)
      for (std::size_t c = 0; c < k(); ++c) b(i, c) = rng.uniform(-1.0, 1.0);
    return affine_field(std::move(a), std::move(b));
  }

  /// Sum of c_r(u) S_r(u) over the spanning fields of a distribution, with c_r
  /// affine and the value at the point of unit length.
  FieldSample random_distribution_field(const std::vector<FieldSample>& spanning, SampleRng& rng) const {
    Vec value(k(), 0.0);
    Mat jac(k(), k());
    for (const auto& s : spanning) {
      const double c = rng.normal();
      const Vec dc = rng.uniform_vector(k());
      axpy(value, c, s.value);
      for (std::size_t row = 0; row < k(); ++row)
        for (std::size_t col = 0; col < k(); ++col) jac(row, col) += s.value[row] * dc[col] + c * s.jacobian(row, col);
    }
    const double nv = gn(value);
    if (nv > 0.0) {
      value = (1.0 / nv) * value;
      jac *= 1.0 / nv;
    }
    return affine_field(std::move(value), std::move(jac));
  }

  /// Affine ambient field, unit normal at the point. Project its jet with
  /// normal_part to get the normal field V = P_nor V~.
  FieldSample random_ambient_normal(SampleRng& rng) const {
    Vec a = random_normal(rng);
    Mat b(m(), k());
    for (std::size_t i = 0; i < m(); ++i)
      for (std::size_t c = 0; c < k(); ++c) b(i, c) = rng.uniform(-1.0, 1.0);
    return affine_field(std::move(a), std::move(b));
  }

  VectorJet normal_jet(const FrameDerivative& fd, const FieldSample& ambient) const {
    return normal_part(geom_, fd, ambient.along(fd.direction));
  }

  /// nabla_X (TY) for a coordinate jet of Y along fd.direction.
  Vec nabla_TY(const FrameDerivative& fd, const VectorJet& y) const {
    const VectorJet jy = apply(j().matrix(), push_forward(geom_, fd, y));
    return tangent_connection(geom_, fd, tangential_coords(geom_, fd, jy));
  }
  /// nabla^perp_X (NY).
  Vec nabla_NY(const FrameDerivative& fd, const VectorJet& y) const {
    const VectorJet jy = apply(j().matrix(), push_forward(geom_, fd, y));
    return normal_connection(geom_, fd, normal_part(geom_, fd, jy));
  }

  double outside(const DistributionFrame& d, const Vec& v) const {
    return gn(v - d.project(v)) / std::max(gn(v), 1.0);
  }

private:
  std::vector<FieldSample> sample_fields(const DistributionSpec& d) const {
    std::vector<FieldSample> out;
    for (const auto& f : d.fields) out.push_back(eval_field(scn_, f, geom_.point));
    return out;
  }
  static std::vector<Vec> values(const std::vector<FieldSample>& fs) {
    std::vector<Vec> out;
    for (const auto& f : fs) out.push_back(f.value);
    return out;
  }

  const ImmersionScenario& scn_;
  PointGeometry geom_;
  InducedOps ops_;
  Mat e_;
  std::vector<FieldSample> d1_fields_;
  std::vector<FieldSample> d2_fields_;
  std::optional<DistributionFrame> d1_;
  std::optional<DistributionFrame> d2_;
};

struct Outcome {
  double residual;
  std::string detail;
};

/// Per-check state shared across samples.
struct CheckEnv {
  const ImmersionScenario& scn;
  const HemiSlantVerdict* verdict;
  double cos2 = 1.0;
  std::size_t counter = 0;  // check-specific tally, reported in the note
};

using Evaluator = std::function<std::optional<Outcome>(const Site&, SampleRng&, CheckEnv&)>;

VectorJet constant_jet(const Vec& v) { return {v, Vec(v.size(), 0.0)}; }

std::optional<Outcome> eval_e7(const Site& s, SampleRng& rng, CheckEnv&) {
  const Vec x = s.random_tangent(rng);
  const Vec y = s.random_tangent(rng);
  const Vec u = s.random_normal(rng);
  const Vec v = s.random_normal(rng);
  const double a = std::fabs(s.g(s.T(x), y) - s.g(x, s.T(y)));
  const double b = std::fabs(dot(s.n(u), v) - dot(u, s.n(v)));
  return Outcome{std::max(a, b), "X=" + fmt_vec(x) + " Y=" + fmt_vec(y)};
}

std::optional<Outcome> eval_e8(const Site& s, SampleRng& rng, CheckEnv&) {
  const Vec x = s.random_tangent(rng);
  const Vec v = s.random_normal(rng);
  return Outcome{std::fabs(dot(s.N(x), v) - s.g(x, s.t(v))), "X=" + fmt_vec(x) + " V=" + fmt_vec(v)};
}

std::optional<Outcome> eval_e99(const Site& s, SampleRng& rng, CheckEnv&) {
  const auto& prm = s.prm();
  const Vec x = s.random_tangent(rng);
  const Vec tx = s.T(x);
  const Vec nx = s.N(x);
  Vec a = s.T(tx);
  axpy(a, -prm.p, tx);
  axpy(a, -prm.q, x);
  a = a + s.t(nx);
  Vec b = static_cast<double>(prm.p) * nx;
  b = b - s.N(tx) - s.n(nx);
  return Outcome{std::max(s.gn(a), norm(b)), "X=" + fmt_vec(x)};
}

std::optional<Outcome> eval_e100(const Site& s, SampleRng& rng, CheckEnv&) {
  const auto& prm = s.prm();
  const Vec v = s.random_normal(rng);
  const Vec nv = s.n(v);
  const Vec tv = s.t(v);
  Vec a = s.n(nv);
  axpy(a, -prm.p, nv);
  axpy(a, -prm.q, v);
  a = a + s.N(tv);
  Vec b = static_cast<double>(prm.p) * tv;
  b = b - s.T(tv) - s.t(nv);
  return Outcome{std::max(norm(a), s.gn(b)), "V=" + fmt_vec(v)};
}

std::optional<Outcome> eval_e9e10(const Site& s, SampleRng& rng, CheckEnv&) {
  const auto& prm = s.prm();
  const Mat& fp = s.j().product().matrix;
  const double sc = (s.j().product_sign() == ProductSign::Plus ? 1.0 : -1.0) * 0.5 * (2.0 * prm.sigma - prm.p);
  const double half_p = 0.5 * prm.p;
  const auto& geom = s.geom();
  const Vec x = s.random_tangent(rng);
  const Vec v = s.random_normal(rng);
  const Vec fx = fp * geom.to_ambient(x);
  const Vec fv = fp * v;
  // Tangential and normal parts of the product structure.
  const Vec f_tan = geom.tangent_coords(fx);
  const Vec w_nor = geom.normal_part(fx);
  const Vec b_tan = geom.tangent_coords(fv);
  const Vec c_nor = geom.normal_part(fv);

  Vec r1 = s.T(x);
  axpy(r1, -half_p, x);
  axpy(r1, -sc, f_tan);
  Vec r2 = s.N(x);
  axpy(r2, -sc, w_nor);
  Vec r3 = s.t(v);
  axpy(r3, -sc, b_tan);
  Vec r4 = s.n(v);
  axpy(r4, -half_p, v);
  axpy(r4, -sc, c_nor);
  return Outcome{std::max({s.gn(r1), norm(r2), s.gn(r3), norm(r4)}), "X=" + fmt_vec(x) + " V=" + fmt_vec(v)};
}

std::optional<Outcome> eval_e12(const Site& s, SampleRng& rng, CheckEnv&) {
  const Vec x = s.random_tangent(rng);
  const Vec y = s.random_tangent(rng);
  const Vec v = s.random_normal(rng);
  return Outcome{std::fabs(dot(s.h(x, y), v) - s.g(s.A(v) * x, y)), "X=" + fmt_vec(x) + " Y=" + fmt_vec(y)};
}

std::optional<Outcome> eval_e16(const Site& s, SampleRng& rng, CheckEnv&) {
  const Vec x = s.random_tangent(rng);
  const FieldSample yf = s.random_tangent_field(rng);
  const FieldSample zf = s.random_tangent_field(rng);
  const FrameDerivative fd = frame_derivative(s.geom(), x);
  const Vec a = cov_deriv_T(s.geom(), fd, s.j(), yf.along(x));
  const Vec b = cov_deriv_T(s.geom(), fd, s.j(), zf.along(x));
  return Outcome{std::fabs(s.g(a, zf.value) - s.g(yf.value, b)), "X=" + fmt_vec(x)};
}

std::optional<Outcome> eval_e17i(const Site& s, SampleRng& rng, CheckEnv&) {
  const Vec x = s.random_tangent(rng);
  const FieldSample yf = s.random_tangent_field(rng);
  const FrameDerivative fd = frame_derivative(s.geom(), x);
  const Vec& y = yf.value;
  const Vec lhs = cov_deriv_T(s.geom(), fd, s.j(), yf.along(x));
  const Vec rhs = s.A(s.N(y)) * x + s.t(s.h(x, y));
  return Outcome{s.gn(lhs - rhs), "X=" + fmt_vec(x) + " Y=" + fmt_vec(y)};
}

std::optional<Outcome> eval_e17ii(const Site& s, SampleRng& rng, CheckEnv&) {
  const Vec x = s.random_tangent(rng);
  const FieldSample yf = s.random_tangent_field(rng);
  const FrameDerivative fd = frame_derivative(s.geom(), x);
  const Vec& y = yf.value;
  const Vec lhs = cov_deriv_N(s.geom(), fd, s.j(), yf.along(x));
  const Vec rhs = s.n(s.h(x, y)) - s.h(x, s.T(y));
  return Outcome{norm(lhs - rhs), "X=" + fmt_vec(x) + " Y=" + fmt_vec(y)};
}

std::optional<Outcome> eval_e18i(const Site& s, SampleRng& rng, CheckEnv&) {
  const Vec x = s.random_tangent(rng);
  const FieldSample vf = s.random_ambient_normal(rng);
  const FrameDerivative fd = frame_derivative(s.geom(), x);
  const VectorJet vj = s.normal_jet(fd, vf);
  const Mat av = s.A(vj.value);
  const Vec lhs = cov_deriv_t(s.geom(), fd, s.j(), vj);
  const Vec rhs = s.A(s.n(vj.value)) * x - s.T(av * x);
  return Outcome{s.gn(lhs - rhs), "X=" + fmt_vec(x) + " V=" + fmt_vec(vj.value)};
}

std::optional<Outcome> eval_e18ii(const Site& s, SampleRng& rng, CheckEnv&) {
  const Vec x = s.random_tangent(rng);
  const FieldSample vf = s.random_ambient_normal(rng);
  const FrameDerivative fd = frame_derivative(s.geom(), x);
  const VectorJet vj = s.normal_jet(fd, vf);
  const Vec lhs = cov_deriv_n(s.geom(), fd, s.j(), vj);
  const Vec rhs = -(s.h(x, s.t(vj.value)) + s.N(s.A(vj.value) * x));
  return Outcome{norm(lhs - rhs), "X=" + fmt_vec(x) + " V=" + fmt_vec(vj.value)};
}

std::optional<Outcome> eval_e19(const Site& s, SampleRng& rng, CheckEnv&) {
  const Vec x = s.random_tangent(rng);
  const FieldSample yf = s.random_tangent_field(rng);
  const FieldSample vf = s.random_ambient_normal(rng);
  const FrameDerivative fd = frame_derivative(s.geom(), x);
  const VectorJet vj = s.normal_jet(fd, vf);
  const double a = dot(cov_deriv_N(s.geom(), fd, s.j(), yf.along(x)), vj.value);
  const double b = s.g(cov_deriv_t(s.geom(), fd, s.j(), vj), yf.value);
  return Outcome{std::fabs(a - b), "X=" + fmt_vec(x) + " Y=" + fmt_vec(yf.value)};
}

Vec bracket(const FieldSample& xf, const FieldSample& yf) { return yf.jacobian * xf.value - xf.jacobian * yf.value; }

/// nabla_X TY - nabla_Y TX - A_{NY}X + A_{NX}Y.
Vec bracket_t_rhs(const Site& s, const FieldSample& xf, const FieldSample& yf) {
  const Vec& x = xf.value;
  const Vec& y = yf.value;
  const FrameDerivative fdx = frame_derivative(s.geom(), x);
  const FrameDerivative fdy = frame_derivative(s.geom(), y);
  return s.nabla_TY(fdx, yf.along(x)) - s.nabla_TY(fdy, xf.along(y)) - s.A(s.N(y)) * x + s.A(s.N(x)) * y;
}

std::optional<Outcome> eval_e20(const Site& s, SampleRng& rng, CheckEnv&) {
  const FieldSample xf = s.random_tangent_field(rng);
  const FieldSample yf = s.random_tangent_field(rng);
  const Vec lhs = s.T(bracket(xf, yf));
  return Outcome{s.gn(lhs - bracket_t_rhs(s, xf, yf)), "X=" + fmt_vec(xf.value) + " Y=" + fmt_vec(yf.value)};
}

std::optional<Outcome> eval_e21(const Site& s, SampleRng& rng, CheckEnv&) {
  const FieldSample xf = s.random_tangent_field(rng);
  const FieldSample yf = s.random_tangent_field(rng);
  const Vec& x = xf.value;
  const Vec& y = yf.value;
  const FrameDerivative fdx = frame_derivative(s.geom(), x);
  const FrameDerivative fdy = frame_derivative(s.geom(), y);
  const Vec lhs = s.N(bracket(xf, yf));
  const Vec rhs = s.h(x, s.T(y)) - s.h(s.T(x), y) + s.nabla_NY(fdx, yf.along(x)) - s.nabla_NY(fdy, xf.along(y));
  return Outcome{norm(lhs - rhs), "X=" + fmt_vec(x) + " Y=" + fmt_vec(y)};
}

std::optional<Outcome> eval_e26(const Site& s, SampleRng& rng, CheckEnv& env) {
  const auto& prm = s.prm();
  const Vec x = s.random_tangent(rng);
  const Vec y = s.random_tangent(rng);
  const Vec px = s.d1().project(x);
  const Vec py = s.d1().project(y);
  const Vec tpx = s.T(px);
  const Vec tpy = s.T(py);
  const double lhs = s.g(tpx, tpy);
  const double rhs = env.cos2 * (prm.p * s.g(tpx, py) + prm.q * s.g(px, py));
  return Outcome{std::fabs(lhs - rhs), "X=" + fmt_vec(x) + " Y=" + fmt_vec(y)};
}

std::optional<Outcome> eval_e27(const Site& s, SampleRng& rng, CheckEnv& env) {
  const auto& prm = s.prm();
  const Vec x = s.random_in(s.d1(), rng);
  const Vec y = s.random_in(s.d1(), rng);
  const double sin2 = 1.0 - env.cos2;
  const double lhs = dot(s.N(x), s.N(y));
  const double rhs = sin2 * (prm.p * s.g(s.T(x), y) + prm.q * s.g(x, y));
  return Outcome{std::fabs(lhs - rhs), "X=" + fmt_vec(x) + " Y=" + fmt_vec(y)};
}

std::optional<Outcome> eval_e28(const Site& s, SampleRng& rng, CheckEnv& env) {
  const auto& prm = s.prm();
  const Vec x = s.random_in(s.d1(), rng);
  auto tp1 = [&](const Vec& v) { return s.T(s.d1().project(v)); };
  const Vec once = tp1(x);
  Vec r = tp1(once);
  axpy(r, -env.cos2 * prm.p, once);
  axpy(r, -env.cos2 * prm.q, x);
  return Outcome{s.gn(r), "X=" + fmt_vec(x)};
}

std::optional<Outcome> eval_e28_recovery(const Site& s, SampleRng& rng, CheckEnv& env) {
  if (env.cos2 < 1e-12) return std::nullopt;
  const auto& prm = s.prm();
  const Vec x = s.random_in(s.d1(), rng);
  const Vec tx = s.T(x);
  Vec inner = tx;
  axpy(inner, -prm.p * env.cos2, x);
  const Vec rec = (1.0 / (prm.q * env.cos2)) * s.T(inner);
  const double closure = s.gn(tx - s.d1().project(tx));
  return Outcome{std::max(s.gn(x - rec), closure), "X=" + fmt_vec(x)};
}

/// Projector onto D1 along D2 as an operator jet, from the spanning fields.
OperatorJet projector_jet(const Site& s, const FrameDerivative& fd) {
  const auto& fs = s.d1_fields();
  const std::size_t k = s.k();
  std::vector<Vec> cols;
  std::vector<Vec> dcols;
  for (const auto& f : fs) {
    cols.push_back(f.value);
    dcols.push_back(f.jacobian * fd.direction);
  }
  const OperatorJet b{Mat::from_columns(k, cols), Mat::from_columns(k, dcols)};
  const OperatorJet bt{b.value.transpose(), b.deriv.transpose()};
  const OperatorJet g{s.geom().induced_metric, fd.dG};
  const OperatorJet gram = bt * g * b;
  const Mat ginv = inverse_sym(gram.value);
  const OperatorJet gram_inv{ginv, -1.0 * (ginv * gram.deriv * ginv)};
  return b * gram_inv * bt * g;
}

/// (nabla_X S)y = dS y + C S y - S C y for an operator jet S in coordinates.
Vec operator_cov(const FrameDerivative& fd, const OperatorJet& op, const Vec& y) {
  return op.deriv * y + fd.christoffel * (op.value * y) - op.value * (fd.christoffel * y);
}

std::optional<Outcome> eval_e29(const Site& s, SampleRng& rng, CheckEnv& env) {
  if (s.d1().rank() != s.d1_fields().size()) return std::nullopt;
  const auto& prm = s.prm();
  const Vec x = s.random_tangent(rng);
  const Vec y = s.random_tangent(rng);
  const FrameDerivative fd = frame_derivative(s.geom(), x);
  const OperatorJet tp1 = tangential_operator(s.geom(), fd, s.j()) * projector_jet(s, fd);
  const OperatorJet sq = tp1 * tp1;
  Vec r = operator_cov(fd, sq, y);
  axpy(r, -prm.p * env.cos2, operator_cov(fd, tp1, y));
  return Outcome{s.gn(r), "X=" + fmt_vec(x) + " Y=" + fmt_vec(y)};
}

std::optional<Outcome> eval_e30(const Site& s, SampleRng& rng, CheckEnv&) {
  const FieldSample xf = s.random_distribution_field(s.d1_fields(), rng);
  const FieldSample yf = s.random_distribution_field(s.d1_fields(), rng);
  const Vec v = bracket_t_rhs(s, xf, yf);
  return Outcome{s.outside(s.d1(), v), "X=" + fmt_vec(xf.value) + " Y=" + fmt_vec(yf.value)};
}

std::optional<Outcome> eval_e31(const Site& s, SampleRng& rng, CheckEnv&) {
  const Vec z = s.random_in(s.d2(), rng);
  const Vec w = s.random_in(s.d2(), rng);
  return Outcome{s.gn(s.A(s.N(z)) * w), "Z=" + fmt_vec(z) + " W=" + fmt_vec(w)};
}

std::optional<Outcome> eval_e32(const Site& s, SampleRng& rng, CheckEnv&) {
  const FieldSample zf = s.random_distribution_field(s.d2_fields(), rng);
  const FieldSample wf = s.random_distribution_field(s.d2_fields(), rng);
  const FrameDerivative fdz = frame_derivative(s.geom(), zf.value);
  const FrameDerivative fdw = frame_derivative(s.geom(), wf.value);
  const Vec a = cov_deriv_T(s.geom(), fdz, s.j(), wf.along(zf.value));
  const Vec b = cov_deriv_T(s.geom(), fdw, s.j(), zf.along(wf.value));
  return Outcome{s.gn(a - b), "Z=" + fmt_vec(zf.value) + " W=" + fmt_vec(wf.value)};
}

std::optional<Outcome> eval_e33(const Site& s, SampleRng&, CheckEnv& env) {
  const std::size_t k = s.k();
  const auto& normals = s.geom().normal.basis;
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const Vec ei = unit(k, i);
    const FrameDerivative fd = frame_derivative(s.geom(), ei);
    for (std::size_t c = 0; c < k; ++c)
      lhs = std::max(lhs, norm(cov_deriv_N(s.geom(), fd, s.j(), constant_jet(unit(k, c)))));
    for (const auto& v : normals) {
      const VectorJet vj = normal_part(s.geom(), fd, constant_jet(v));
      lhs = std::max(lhs, s.gn(cov_deriv_t(s.geom(), fd, s.j(), vj)));
      const Mat av = s.A(v);
      const Vec tav = s.T(av * ei);
      rhs = std::max(rhs, s.gn(s.A(s.n(v)) * ei - tav));
      rhs = std::max(rhs, s.gn(tav - av * s.T(ei)));
    }
  }
  const std::string detail = "|nabla N|,|nabla t| = " + fmt(lhs) + ", shape commutator = " + fmt(rhs);
  if (lhs < 1e-10) return Outcome{rhs, detail};
  if (rhs < 1e-10) return Outcome{lhs, detail};
  ++env.counter;
  return Outcome{0.0, detail};
}

std::optional<Outcome> eval_e34(const Site& s, SampleRng& rng, CheckEnv&) {
  const Vec x = s.random_tangent(rng);
  const Vec y = s.random_tangent(rng);
  const Vec v = s.random_normal(rng);
  const FrameDerivative fd = frame_derivative(s.geom(), x);
  const Mat av = s.A(v);
  const Mat anv = s.A(s.n(v));
  const double a = dot(cov_deriv_N(s.geom(), fd, s.j(), constant_jet(y)), v);
  const double b = s.g(anv * x - s.T(av * x), y);
  const double c = s.g(anv * y - av * s.T(y), x);
  return Outcome{std::max(std::fabs(a - b), std::fabs(b - c)), "X=" + fmt_vec(x) + " Y=" + fmt_vec(y)};
}

std::optional<Outcome> eval_e35(const Site& s, SampleRng& rng, CheckEnv& env) {
  const auto& prm = s.prm();
  double nabla_n = 0.0;
  for (const auto& a : s.d1().spanning()) {
    const FrameDerivative fd = frame_derivative(s.geom(), s.g_unit(a));
    for (const auto& b : s.d1().spanning())
      nabla_n = std::max(nabla_n, norm(cov_deriv_N(s.geom(), fd, s.j(), constant_jet(s.g_unit(b)))));
  }
  if (nabla_n >= 1e-10) return std::nullopt;
  const Vec x = s.random_in(s.d1(), rng);
  const Vec y = s.random_in(s.d1(), rng);
  const Vec hv = s.h(x, y);
  const double hn = norm(hv);
  if (hn <= 1e-10) return std::nullopt;
  const Vec nh = s.n(hv);
  Vec r = s.n(nh);
  axpy(r, -prm.p * env.cos2, nh);
  axpy(r, -prm.q * env.cos2, hv);
  return Outcome{norm(r) / hn, "X=" + fmt_vec(x) + " Y=" + fmt_vec(y)};
}

std::optional<Outcome> eval_integrable(const Site& s, SampleRng& rng, const DistributionFrame& d,
                                       const std::vector<FieldSample>& fields) {
  const FieldSample xf = s.random_distribution_field(fields, rng);
  const FieldSample yf = s.random_distribution_field(fields, rng);
  return Outcome{s.outside(d, bracket(xf, yf)), "X=" + fmt_vec(xf.value) + " Y=" + fmt_vec(yf.value)};
}

std::optional<Outcome> eval_mixed(const Site& s, SampleRng&, CheckEnv& env) {
  const std::size_t k = s.k();
  std::vector<Vec> b1;
  std::vector<Vec> b2;
  for (const auto& v : s.d1().spanning()) b1.push_back(s.g_unit(v));
  for (const auto& v : s.d2().spanning()) b2.push_back(s.g_unit(v));

  double nabla_n = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const FrameDerivative fd = frame_derivative(s.geom(), unit(k, i));
    for (const auto& z : b2) nabla_n = std::max(nabla_n, norm(cov_deriv_N(s.geom(), fd, s.j(), constant_jet(z))));
  }
  double mixed = 0.0;
  for (const auto& x : b1)
    for (const auto& z : b2) mixed = std::max(mixed, norm(s.h(x, z)));
  double leak = 0.0;
  for (const auto& v : s.geom().normal.basis) {
    const Mat av = s.A(v);
    for (const auto& x : b1) leak = std::max(leak, s.outside(s.d1(), av * x));
    for (const auto& z : b2) leak = std::max(leak, s.outside(s.d2(), av * z));
  }

  double res = 0.0;
  if (nabla_n < 1e-10) {
    ++env.counter;
    res = mixed;
  }
  if (mixed < 1e-10) res = std::max(res, leak);
  if (leak < 1e-10) res = std::max(res, mixed);
  return Outcome{res, "|(nabla N)Z| = " + fmt(nabla_n) + ", |h(D1,D2)| = " + fmt(mixed) + ", shape leak = " + fmt(leak)};
}

std::optional<Outcome> eval_totally_geodesic(const Site& s, SampleRng& rng, CheckEnv&) {
  const std::size_t k = s.k();
  double hmax = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t c = 0; c < k; ++c) hmax = std::max(hmax, norm(s.h(unit(k, i), unit(k, c))));
  if (hmax >= 1e-10) return std::nullopt;
  const Vec x = s.random_tangent(rng);
  const FieldSample yf = s.random_tangent_field(rng);
  const FieldSample vf = s.random_ambient_normal(rng);
  const FrameDerivative fd = frame_derivative(s.geom(), x);
  const VectorJet vj = s.normal_jet(fd, vf);
  const double r = std::max({s.gn(cov_deriv_T(s.geom(), fd, s.j(), yf.along(x))),
                             norm(cov_deriv_N(s.geom(), fd, s.j(), yf.along(x))),
                             s.gn(cov_deriv_t(s.geom(), fd, s.j(), vj)), norm(cov_deriv_n(s.geom(), fd, s.j(), vj))});
  return Outcome{r, "X=" + fmt_vec(x)};
}

Evaluator evaluator(CheckId id) {
  switch (id) {
    case CheckId::E7_SYM: return eval_e7;
    case CheckId::E8_ADJ: return eval_e8;
    case CheckId::E99: return eval_e99;
    case CheckId::E100: return eval_e100;
    case CheckId::E9E10_PRODUCT: return eval_e9e10;
    case CheckId::E12_SHAPE: return eval_e12;
    case CheckId::E16_NABLA_T_SYM: return eval_e16;
    case CheckId::E17i: return eval_e17i;
    case CheckId::E17ii: return eval_e17ii;
    case CheckId::E18i: return eval_e18i;
    case CheckId::E18ii: return eval_e18ii;
    case CheckId::E19_DUALITY: return eval_e19;
    case CheckId::E20_BRACKET_T: return eval_e20;
    case CheckId::E21_BRACKET_N: return eval_e21;
    case CheckId::E26: return eval_e26;
    case CheckId::E27: return eval_e27;
    case CheckId::E28: return eval_e28;
    case CheckId::E28_RECOVERY: return eval_e28_recovery;
    case CheckId::E29_DERIV: return eval_e29;
    case CheckId::E30_DTHETA_CLOSED: return eval_e30;
    case CheckId::E31_ANTIINV_SHAPE: return eval_e31;
    case CheckId::E32_NABLA_SYM: return eval_e32;
    case CheckId::E33_SHAPE_COMM: return eval_e33;
    case CheckId::E34_EQUIV: return eval_e34;
    case CheckId::E35_EIGEN: return eval_e35;
    case CheckId::DTHETA_INTEGRABLE:
      return [](const Site& s, SampleRng& rng, CheckEnv&) { return eval_integrable(s, rng, s.d1(), s.d1_fields()); };
    case CheckId::DPERP_INTEGRABLE:
      return [](const Site& s, SampleRng& rng, CheckEnv&) { return eval_integrable(s, rng, s.d2(), s.d2_fields()); };
    case CheckId::MIXED_GEODESIC: return eval_mixed;
    case CheckId::TOTALLY_GEODESIC_VANISH: return eval_totally_geodesic;
  }
  return {};
}

/// Reason the check cannot run, or empty when its requirement is met.
std::string unmet(const CheckInfo& info, const ImmersionScenario& scn, const HemiSlantVerdict* v) {
  switch (info.requirement) {
    case R::None: return {};
    case R::HemiSlant:
      if (v == nullptr || !v->is_hemi_slant() || v->dims.slant == 0 || !v->theta)
        return "precondition: hemi-slant verdict with a slant distribution D1";
      return {};
    case R::AntiInvariant:
      if (scn.distribution("D2") == nullptr || v == nullptr || !v->is_hemi_slant() || v->dims.perp == 0)
        return "precondition: anti-invariant distribution D2";
      return {};
    case R::ProperHemiSlant:
      if (v == nullptr || v->classification != Classification::ProperHemiSlant)
        return "precondition: proper hemi-slant verdict";
      return {};
    case R::Classified:
      if (v == nullptr || v->classification == Classification::Unclassified) return "precondition: classification";
      return {};
  }
  return {};
}

std::string note_for(CheckId id, const CheckEnv& env, const CheckReport& r) {
  switch (id) {
    case CheckId::E29_DERIV:
      return "left side read as the covariant derivative of the endomorphism (TP1)o(TP1), P1 differentiated exactly";
    case CheckId::E33_SHAPE_COMM:
      return std::to_string(env.counter) + " samples where neither side vanishes";
    case CheckId::E35_EIGEN: {
      const auto [l1, l2] = eigen_roots(env.scn.structure.params().p, env.scn.structure.params().q, std::sqrt(env.cos2));
      const double c2 = env.cos2;
      const auto& prm = env.scn.structure.params();
      const double rr = std::max(std::fabs(l1 * l1 - prm.p * c2 * l1 - prm.q * c2),
                                 std::fabs(l2 * l2 - prm.p * c2 * l2 - prm.q * c2));
      return "roots " + fmt(l1) + ", " + fmt(l2) + " (quadratic residual " + fmt(rr) + "); eigen condition applicable at " +
             std::to_string(r.applicable) + " of " + std::to_string(r.samples) + " samples";
    }
    case CheckId::MIXED_GEODESIC:
      return "(nabla N) vanishes on D2 at " + std::to_string(env.counter) + " samples";
    default:
      if (r.applicable < r.samples)
        return "not applicable at " + std::to_string(r.samples - r.applicable) + " of " + std::to_string(r.samples) +
               " samples";
      return {};
  }
}

CheckReport run_checked(const CheckInfo& info, const ImmersionScenario& scn, std::size_t samples, std::uint64_t seed,
                        const HemiSlantVerdict* verdict) {
  CheckEnv env{scn, verdict};
  if (verdict != nullptr && verdict->theta) {
    const double c = std::cos(*verdict->theta);
    env.cos2 = c * c;
  }
  const Evaluator eval = evaluator(info.id);
  SampleRng rng = SampleRng::stream(seed, 0xC4EC0000ULL + static_cast<std::uint64_t>(info.id));
  ResidualTally tally(std::string(info.name), scn.name, info.tolerance);
  for (std::size_t i = 0; i < samples; ++i) {
    tally.count_sample();
    const Vec pt = scn.sample_point(rng);
    const Site site(scn, pt);
    if (auto out = eval(site, rng, env)) tally.add(out->residual, i, pt, std::move(out->detail));
  }
  if (info.id == CheckId::E35_EIGEN) {
    // The closed-form roots are checked once, independent of the samples.
    const auto& prm = scn.structure.params();
    const auto [l1, l2] = eigen_roots(prm.p, prm.q, std::sqrt(env.cos2));
    const double rr = std::max(std::fabs(l1 * l1 - prm.p * env.cos2 * l1 - prm.q * env.cos2),
                               std::fabs(l2 * l2 - prm.p * env.cos2 * l2 - prm.q * env.cos2));
    if (rr >= 1e-12) tally.add(rr, 0, {}, "quadratic roots");
  }
  CheckReport rep = tally.finish();
  rep.note = note_for(info.id, env, rep);
  return rep;
}

bool needs_verdict(const CheckInfo& info) { return info.requirement != R::None; }

}  // namespace

std::span<const CheckInfo> all_checks() { return kChecks; }

const CheckInfo& check_info(CheckId id) { return kChecks[static_cast<std::size_t>(id)]; }

std::string_view to_string(CheckId id) { return check_info(id).name; }

std::optional<CheckId> parse_check_id(std::string_view name) {
  for (const auto& c : kChecks) {
    if (c.name == name) return c.id;
  }
  return std::nullopt;
}

std::vector<CheckId> parse_check_list(std::string_view list) {
  std::vector<CheckId> ids;
  if (list == "all") {
    for (const auto& c : kChecks) ids.push_back(c.id);
    return ids;
  }
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    std::string_view tok = list.substr(pos, comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (!tok.empty()) {
      const auto id = parse_check_id(tok);
      if (!id) throw Error("unknown check id '" + std::string(tok) + "'");
      ids.push_back(*id);
    }
    pos = comma + 1;
  }
  return ids;
}

Vec lie_bracket(const ImmersionScenario& scn, const VectorField& x, const VectorField& y, const Vec& point) {
  return bracket(eval_field(scn, x, point), eval_field(scn, y, point));
}

Vec cov_deriv_T(const PointGeometry& geom, const FrameDerivative& fd, const StructureOp& j, const VectorJet& y) {
  const VectorJet jy = apply(j.matrix(), push_forward(geom, fd, y));
  const Vec nabla_ty = tangent_connection(geom, fd, tangential_coords(geom, fd, jy));
  const Vec nabla_y = tangent_connection(geom, fd, y);
  return nabla_ty - geom.tangent_coords(j.apply(geom.to_ambient(nabla_y)));
}

Vec cov_deriv_N(const PointGeometry& geom, const FrameDerivative& fd, const StructureOp& j, const VectorJet& y) {
  const VectorJet jy = apply(j.matrix(), push_forward(geom, fd, y));
  const Vec nabla_ny = normal_connection(geom, fd, normal_part(geom, fd, jy));
  const Vec nabla_y = tangent_connection(geom, fd, y);
  return nabla_ny - geom.normal_part(j.apply(geom.to_ambient(nabla_y)));
}

Vec cov_deriv_t(const PointGeometry& geom, const FrameDerivative& fd, const StructureOp& j, const VectorJet& v) {
  const VectorJet jv = apply(j.matrix(), v);
  const Vec nabla_tv = tangent_connection(geom, fd, tangential_coords(geom, fd, jv));
  const Vec nabla_v = normal_connection(geom, fd, v);
  return nabla_tv - geom.tangent_coords(j.apply(nabla_v));
}

Vec cov_deriv_n(const PointGeometry& geom, const FrameDerivative& fd, const StructureOp& j, const VectorJet& v) {
  const VectorJet jv = apply(j.matrix(), v);
  const Vec nabla_nv = normal_connection(geom, fd, normal_part(geom, fd, jv));
  const Vec nabla_v = normal_connection(geom, fd, v);
  return nabla_nv - geom.normal_part(j.apply(nabla_v));
}

namespace {

struct FieldPair {
  PointGeometry geom;
  FrameDerivative fd;
};

FieldPair along_field(const ImmersionScenario& scn, const VectorField& x, const Vec& point) {
  PointGeometry geom = frame_at(scn, point);
  FrameDerivative fd = frame_derivative(geom, eval_field(scn, x, point).value);
  return {std::move(geom), std::move(fd)};
}

VectorJet normal_field_jet(const ImmersionScenario& scn, const FieldPair& fp, const AmbientField& v, const Vec& point) {
  const FieldSample vs = eval_field(scn, v, point);
  const double tangential = norm(fp.geom.tangent_part(vs.value));
  if (tangential > 1e-8 * std::max(norm(vs.value), 1.0)) {
    throw NotNormalField("field is not normal at the point (tangential part " + fmt(tangential) + ")");
  }
  return vs.along(fp.fd.direction);
}

}  // namespace

Vec cov_deriv_T(const ImmersionScenario& scn, const VectorField& x, const VectorField& y, const Vec& point) {
  const FieldPair fp = along_field(scn, x, point);
  return cov_deriv_T(fp.geom, fp.fd, scn.structure, eval_field(scn, y, point).along(fp.fd.direction));
}

Vec cov_deriv_N(const ImmersionScenario& scn, const VectorField& x, const VectorField& y, const Vec& point) {
  const FieldPair fp = along_field(scn, x, point);
  return cov_deriv_N(fp.geom, fp.fd, scn.structure, eval_field(scn, y, point).along(fp.fd.direction));
}

Vec cov_deriv_t(const ImmersionScenario& scn, const VectorField& x, const AmbientField& v, const Vec& point) {
  const FieldPair fp = along_field(scn, x, point);
  return cov_deriv_t(fp.geom, fp.fd, scn.structure, normal_field_jet(scn, fp, v, point));
}

Vec cov_deriv_n(const ImmersionScenario& scn, const VectorField& x, const AmbientField& v, const Vec& point) {
  const FieldPair fp = along_field(scn, x, point);
  return cov_deriv_n(fp.geom, fp.fd, scn.structure, normal_field_jet(scn, fp, v, point));
}

std::pair<double, double> eigen_roots(int p, int q, double cos_theta) {
  const double c2 = cos_theta * cos_theta;
  const double b = p * c2;
  const double disc = cos_theta * std::sqrt(p * p * c2 + 4.0 * q);
  // Smaller root from the product l1 * l2 = -q c^2.
  const double l1 = 0.5 * (b + disc);
  const double l2 = l1 != 0.0 ? -q * c2 / l1 : 0.0;
  return {l1, l2};
}

CheckReport run_check(CheckId id, const ImmersionScenario& scn, std::size_t samples, std::uint64_t seed) {
  const CheckInfo& info = check_info(id);
  std::optional<HemiSlantVerdict> verdict;
  if (needs_verdict(info)) verdict = classify(scn);
  const std::string reason = unmet(info, scn, verdict ? &*verdict : nullptr);
  if (!reason.empty()) throw PreconditionNotMet(std::string(info.name) + ": " + reason);
  return run_checked(info, scn, samples, seed, verdict ? &*verdict : nullptr);
}

std::vector<CheckReport> run_suite(const ImmersionScenario& scn, std::span<const CheckId> ids, std::size_t samples,
                                   std::uint64_t seed, const HemiSlantVerdict* verdict) {
  std::vector<CheckId> order(ids.begin(), ids.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  std::optional<HemiSlantVerdict> own;
  const bool any_needs =
      std::any_of(order.begin(), order.end(), [](CheckId id) { return needs_verdict(check_info(id)); });
  if (any_needs && verdict == nullptr && scn.distribution("D1") != nullptr && scn.distribution("D2") != nullptr) {
    own = classify(scn);
    verdict = &*own;
  }

  std::vector<CheckReport> out;
  out.reserve(order.size());
  for (CheckId id : order) {
    const CheckInfo& info = check_info(id);
    const std::string reason = unmet(info, scn, verdict);
    if (!reason.empty()) {
      out.push_back(skipped_report(std::string(info.name), scn.name, reason));
      continue;
    }
    out.push_back(run_checked(info, scn, samples, seed, verdict));
  }
  return out;
}

}  // namespace metallab
