#include "metallab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "metallab/errors.hpp"

namespace metallab {

namespace {

std::string describe_point(const Vec& p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

}  // namespace

Constants ImmersionScenario::constants() const {
  Constants c = extra_consts;
  const auto& prm = structure.params();
  c["p"] = prm.p;
  c["q"] = prm.q;
  c["sigma"] = prm.sigma;
  c["sigma_bar"] = prm.sigma_bar;
  return c;
}

const DistributionSpec* ImmersionScenario::distribution(std::string_view dname) const {
  for (const auto& d : distributions) {
    if (d.name == dname) return &d;
  }
  return nullptr;
}

void ImmersionScenario::validate() const {
  const std::size_t k = dim();
  const std::size_t m = ambient_dim();
  if (k == 0) throw Error("scenario '" + name + "': no parameters declared");
  if (k >= m) throw Error("scenario '" + name + "': parameter count must be below the ambient dimension");
  if (structure.ambient_dim() != m) {
    throw Error("scenario '" + name + "': structure dimension " + std::to_string(structure.ambient_dim()) +
                " does not match ambient dimension " + std::to_string(m));
  }
  if (domain.size() != k) throw Error("scenario '" + name + "': domain needs one interval per parameter");
  for (const auto& iv : domain) {
    if (!(iv.lo < iv.hi)) throw Error("scenario '" + name + "': empty domain interval");
  }
  for (const auto& d : distributions) {
    for (const auto& f : d.fields) {
      if (f.size() != k) {
        throw Error("scenario '" + name + "': distribution '" + d.name + "' field has " + std::to_string(f.size()) +
                    " coefficients, expected " + std::to_string(k));
      }
    }
  }
}

Vec ImmersionScenario::sample_point(SampleRng& rng) const {
  Vec p(dim());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = rng.uniform(domain[i].lo, domain[i].hi);
  return p;
}

std::vector<Vec> ImmersionScenario::sample_points(std::size_t count, std::uint64_t seed) const {
  SampleRng rng = SampleRng::stream(seed, 0x9017);
  std::vector<Vec> pts;
  pts.reserve(count);
  for (std::size_t s = 0; s < count; ++s) pts.push_back(sample_point(rng));
  return pts;
}

Vec PointGeometry::tangent_coords(const Vec& w) const { return metric_inverse * (jacobian.transpose() * w); }

double PointGeometry::g_norm(const Vec& x) const { return std::sqrt(std::max(g(x, x), 0.0)); }

PointGeometry frame_at(const ImmersionScenario& scn, const Vec& point) {
  const std::size_t k = scn.dim();
  const std::size_t m = scn.ambient_dim();
  const Constants consts = scn.constants();
  const Point pt{scn.param_names, point};

  PointGeometry geom;
  geom.point = point;
  geom.jacobian = Mat(m, k);
  geom.hessians.assign(k * k, Vec(m, 0.0));
  for (std::size_t c = 0; c < m; ++c) {
    const Jet2 jet = eval_jet2(scn.components[c], pt, consts);
    for (std::size_t i = 0; i < k; ++i) {
      geom.jacobian(c, i) = jet.grad(i);
      for (std::size_t j = 0; j < k; ++j) geom.hessians[i * k + j][c] = jet.hess(i, j);
    }
  }
  for (std::size_t i = 0; i < k; ++i) geom.coord_frame.push_back(geom.jacobian.column(i));

  geom.tangent = gram_schmidt(m, geom.coord_frame);
  if (geom.tangent.rank() != k) {
    throw ImmersionDegenerate("immersion '" + scn.name + "' is degenerate at " + describe_point(point) +
                              ": jacobian rank " + std::to_string(geom.tangent.rank()) + " < " +
                              std::to_string(k));
  }
  geom.normal = complement(geom.tangent);

  geom.induced_metric = Mat(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      const double gij = dot(geom.coord_frame[i], geom.coord_frame[j]);
      geom.induced_metric(i, j) = gij;
      geom.induced_metric(j, i) = gij;
    }
  geom.metric_inverse = inverse_sym(geom.induced_metric);
  return geom;
}

InducedOps induced_ops(const PointGeometry& geom, const StructureOp& j) {
  const std::size_t k = geom.dim();
  const Mat& f = geom.jacobian;
  const Mat e = geom.normal_matrix();
  const Mat& jm = j.matrix();
  const Mat ft = f.transpose();

  InducedOps ops;
  const Mat ftjf = ft * jm * f;
  const Mat ftje = ft * jm * e;
  ops.T = Mat(k, k);
  for (std::size_t c = 0; c < k; ++c) {
    const Vec col = solve_sym(geom.induced_metric, ftjf.column(c));
    for (std::size_t r = 0; r < k; ++r) ops.T(r, c) = col[r];
  }
  ops.t = Mat(k, e.cols());
  for (std::size_t c = 0; c < e.cols(); ++c) {
    const Vec col = solve_sym(geom.induced_metric, ftje.column(c));
    for (std::size_t r = 0; r < k; ++r) ops.t(r, c) = col[r];
  }
  const Mat et = e.transpose();
  ops.N = et * jm * f;
  ops.n = et * jm * e;
  return ops;
}

Vec second_fundamental_form(const PointGeometry& geom, const Vec& x, const Vec& y) {
  const std::size_t k = geom.dim();
  Vec acc(geom.ambient_dim(), 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (x[i] == 0.0) continue;
    for (std::size_t j = 0; j < k; ++j) {
      if (y[j] == 0.0) continue;
      axpy(acc, x[i] * y[j], geom.second_derivative(i, j));
    }
  }
  return geom.normal_part(acc);
}

Mat shape_operator(const PointGeometry& geom, const Vec& v) {
  const std::size_t k = geom.dim();
  Mat mform(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t jj = i; jj < k; ++jj) {
      const double val = dot(geom.normal_part(geom.second_derivative(i, jj)), v);
      mform(i, jj) = val;
      mform(jj, i) = val;
    }
  Mat a(k, k);
  for (std::size_t c = 0; c < k; ++c) {
    const Vec col = solve_sym(geom.induced_metric, mform.column(c));
    for (std::size_t r = 0; r < k; ++r) a(r, c) = col[r];
  }
  return a;
}

FrameDerivative frame_derivative(const PointGeometry& geom, const Vec& direction) {
  const std::size_t k = geom.dim();
  const std::size_t m = geom.ambient_dim();
  FrameDerivative fd;
  fd.direction = direction;
  fd.dF = Mat(m, k);
  for (std::size_t jj = 0; jj < k; ++jj) {
    Vec col(m, 0.0);
    for (std::size_t i = 0; i < k; ++i) axpy(col, direction[i], geom.second_derivative(i, jj));
    for (std::size_t c = 0; c < m; ++c) fd.dF(c, jj) = col[c];
  }
  const Mat& f = geom.jacobian;
  const Mat ft = f.transpose();
  const Mat dft = fd.dF.transpose();
  const Mat& ginv = geom.metric_inverse;
  fd.dG = dft * f + ft * fd.dF;
  fd.dGinv = -1.0 * (ginv * fd.dG * ginv);
  fd.dTanProj = fd.dF * ginv * ft + f * fd.dGinv * ft + f * ginv * dft;
  fd.christoffel = ginv * ft * fd.dF;
  return fd;
}

FieldSample eval_field(const ImmersionScenario& scn, const std::vector<Expr>& components, const Vec& point) {
  const std::size_t k = scn.dim();
  const Constants consts = scn.constants();
  const Point pt{scn.param_names, point};
  FieldSample s;
  s.value.resize(components.size());
  s.jacobian = Mat(components.size(), k);
  for (std::size_t c = 0; c < components.size(); ++c) {
    const Jet2 jet = eval_jet2(components[c], pt, consts);
    s.value[c] = jet.value();
    for (std::size_t i = 0; i < k; ++i) s.jacobian(c, i) = jet.grad(i);
  }
  return s;
}

VectorJet push_forward(const PointGeometry& geom, const FrameDerivative& fd, const VectorJet& coords) {
  return {geom.jacobian * coords.value, fd.dF * coords.value + geom.jacobian * coords.deriv};
}

VectorJet tangential_coords(const PointGeometry& geom, const FrameDerivative& fd, const VectorJet& ambient) {
  const Mat ft = geom.jacobian.transpose();
  const Vec ftw = ft * ambient.value;
  VectorJet out;
  out.value = geom.metric_inverse * ftw;
  out.deriv = fd.dGinv * ftw + geom.metric_inverse * (fd.dF.transpose() * ambient.value) +
              geom.metric_inverse * (ft * ambient.deriv);
  return out;
}

VectorJet normal_part(const PointGeometry& geom, const FrameDerivative& fd, const VectorJet& ambient) {
  return {geom.normal_part(ambient.value), geom.normal_part(ambient.deriv) - fd.dTanProj * ambient.value};
}

VectorJet apply(const Mat& a, const VectorJet& v) { return {a * v.value, a * v.deriv}; }

Vec tangent_connection(const PointGeometry&, const FrameDerivative& fd, const VectorJet& y_coords) {
  return y_coords.deriv + fd.christoffel * y_coords.value;
}

Vec normal_connection(const PointGeometry& geom, const FrameDerivative&, const VectorJet& v_ambient) {
  return geom.normal_part(v_ambient.deriv);
}

Vec tangent_connection(const ImmersionScenario& scn, const VectorField& x, const VectorField& y, const Vec& point) {
  const PointGeometry geom = frame_at(scn, point);
  const Vec xv = eval_field(scn, x, point).value;
  const FrameDerivative fd = frame_derivative(geom, xv);
  return tangent_connection(geom, fd, eval_field(scn, y, point).along(xv));
}

Vec normal_connection(const ImmersionScenario& scn, const VectorField& x, const AmbientField& v, const Vec& point) {
  const PointGeometry geom = frame_at(scn, point);
  const FieldSample vs = eval_field(scn, v, point);
  const double tangential = norm(geom.tangent_part(vs.value));
  if (tangential > 1e-8 * std::max(norm(vs.value), 1.0)) {
    throw NotNormalField("field is not normal at " + describe_point(point) + " (tangential part " +
                         std::to_string(tangential) + ")");
  }
  const Vec xv = eval_field(scn, x, point).value;
  const FrameDerivative fd = frame_derivative(geom, xv);
  return normal_connection(geom, fd, vs.along(xv));
}

OperatorJet tangential_operator(const PointGeometry& geom, const FrameDerivative& fd, const StructureOp& j) {
  const Mat& f = geom.jacobian;
  const Mat ft = f.transpose();
  const Mat& jm = j.matrix();
  const Mat jf = jm * f;
  const Mat ftjf = ft * jf;
  OperatorJet t;
  t.value = geom.metric_inverse * ftjf;
  t.deriv = fd.dGinv * ftjf + geom.metric_inverse * (fd.dF.transpose() * jf) + geom.metric_inverse * (ft * jm * fd.dF);
  return t;
}

}  // namespace metallab
