#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "metallab/expr.hpp"
#include "metallab/metallic.hpp"
#include "metallab/numlin.hpp"
#include "metallab/rng.hpp"

namespace metallab {

/// Tangent vector field as k coefficient expressions over the coordinate
/// frame d/du^1 .. d/du^k.
using VectorField = std::vector<Expr>;
/// Ambient-valued field as m component expressions.
using AmbientField = std::vector<Expr>;

struct DistributionSpec {
  std::string name;
  std::vector<VectorField> fields;

  std::size_t field_count() const { return fields.size(); }
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct SamplingPlan {
  std::size_t count = 200;
  std::uint64_t seed = 42;
};

/// Immersion f: U subset R^k -> (R^m, <.,.>, J) with named distributions.
struct ImmersionScenario {
  std::string name;
  std::vector<std::string> param_names;
  Constants extra_consts;
  std::vector<Expr> components;
  StructureOp structure;
  std::vector<DistributionSpec> distributions;
  std::vector<Interval> domain;
  SamplingPlan sampling;

  std::size_t dim() const { return param_names.size(); }
  std::size_t ambient_dim() const { return components.size(); }

  /// extra_consts plus p, q, sigma, sigma_bar from the structure.
  Constants constants() const;
  const DistributionSpec* distribution(std::string_view name) const;

  /// Checks k < m, matching dimensions and field lengths; throws Error.
  void validate() const;

  Vec sample_point(SampleRng& rng) const;
  /// `count` points drawn uniformly from the domain box, deterministic in seed.
  std::vector<Vec> sample_points(std::size_t count, std::uint64_t seed) const;
};

/// Immersion data at one parameter point.
struct PointGeometry {
  Vec point;
  Mat jacobian;                  // m x k
  std::vector<Vec> coord_frame;  // columns of the jacobian
  Subspace tangent;
  Subspace normal;
  Mat induced_metric;  // g_ij = <d_i f, d_j f>
  Mat metric_inverse;
  std::vector<Vec> hessians;  // d^2 f / du^i du^j at index i*k + j

  std::size_t dim() const { return coord_frame.size(); }
  std::size_t ambient_dim() const { return jacobian.rows(); }
  const Vec& second_derivative(std::size_t i, std::size_t j) const { return hessians[i * dim() + j]; }

  /// Ambient vector sum_i c^i d_i f.
  Vec to_ambient(const Vec& coords) const { return jacobian * coords; }
  /// Coordinate-frame coefficients of the tangential part of w.
  Vec tangent_coords(const Vec& w) const;
  Vec tangent_part(const Vec& w) const { return project(w, tangent); }
  Vec normal_part(const Vec& w) const { return project(w, normal); }
  /// Induced metric g(x, y) of coordinate vectors.
  double g(const Vec& x, const Vec& y) const { return dot(x, induced_metric * y); }
  double g_norm(const Vec& x) const;
  /// m x (m-k) matrix whose columns are the orthonormal normal basis.
  Mat normal_matrix() const { return normal.matrix(); }
};

/// Frame, metric and second derivatives at `point` from jets of the
/// components. Throws ImmersionDegenerate when the jacobian is rank
/// deficient.
PointGeometry frame_at(const ImmersionScenario& scn, const Vec& point);

/// T, N, t, n at a point. Tangent indices use the coordinate frame; normal
/// indices use the orthonormal normal basis of PointGeometry::normal.
struct InducedOps {
  Mat T;  // k x k
  Mat N;  // (m-k) x k
  Mat t;  // k x (m-k)
  Mat n;  // (m-k) x (m-k)
};

InducedOps induced_ops(const PointGeometry& geom, const StructureOp& j);

/// h(X, Y) as an ambient normal vector; X, Y are coordinate vectors.
Vec second_fundamental_form(const PointGeometry& geom, const Vec& x, const Vec& y);

/// A_V = G^{-1} M with M_ij = <h(d_i, d_j), V>. V is an ambient normal vector.
Mat shape_operator(const PointGeometry& geom, const Vec& v);

// ---------------------------------------------------------------------------
// Derivatives along a tangent direction X at the point.

/// Derivatives of frame quantities along the coordinate direction X.
struct FrameDerivative {
  Vec direction;
  Mat dF;     // D_X of the jacobian, m x k
  Mat dG;     // D_X of the induced metric
  Mat dGinv;  // D_X of its inverse
  Mat dTanProj;  // D_X of the tangent projector F G^{-1} F^T, m x m
  Mat christoffel;  // G^{-1} F^T dF; nabla_X y = D_X y + christoffel * y
};

FrameDerivative frame_derivative(const PointGeometry& geom, const Vec& direction);

/// A vector-valued quantity and its derivative along the current direction.
struct VectorJet {
  Vec value;
  Vec deriv;
};

/// Operator-valued counterpart of VectorJet.
struct OperatorJet {
  Mat value;
  Mat deriv;

  friend OperatorJet operator*(const OperatorJet& a, const OperatorJet& b) {
    return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
  }
  friend VectorJet operator*(const OperatorJet& a, const VectorJet& v) {
    return {a.value * v.value, a.deriv * v.value + a.value * v.deriv};
  }
};

/// Value and parameter jacobian (rows: components, cols: parameters) of a
/// list of expressions at a point.
struct FieldSample {
  Vec value;
  Mat jacobian;

  VectorJet along(const Vec& direction) const { return {value, jacobian * direction}; }
};

FieldSample eval_field(const ImmersionScenario& scn, const std::vector<Expr>& components, const Vec& point);

/// i_* Y as an ambient field: (F y, dF y + F dy).
VectorJet push_forward(const PointGeometry& geom, const FrameDerivative& fd, const VectorJet& coords);
/// Coordinates of the tangential part of an ambient field, with derivative.
VectorJet tangential_coords(const PointGeometry& geom, const FrameDerivative& fd, const VectorJet& ambient);
/// Normal part of an ambient field, with derivative.
VectorJet normal_part(const PointGeometry& geom, const FrameDerivative& fd, const VectorJet& ambient);
/// Constant linear map applied to an ambient field.
VectorJet apply(const Mat& a, const VectorJet& v);

/// Levi-Civita connection nabla_X Y in coordinates: tangential part of the
/// ambient derivative of i_* Y.
Vec tangent_connection(const PointGeometry& geom, const FrameDerivative& fd, const VectorJet& y_coords);
/// Normal connection nabla^perp_X V: normal part of the ambient derivative.
Vec normal_connection(const PointGeometry& geom, const FrameDerivative& fd, const VectorJet& v_ambient);

/// Expression-field forms. Only the value of X at the point matters.
Vec tangent_connection(const ImmersionScenario& scn, const VectorField& x, const VectorField& y, const Vec& point);
/// Throws NotNormalField when V(point) has a tangential part above 1e-8
/// (relative to max(|V|, 1)).
Vec normal_connection(const ImmersionScenario& scn, const VectorField& x, const AmbientField& v, const Vec& point);

/// T = G^{-1} F^T J F as an operator jet in coordinates.
OperatorJet tangential_operator(const PointGeometry& geom, const FrameDerivative& fd, const StructureOp& j);

}  // namespace metallab
