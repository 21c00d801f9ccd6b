#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metallab/geometry.hpp"
#include "metallab/report.hpp"
#include "metallab/slant.hpp"

namespace metallab {

enum class CheckId {
  E7_SYM,
  E8_ADJ,
  E99,
  E100,
  E9E10_PRODUCT,
  E12_SHAPE,
  E16_NABLA_T_SYM,
  E17i,
  E17ii,
  E18i,
  E18ii,
  E19_DUALITY,
  E20_BRACKET_T,
  E21_BRACKET_N,
  E26,
  E27,
  E28,
  E28_RECOVERY,
  E29_DERIV,
  E30_DTHETA_CLOSED,
  E31_ANTIINV_SHAPE,
  E32_NABLA_SYM,
  E33_SHAPE_COMM,
  E34_EQUIV,
  E35_EIGEN,
  DTHETA_INTEGRABLE,
  DPERP_INTEGRABLE,
  MIXED_GEODESIC,
  TOTALLY_GEODESIC_VANISH,
};

/// What a check needs from the scenario before it can run.
enum class Requirement {
  None,
  HemiSlant,       // hemi-slant family verdict with a D1 of positive rank
  AntiInvariant,   // a declared D2 of positive rank
  ProperHemiSlant,
  Classified,      // D1 and D2 declared; any classification except unclassified
};

struct CheckInfo {
  CheckId id;
  std::string_view name;
  std::string_view formula;
  double tolerance;
  Requirement requirement;
};

/// Every check, in CheckId order.
std::span<const CheckInfo> all_checks();
const CheckInfo& check_info(CheckId id);
std::string_view to_string(CheckId id);
std::optional<CheckId> parse_check_id(std::string_view name);
/// Comma-separated ids, or "all". Throws Error naming an unknown id.
std::vector<CheckId> parse_check_list(std::string_view list);

/// Coordinate Lie bracket [X,Y]^k = X^i d_i Y^k - Y^i d_i X^k.
Vec lie_bracket(const ImmersionScenario& scn, const VectorField& x, const VectorField& y, const Vec& point);

// Covariant derivatives of the induced operators along fd.direction. Tangent
// inputs are coordinate jets; normal inputs are ambient jets of normal fields.
// Results are coordinates (T, t) or ambient normal vectors (N, n).
Vec cov_deriv_T(const PointGeometry& geom, const FrameDerivative& fd, const StructureOp& j, const VectorJet& y);
Vec cov_deriv_N(const PointGeometry& geom, const FrameDerivative& fd, const StructureOp& j, const VectorJet& y);
Vec cov_deriv_t(const PointGeometry& geom, const FrameDerivative& fd, const StructureOp& j, const VectorJet& v);
Vec cov_deriv_n(const PointGeometry& geom, const FrameDerivative& fd, const StructureOp& j, const VectorJet& v);

Vec cov_deriv_T(const ImmersionScenario& scn, const VectorField& x, const VectorField& y, const Vec& point);
Vec cov_deriv_N(const ImmersionScenario& scn, const VectorField& x, const VectorField& y, const Vec& point);
/// v is an ambient field that must be normal at the point.
Vec cov_deriv_t(const ImmersionScenario& scn, const VectorField& x, const AmbientField& v, const Vec& point);
Vec cov_deriv_n(const ImmersionScenario& scn, const VectorField& x, const AmbientField& v, const Vec& point);

/// Roots of x^2 - p cos^2(theta) x - q cos^2(theta), larger first.
std::pair<double, double> eigen_roots(int p, int q, double cos_theta);

/// Runs one check. Throws PreconditionNotMet when the scenario lacks the
/// structure the check needs.
CheckReport run_check(CheckId id, const ImmersionScenario& scn, std::size_t samples, std::uint64_t seed);

/// Runs the listed checks (deduplicated, in CheckId order), reporting unmet
/// preconditions as skipped. `verdict` may be passed to reuse a classification.
std::vector<CheckReport> run_suite(const ImmersionScenario& scn, std::span<const CheckId> ids, std::size_t samples,
                                   std::uint64_t seed, const HemiSlantVerdict* verdict = nullptr);

}  // namespace metallab
