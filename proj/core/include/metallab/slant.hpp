#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metallab/geometry.hpp"

namespace metallab {

/// Angle thresholds for treating a computed slant angle as exactly 0 or pi/2,
/// and for angle constancy across samples and directions.
inline constexpr double kAngleTol = 1e-8;
/// Anti-invariance (|T Z| / |Z|) and distribution orthogonality thresholds.
inline constexpr double kAntiInvariantTol = 1e-9;
inline constexpr double kOrthogonalityTol = 1e-9;

/// Span of a distribution at one point, in coordinates and as an
/// orthonormal ambient subspace.
class DistributionFrame {
public:
  DistributionFrame(const PointGeometry& geom, std::vector<Vec> spanning);

  const std::vector<Vec>& spanning() const { return spanning_; }
  const Subspace& ambient() const { return ambient_; }
  std::size_t rank() const { return ambient_.rank(); }

  /// g-orthogonal projection of a coordinate vector onto the distribution.
  Vec project(const Vec& x) const;
  /// Norm of the part of x outside the distribution, relative to |x|_g.
  double outside_ratio(const Vec& x) const;

private:
  const PointGeometry* geom_;
  std::vector<Vec> spanning_;
  Subspace ambient_;
};

/// Coordinate values of the spanning fields of D at a point.
std::vector<Vec> distribution_vectors(const ImmersionScenario& scn, const DistributionSpec& d, const Vec& point);

struct SlantSample {
  Vec point;
  Vec direction;
  double cos_theta = 1.0;
  double theta = 0.0;
};

/// Angle between JX and the distribution. cos theta = |P_D JX| / |JX|; the
/// angle itself comes from atan2 of the outside and inside parts so that
/// angles near 0 keep full precision. Throws NotInDistribution when X has a
/// component outside D above 1e-9 (relative).
SlantSample slant_angle(const PointGeometry& geom, const InducedOps& ops, const DistributionFrame& d, const Vec& x);

struct LambdaFit {
  double lambda = 0.0;
  /// max over spanning X of |(P_D T)^2 X - lambda (p P_D T X + q X)| / |X|.
  double residual = 0.0;
};

/// Least-squares lambda in (P_D T)^2 X = lambda (p P_D T X + q X) over the
/// spanning vectors of D at one point.
LambdaFit slant_criterion(const PointGeometry& geom, const InducedOps& ops, const DistributionFrame& d, int p, int q);

enum class SlantKind { Slant, Invariant, AntiInvariant, NotSlant, Empty };
std::string to_string(SlantKind k);

struct SlantReport {
  std::string distribution;
  std::size_t rank = 0;
  std::vector<SlantSample> samples;
  double mean_theta = 0.0;
  double mean_cos_theta = 1.0;
  double max_deviation = 0.0;
  double lambda_fit = 0.0;
  double lambda_residual = 0.0;
  SlantKind verdict = SlantKind::Empty;
  std::string diagnostic;
};

/// Slant angles of D over the scenario's sample points, along each spanning
/// vector and two random combinations.
SlantReport slant_report(const ImmersionScenario& scn, const DistributionSpec& d);
SlantReport slant_report(const ImmersionScenario& scn, const DistributionSpec& d, const std::vector<Vec>& points);

enum class Classification { Invariant, AntiInvariant, Slant, SemiInvariant, ProperHemiSlant, BiSlant, Unclassified };
std::string to_string(Classification c);

struct HemiSlantDims {
  std::size_t slant = 0;   // dim D^theta
  std::size_t perp = 0;    // dim D^perp
  std::size_t mu = 0;      // dim of the invariant normal complement
};

struct HemiSlantVerdict {
  Classification classification = Classification::Unclassified;
  std::optional<double> theta;
  std::optional<double> theta_second;  // bi-slant only
  HemiSlantDims dims;
  double orthogonality_residual = 0.0;
  double anti_invariance_residual = 0.0;
  std::vector<SlantReport> reports;  // D1 then D2, when declared
  std::vector<std::string> diagnostics;

  /// Hemi-slant family with a usable slant angle: every classification
  /// except bi-slant and unclassified.
  bool is_hemi_slant() const {
    return classification != Classification::BiSlant && classification != Classification::Unclassified;
  }
};

/// Classifies using distributions named "D1" (slant candidate) and "D2"
/// (anti-invariant candidate) over the scenario's sample points.
HemiSlantVerdict classify(const ImmersionScenario& scn);

struct NormalSplit {
  std::size_t dim_n_slant = 0;  // dim N(D^theta)
  std::size_t dim_n_perp = 0;   // dim N(D^perp)
  std::size_t dim_mu = 0;
  double orthogonality_residual = 0.0;  // max |<NX, NZ>| over unit X in D1, Z in D2
  double mu_invariance_residual = 0.0;  // max |n w - P_mu n w| over the mu basis
  Subspace mu;                          // in normal-basis coordinates
};

NormalSplit normal_split(const PointGeometry& geom, const InducedOps& ops, const DistributionFrame& d1,
                         const DistributionFrame& d2);

}  // namespace metallab
