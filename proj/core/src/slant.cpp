#include "metallab/slant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "metallab/errors.hpp"

namespace metallab {

namespace {

constexpr double kMembershipTol = 1e-9;
constexpr double kImageTol = 1e-9;

Vec g_unit(const PointGeometry& geom, const Vec& x) {
  const double n = geom.g_norm(x);
  return n > 0.0 ? (1.0 / n) * x : x;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Orthonormal span of the nonnegligible vectors among `images`.
Subspace image_span(std::size_t dim, const std::vector<Vec>& images) {
  std::vector<Vec> kept;
  for (const auto& v : images) {
    if (norm(v) > kImageTol) kept.push_back(v);
  }
  return gram_schmidt(dim, kept, kImageTol);
}

}  // namespace

DistributionFrame::DistributionFrame(const PointGeometry& geom, std::vector<Vec> spanning)
    : geom_(&geom), spanning_(std::move(spanning)) {
  std::vector<Vec> amb;
  amb.reserve(spanning_.size());
  for (const auto& s : spanning_) amb.push_back(geom.to_ambient(s));
  ambient_ = gram_schmidt(geom.ambient_dim(), amb);
}

Vec DistributionFrame::project(const Vec& x) const {
  return geom_->tangent_coords(metallab::project(geom_->to_ambient(x), ambient_));
}

double DistributionFrame::outside_ratio(const Vec& x) const {
  const Vec amb = geom_->to_ambient(x);
  const double n = norm(amb);
  if (n == 0.0) return 0.0;
  return norm(amb - metallab::project(amb, ambient_)) / n;
}

std::vector<Vec> distribution_vectors(const ImmersionScenario& scn, const DistributionSpec& d, const Vec& point) {
  std::vector<Vec> out;
  out.reserve(d.fields.size());
  for (const auto& f : d.fields) out.push_back(eval_field(scn, f, point).value);
  return out;
}

SlantSample slant_angle(const PointGeometry& geom, const InducedOps& ops, const DistributionFrame& d, const Vec& x) {
  const double outside = d.outside_ratio(x);
  if (outside > kMembershipTol) {
    throw NotInDistribution("vector is not in the distribution (relative residual " + fmt(outside) + ")");
  }
  const Vec tx = ops.T * x;
  const Vec nx = ops.N * x;
  const Vec inside = d.project(tx);
  const Vec tan_out = tx - inside;
  const double in_norm = geom.g_norm(inside);
  const double out_sq = geom.g(tan_out, tan_out) + dot(nx, nx);
  const double out_norm = std::sqrt(std::max(out_sq, 0.0));
  const double jx_norm = std::sqrt(std::max(geom.g(tx, tx) + dot(nx, nx), 0.0));

  SlantSample s;
  s.point = geom.point;
  s.direction = x;
  s.cos_theta = jx_norm > 0.0 ? std::clamp(in_norm / jx_norm, 0.0, 1.0) : 1.0;
  s.theta = std::atan2(out_norm, in_norm);
  return s;
}

LambdaFit slant_criterion(const PointGeometry& geom, const InducedOps& ops, const DistributionFrame& d, int p, int q) {
  auto pdt = [&](const Vec& v) { return d.project(ops.T * v); };
  std::vector<std::pair<Vec, Vec>> pairs;
  double num = 0.0;
  double den = 0.0;
  for (const auto& raw : d.spanning()) {
    const double n = geom.g_norm(raw);
    if (n == 0.0) continue;
    const Vec x = (1.0 / n) * raw;
    const Vec a1 = pdt(x);
    const Vec lhs = pdt(a1);
    Vec rhs = static_cast<double>(p) * a1;
    axpy(rhs, static_cast<double>(q), x);
    num += geom.g(lhs, rhs);
    den += geom.g(rhs, rhs);
    pairs.emplace_back(lhs, rhs);
  }
  LambdaFit fit;
  fit.lambda = den > 0.0 ? num / den : 0.0;
  for (const auto& [lhs, rhs] : pairs) {
    Vec r = lhs;
    axpy(r, -fit.lambda, rhs);
    fit.residual = std::max(fit.residual, geom.g_norm(r));
  }
  return fit;
}

std::string to_string(SlantKind k) {
  switch (k) {
    case SlantKind::Slant: return "slant";
    case SlantKind::Invariant: return "invariant";
    case SlantKind::AntiInvariant: return "anti-invariant";
    case SlantKind::NotSlant: return "not-slant";
    case SlantKind::Empty: return "empty";
  }
  return "?";
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Invariant: return "invariant";
    case Classification::AntiInvariant: return "anti-invariant";
    case Classification::Slant: return "slant";
    case Classification::SemiInvariant: return "semi-invariant";
    case Classification::ProperHemiSlant: return "proper hemi-slant";
    case Classification::BiSlant: return "bi-slant";
    case Classification::Unclassified: return "unclassified";
  }
  return "?";
}

SlantReport slant_report(const ImmersionScenario& scn, const DistributionSpec& d) {
  return slant_report(scn, d, scn.sample_points(scn.sampling.count, scn.sampling.seed));
}

SlantReport slant_report(const ImmersionScenario& scn, const DistributionSpec& d, const std::vector<Vec>& points) {
  SlantReport rep;
  rep.distribution = d.name;
  const auto& prm = scn.structure.params();
  SampleRng rng = SampleRng::stream(scn.sampling.seed, 0x51a7);

  double num = 0.0;
  double den = 0.0;
  for (const auto& pt : points) {
    const PointGeometry geom = frame_at(scn, pt);
    const InducedOps ops = induced_ops(geom, scn.structure);
    const DistributionFrame frame(geom, distribution_vectors(scn, d, pt));
    rep.rank = std::max(rep.rank, frame.rank());
    if (frame.rank() == 0) continue;

    std::vector<Vec> dirs;
    for (const auto& s : frame.spanning()) {
      if (geom.g_norm(s) > 0.0) dirs.push_back(s);
    }
    for (int extra = 0; extra < 2 && frame.spanning().size() > 1; ++extra) {
      Vec comb(scn.dim(), 0.0);
      for (const auto& s : frame.spanning()) axpy(comb, rng.uniform(-1.0, 1.0), s);
      if (geom.g_norm(comb) > 1e-6) dirs.push_back(comb);
    }
    for (const auto& x : dirs) rep.samples.push_back(slant_angle(geom, ops, frame, x));

    const LambdaFit fit = slant_criterion(geom, ops, frame, prm.p, prm.q);
    rep.lambda_residual = std::max(rep.lambda_residual, fit.residual);
    // Pool the per-point fits with equal weight.
    num += fit.lambda;
    den += 1.0;
  }

  if (rep.samples.empty()) {
    rep.verdict = SlantKind::Empty;
    rep.diagnostic = "distribution has rank 0";
    return rep;
  }

  double sum = 0.0;
  double sum_cos = 0.0;
  for (const auto& s : rep.samples) {
    sum += s.theta;
    sum_cos += s.cos_theta;
  }
  rep.mean_theta = sum / static_cast<double>(rep.samples.size());
  rep.mean_cos_theta = sum_cos / static_cast<double>(rep.samples.size());
  for (const auto& s : rep.samples) rep.max_deviation = std::max(rep.max_deviation, std::fabs(s.theta - rep.mean_theta));
  rep.lambda_fit = den > 0.0 ? num / den : 0.0;

  if (rep.max_deviation >= kAngleTol) {
    rep.verdict = SlantKind::NotSlant;
    rep.diagnostic = "angle varies by " + fmt(rep.max_deviation) + " rad";
    return rep;
  }
  const double c = std::cos(rep.mean_theta);
  const double lambda_err = std::fabs(rep.lambda_fit - c * c);
  if (lambda_err >= kAngleTol || rep.lambda_residual >= kAngleTol) {
    rep.verdict = SlantKind::NotSlant;
    rep.diagnostic = "constant angle but (P T)^2 = lambda (p P T + q I) fails (lambda error " + fmt(lambda_err) +
                     ", residual " + fmt(rep.lambda_residual) + ")";
    return rep;
  }
  if (rep.mean_theta < kAngleTol) {
    rep.verdict = SlantKind::Invariant;
  } else if (std::fabs(rep.mean_theta - std::numbers::pi / 2) < kAngleTol) {
    rep.verdict = SlantKind::AntiInvariant;
  } else {
    rep.verdict = SlantKind::Slant;
  }
  return rep;
}

NormalSplit normal_split(const PointGeometry& geom, const InducedOps& ops, const DistributionFrame& d1,
                         const DistributionFrame& d2) {
  const std::size_t r = geom.ambient_dim() - geom.dim();
  auto images = [&](const DistributionFrame& d) {
    std::vector<Vec> out;
    for (const auto& s : d.spanning()) {
      if (geom.g_norm(s) > 0.0) out.push_back(ops.N * g_unit(geom, s));
    }
    return out;
  };
  const std::vector<Vec> im1 = images(d1);
  const std::vector<Vec> im2 = images(d2);

  NormalSplit ns;
  for (const auto& a : im1)
    for (const auto& b : im2) ns.orthogonality_residual = std::max(ns.orthogonality_residual, std::fabs(dot(a, b)));

  const Subspace s1 = image_span(r, im1);
  const Subspace s2 = image_span(r, im2);
  ns.dim_n_slant = s1.rank();
  ns.dim_n_perp = s2.rank();

  std::vector<Vec> both = s1.basis;
  both.insert(both.end(), s2.basis.begin(), s2.basis.end());
  const Subspace span = gram_schmidt(r, both, kImageTol);
  ns.mu = complement(span);
  ns.dim_mu = ns.mu.rank();
  for (const auto& w : ns.mu.basis) {
    const Vec nw = ops.n * w;
    ns.mu_invariance_residual = std::max(ns.mu_invariance_residual, norm(nw - project(nw, ns.mu)));
  }
  return ns;
}

HemiSlantVerdict classify(const ImmersionScenario& scn) {
  HemiSlantVerdict v;
  const DistributionSpec* d1 = scn.distribution("D1");
  const DistributionSpec* d2 = scn.distribution("D2");
  if (d1 == nullptr || d2 == nullptr) {
    v.diagnostics.push_back("scenario must declare distributions D1 and D2");
    return v;
  }

  const std::vector<Vec> points = scn.sample_points(scn.sampling.count, scn.sampling.seed);
  bool dims_set = false;
  bool dims_vary = false;
  bool span_ok = true;
  for (const auto& pt : points) {
    const PointGeometry geom = frame_at(scn, pt);
    const InducedOps ops = induced_ops(geom, scn.structure);
    const DistributionFrame f1(geom, distribution_vectors(scn, *d1, pt));
    const DistributionFrame f2(geom, distribution_vectors(scn, *d2, pt));

    if (f1.rank() + f2.rank() != scn.dim()) span_ok = false;
    for (const auto& a : f1.spanning())
      for (const auto& b : f2.spanning()) {
        const double na = geom.g_norm(a);
        const double nb = geom.g_norm(b);
        if (na > 0.0 && nb > 0.0)
          v.orthogonality_residual = std::max(v.orthogonality_residual, std::fabs(geom.g(a, b)) / (na * nb));
      }
    for (const auto& z : f2.spanning()) {
      const double nz = geom.g_norm(z);
      if (nz > 0.0) v.anti_invariance_residual = std::max(v.anti_invariance_residual, geom.g_norm(ops.T * z) / nz);
    }

    const NormalSplit ns = normal_split(geom, ops, f1, f2);
    const HemiSlantDims here{f1.rank(), f2.rank(), ns.dim_mu};
    if (!dims_set) {
      v.dims = here;
      dims_set = true;
    } else if (here.slant != v.dims.slant || here.perp != v.dims.perp || here.mu != v.dims.mu) {
      dims_vary = true;
    }
  }

  v.reports.push_back(slant_report(scn, *d1, points));
  v.reports.push_back(slant_report(scn, *d2, points));
  const SlantReport& r1 = v.reports[0];
  const SlantReport& r2 = v.reports[1];

  if (!span_ok) v.diagnostics.push_back("D1 and D2 do not span the tangent space at every sample");
  if (v.orthogonality_residual >= kOrthogonalityTol)
    v.diagnostics.push_back("D1 and D2 are not orthogonal (residual " + fmt(v.orthogonality_residual) + ")");
  if (dims_vary) v.diagnostics.push_back("distribution or normal-split dimensions vary across samples");
  if (!v.diagnostics.empty()) return v;

  const bool d2_anti = v.anti_invariance_residual < kAntiInvariantTol;
  if (d2_anti) {
    if (v.dims.slant == 0) {
      v.classification = Classification::AntiInvariant;
      v.theta = std::numbers::pi / 2;
      return v;
    }
    if (r1.verdict == SlantKind::NotSlant) {
      v.diagnostics.push_back("D1 is not slant: " + r1.diagnostic);
      return v;
    }
    v.theta = r1.mean_theta;
    if (r1.verdict == SlantKind::AntiInvariant) {
      v.classification = Classification::AntiInvariant;
    } else if (v.dims.perp == 0) {
      v.classification = r1.verdict == SlantKind::Invariant ? Classification::Invariant : Classification::Slant;
    } else {
      v.classification =
          r1.verdict == SlantKind::Invariant ? Classification::SemiInvariant : Classification::ProperHemiSlant;
    }
    return v;
  }

  v.diagnostics.push_back("D2 is not anti-invariant (max |TZ|/|Z| = " + fmt(v.anti_invariance_residual) + ")");
  const bool slant1 = r1.verdict != SlantKind::NotSlant && r1.verdict != SlantKind::Empty;
  const bool slant2 = r2.verdict != SlantKind::NotSlant && r2.verdict != SlantKind::Empty;
  if (slant1 && slant2) {
    v.classification = Classification::BiSlant;
    v.theta = r1.mean_theta;
    v.theta_second = r2.mean_theta;
    v.diagnostics.clear();
  } else {
    if (!slant1) v.diagnostics.push_back("D1: " + r1.diagnostic);
    if (!slant2) v.diagnostics.push_back("D2: " + r2.diagnostic);
  }
  return v;
}

}  // namespace metallab
