#include <doctest.h>

#include <cmath>
#include <numbers>

#include "metallab/errors.hpp"
#include "metallab/slant.hpp"
#include "support/scenarios.hpp"

using namespace metallab;
using metallab::testing::builtin;
using metallab::testing::from_text;
using metallab::testing::plane_text;

namespace {

struct At {
  PointGeometry geom;
  InducedOps ops;
};

At at(const ImmersionScenario& scn, const Vec& p) {
  At a{frame_at(scn, p), {}};
  a.ops = induced_ops(a.geom, scn.structure);
  return a;
}

DistributionFrame frame_of(const ImmersionScenario& scn, const PointGeometry& geom, std::string_view name) {
  return {geom, distribution_vectors(scn, *scn.distribution(name), geom.point)};
}

}  // namespace

TEST_SUITE("slant") {

TEST_CASE("example1 slant angle at t = pi/4") {
  const auto scn = builtin("example1");
  const auto a = at(scn, {1.2, 0.3});
  const auto d1 = frame_of(scn, a.geom, "D1");
  const auto s = slant_angle(a.geom, a.ops, d1, {1, 0});
  CHECK(s.cos_theta == doctest::Approx(1 / std::sqrt(6.0)).epsilon(1e-14));
  CHECK(s.theta == doctest::Approx(std::acos(1 / std::sqrt(6.0))).epsilon(1e-14));

  const auto fit = slant_criterion(a.geom, a.ops, d1, 1, 1);
  CHECK(fit.lambda == doctest::Approx(1.0 / 6).epsilon(1e-13));
  CHECK(fit.residual < 1e-10);
}

TEST_CASE("closed form across p, q and t") {
  for (int p = 1; p <= 3; ++p)
    for (int q = 1; q <= 3; ++q)
      for (double t : {0.3, 0.7, 1.1}) {
        const auto scn = from_text(cli::surface_r4_text(p, q, std::to_string(t)));
        const auto a = at(scn, {0.8, 0.1});
        const auto prm = scn.structure.params();
        const double c2 = std::cos(t) * std::cos(t), s2 = std::sin(t) * std::sin(t);
        const double expect = std::fabs(prm.sigma * c2 + prm.sigma_bar * s2) /
                              std::sqrt(prm.sigma * prm.sigma * c2 + prm.sigma_bar * prm.sigma_bar * s2);
        const auto got = slant_angle(a.geom, a.ops, frame_of(scn, a.geom, "D1"), {1, 0});
        CHECK(got.cos_theta == doctest::Approx(expect).epsilon(1e-12));
      }
}

TEST_CASE("anti-invariant direction gives pi/2") {
  const auto scn = builtin("example1");
  const auto a = at(scn, {2, 1});
  const auto s = slant_angle(a.geom, a.ops, frame_of(scn, a.geom, "D2"), {0, 1});
  CHECK(s.theta == std::numbers::pi / 2);
  CHECK(s.cos_theta < 1e-15);
}

TEST_CASE("angle is scale invariant") {
  const auto scn = builtin("example2");
  const auto a = at(scn, {1, 0.5, -0.5});
  const auto d1 = frame_of(scn, a.geom, "D1");
  const double ref = slant_angle(a.geom, a.ops, d1, {1, 0, 0}).theta;
  for (double s : {1e-6, 0.25, -3.0, 1e6}) CHECK(slant_angle(a.geom, a.ops, d1, {s, 0, 0}).theta == doctest::Approx(ref));
}

TEST_CASE("direction outside the distribution") {
  const auto scn = builtin("example1");
  const auto a = at(scn, {1, 1});
  CHECK_THROWS_AS(slant_angle(a.geom, a.ops, frame_of(scn, a.geom, "D1"), {1, 1e-6}), NotInDistribution);
}

TEST_CASE("invariant case gives lambda = 1") {
  const auto scn = builtin("example1-jbar");
  const auto a = at(scn, {1, 1});
  const auto d1 = frame_of(scn, a.geom, "D1");
  CHECK(slant_angle(a.geom, a.ops, d1, {1, 0}).theta == 0.0);
  CHECK(slant_criterion(a.geom, a.ops, d1, 1, 1).lambda == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("slant reports") {
  const auto scn = builtin("example2");
  const auto r1 = slant_report(scn, *scn.distribution("D1"));
  CHECK(r1.verdict == SlantKind::Slant);
  CHECK(r1.rank == 1);
  CHECK(r1.max_deviation < 1e-12);
  CHECK(r1.lambda_fit == doctest::Approx(r1.mean_cos_theta * r1.mean_cos_theta).epsilon(1e-12));
  const auto r2 = slant_report(scn, *scn.distribution("D2"));
  CHECK(r2.verdict == SlantKind::AntiInvariant);
  CHECK(r2.rank == 2);
}

TEST_CASE("non-constant angle is not slant") {
  const auto scn = from_text(plane_text("\"sigma\", \"sigma_bar\", \"sigma\", \"sigma_bar\"",
                                        "\"u*cos(v)\", \"u*sin(v)\", \"v\", \"0\"")
                             + "[sampling]\ncount = 30\nseed = 1\n");
  const auto r = slant_report(scn, *scn.distribution("D1"));
  CHECK(r.verdict == SlantKind::NotSlant);
  CHECK(r.max_deviation > 1e-3);
}

TEST_CASE("classification") {
  const auto e1 = classify(builtin("example1"));
  CHECK(e1.classification == Classification::ProperHemiSlant);
  REQUIRE(e1.theta);
  CHECK(*e1.theta == doctest::Approx(std::acos(1 / std::sqrt(6.0))).epsilon(1e-12));
  CHECK(e1.dims.slant == 1);
  CHECK(e1.dims.perp == 1);
  CHECK(e1.dims.mu == 0);
  CHECK(to_string(e1.classification) == "proper hemi-slant");

  const auto e2 = classify(builtin("example2"));
  CHECK(e2.classification == Classification::ProperHemiSlant);
  CHECK(e2.dims.slant == 1);
  CHECK(e2.dims.perp == 2);
  CHECK(e2.dims.mu == 1);

  for (auto name : {"example1-jbar", "example2-jbar"}) {
    const auto v = classify(builtin(name));
    CHECK(v.classification == Classification::SemiInvariant);
    REQUIRE(v.theta);
    CHECK(*v.theta < 1e-10);
  }

  const auto para = classify(builtin("paraboloid"));
  CHECK(para.classification == Classification::Unclassified);
  CHECK_FALSE(para.diagnostics.empty());
}

TEST_CASE("classification rejects non-orthogonal distributions") {
  const std::string text = plane_text("\"sigma\", \"sigma_bar\", \"sigma\", \"sigma_bar\"");
  const auto skew = from_text(text.substr(0, text.find("[distributions]")) +
                              "[distributions]\nD1 = [[\"1\", \"0\"]]\nD2 = [[\"1\", \"1\"]]\n");
  const auto v = classify(skew);
  CHECK(v.classification == Classification::Unclassified);
  CHECK(v.orthogonality_residual > 0.1);
}

TEST_CASE("normal split dimensions") {
  for (auto [name, slant, perp, mu] : {std::tuple{"example1", 1, 1, 0}, std::tuple{"example2", 1, 2, 1}}) {
    const auto scn = builtin(name);
    const auto a = at(scn, scn.sample_points(1, 3)[0]);
    const auto ns = normal_split(a.geom, a.ops, frame_of(scn, a.geom, "D1"), frame_of(scn, a.geom, "D2"));
    CHECK(ns.dim_n_slant == std::size_t(slant));
    CHECK(ns.dim_n_perp == std::size_t(perp));
    CHECK(ns.dim_mu == std::size_t(mu));
    CHECK(ns.orthogonality_residual < 1e-12);
    CHECK(ns.mu_invariance_residual < 1e-12);
  }

  const auto scalar = from_text(plane_text("\"sigma\", \"sigma\", \"sigma\", \"sigma\""));
  const auto a = at(scalar, {0.1, 0.2});
  const auto ns = normal_split(a.geom, a.ops, frame_of(scalar, a.geom, "D1"), frame_of(scalar, a.geom, "D2"));
  CHECK(ns.dim_n_slant == 0);
  CHECK(ns.dim_n_perp == 0);
  CHECK(ns.dim_mu == 2);
}

}
