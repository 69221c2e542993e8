#include <doctest.h>

#include <cmath>

#include "fuchsian/cone_metric.hpp"
#include "support.hpp"

using namespace fuchsian;
using fuchsian::testing::Sampler;

namespace {
FuchsianGroup octagon(int K) { return groupFromPolygon(regularPolygon(2), K); }
} // namespace

TEST_SUITE_BEGIN("cone-metric");

TEST_CASE("law of cosines in the three geometries") {
  CHECK(triangleAngle(0, 1, 1, 1) == doctest::Approx(M_PI / 3).epsilon(1e-14));
  CHECK(triangleAngle(1, M_PI / 2, M_PI / 2, M_PI / 2) == doctest::Approx(M_PI / 2).epsilon(1e-14));
  CHECK(triangleAngle(-1, 1, 1, 1) < M_PI / 3); // hyperbolic thinness
  // symmetry in the adjacent sides and the degenerate limit
  CHECK(triangleAngle(0, 1.2, 0.8, 1.0) == doctest::Approx(triangleAngle(0, 0.8, 1.2, 1.0)));
  CHECK(std::abs(triangleAngle(0, 1, 1, 2 - 1e-13) - M_PI) < 1e-6);
  CHECK_THROWS_AS(static_cast<void>(triangleAngle(0, 1, 1, 2.5)), Error);
  CHECK_THROWS_AS(static_cast<void>(triangleAngle(1, 3.2, 1, 1)), Error);
}

TEST_CASE("induced metrics: angles, Gauss-Bonnet, oracle agreement") {
  Sampler s(91);
  for (int K : {0, 1, -1}) {
    CAPTURE(K);
    FuchsianGroup G = octagon(K);
    for (int n : {1, 2}) {
      CAPTURE(n);
      FuchsianPolyhedron P = fuchsian::testing::sampleHull(s, G, n);
      ConeMetric m = induceMetric(P);
      CHECK(m.tri.edgeCount() == 6 * 2 - 6 + 3 * n);
      Eigen::VectorXd alpha = coneAngles(m);
      for (int i = 0; i < n; i++) CHECK(alpha(i) > 2 * M_PI);
      CHECK(gaussBonnetResidual(m) < 1e-8);
      // the ambient-tangent oracle never sees the edge lengths
      Eigen::VectorXd oracle = fuchsian::testing::ambientConeAngles(P);
      CHECK((alpha - oracle).cwiseAbs().maxCoeff() < 1e-9);
      ValidationReport rep = validateConeMetric(m, &G);
      for (const auto& c : rep.checks) {
        CAPTURE(c.name);
        CHECK(c.pass);
      }
    }
  }
}

TEST_CASE("flat metric with one orbit has total angle 6pi") {
  Sampler s(7);
  FuchsianPolyhedron P = fuchsian::testing::sampleHull(s, octagon(0), 1);
  ConeMetric m = induceMetric(P);
  CHECK(coneAngles(m)(0) == doctest::Approx(6 * M_PI).epsilon(1e-10));
}

TEST_CASE("ep map matches the induced metric and respects the frozen order") {
  Sampler s(23);
  FuchsianPolyhedron P = fuchsian::testing::sampleHull(s, octagon(0), 1);
  ConeMetric m = induceMetric(P);
  Eigen::VectorXd ep = epMap(P.config, m.tri);
  CHECK((ep - m.squaredLengths()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(realizesTriangulation(P, m.tri));
  // permuting the triangulation's edges permutes the output exactly
  Triangulation Tperm = m.tri;
  std::swap(Tperm.edges[0], Tperm.edges[1]);
  Eigen::VectorXd ep2 = epMap(P.config, Tperm);
  CHECK(ep2(0) == ep(1));
  CHECK(ep2(1) == ep(0));
}

TEST_CASE("scaling invariance of flat angles") {
  Sampler s(5);
  FuchsianPolyhedron P = fuchsian::testing::sampleHull(s, octagon(0), 1);
  ConeMetric m = induceMetric(P);
  ConeMetric scaled = m;
  scaled.lengths *= 2.0;
  CHECK((coneAngles(scaled) - coneAngles(m)).cwiseAbs().maxCoeff() < 1e-12);
  ConeMetric shrunk = m;
  shrunk.lengths *= 0.1;
  CHECK(validateConeMetric(shrunk).pass());
}

TEST_CASE("isometry invariance of the edge length vector") {
  Sampler s(11);
  FuchsianPolyhedron P = fuchsian::testing::sampleHull(s, octagon(1), 1);
  ConeMetric m = induceMetric(P);
  // conjugate the whole configuration by a global isometry fixing c_K
  Eigen::Matrix3d R = hypRotation(0.83) * hypBoost(0.41) * hypRotation(-0.2);
  MarkedConfiguration cfg2 = P.config;
  FuchsianGroup G2 = cfg2.group;
  Eigen::Matrix3d J = Eigen::Vector3d(1, 1, -1).asDiagonal();
  for (auto& g : G2.generators) g = R * g * (J * R.transpose() * J);
  cfg2.group = G2;
  for (auto& p : cfg2.points) p = R * p;
  Eigen::VectorXd ep2 = epMap(cfg2, m.tri);
  Eigen::VectorXd sq = m.squaredLengths();
  double rel = 0;
  for (int i = 0; i < sq.size(); i++)
    rel = std::max(rel, std::abs(ep2(i) - sq(i)) / std::max(1.0, sq(i)));
  // exact in exact arithmetic; the conjugated frame carries the
  // cancellation noise of boost-heavy matrix products
  CHECK(rel < 1e-8);
}

TEST_CASE("a gadget with a flat vertex fails the curvature check") {
  // equilateral lengths give every corner angle pi/3 (triangle inequalities
  // trivially hold); a vertex with at most five corners then carries total
  // angle below 2pi
  Sampler s(29);
  bool found = false;
  for (int attempt = 0; attempt < 20 && !found; attempt++) {
    FuchsianPolyhedron P = fuchsian::testing::sampleHull(s, octagon(0), 2);
    ConeMetric m = induceMetric(P);
    REQUIRE(validateConeMetric(m).pass());
    int corners[2] = {0, 0};
    for (const auto& f : m.tri.faces)
      for (int k = 0; k < 3; k++) corners[f.v[k]]++;
    int flatVertex = corners[0] <= corners[1] ? 0 : 1;
    if (corners[flatVertex] > 5) continue;
    ConeMetric gadget = m;
    gadget.lengths.setConstant(1.0);
    ValidationReport rep = validateConeMetric(gadget);
    CHECK(rep.check("triangle-inequalities").pass);
    CHECK(coneAngles(gadget)(flatVertex) < 2 * M_PI);
    CHECK_FALSE(rep.check("negative-singular-curvature").pass);
    found = true;
  }
  CHECK(found);
}

TEST_CASE("triangulation validation rejects inconsistent data") {
  Triangulation t;
  t.genus = 2;
  t.n = 1;
  t.faces.resize(4);
  t.edges.resize(6);
  CHECK_THROWS_AS(t.validate(), Error);
}

TEST_SUITE_END();
