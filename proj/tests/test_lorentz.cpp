#include <doctest.h>

#include <cmath>
#include <random>

#include "fuchsian/lorentz.hpp"
#include "fuchsian/polygon.hpp"

using namespace fuchsian;

namespace {

std::mt19937_64 rng(12345);

double unif(double a, double b) {
  std::uniform_real_distribution<double> d(a, b);
  return d(rng);
}

// random element of SO+(2,1) as a product of rotations and a boost
Eigen::Matrix3d randomSO21() {
  return hypRotation(unif(0, 2 * M_PI)) * hypBoost(unif(-1.5, 1.5)) *
         hypRotation(unif(0, 2 * M_PI));
}

Eigen::Vector3d randomHyperboloid(double maxR = 1.5) {
  return hypPolar(unif(0, maxR), unif(0, 2 * M_PI));
}

SpaceformPoint randomConePoint(Space s) {
  double h = s == Space::AntiDeSitter3 ? unif(0.1, 1.4) : unif(0.1, 2.0);
  return liftFromHyperboloid(curvatureOf(s), randomHyperboloid(), h);
}

} // namespace

TEST_SUITE_BEGIN("lorentz");

TEST_CASE("inner product on the flat ambient spaces") {
  Signature r41{3, 1}, r31{2, 1};
  AmbientVector c1(Eigen::Vector4d(1, 0, 0, 0), r41);
  CHECK(innerProduct(c1, c1) == doctest::Approx(1.0).epsilon(1e-15));

  AmbientVector tz(Eigen::Vector3d(0, 0, 1), r31);
  CHECK(innerProduct(tz, tz) == doctest::Approx(-1.0).epsilon(1e-15));

  AmbientVector u(Eigen::Vector3d(1, 2, 3), r31), v(Eigen::Vector3d(4, 5, 6), r31);
  CHECK(innerProduct(u, v) == doctest::Approx(-4.0).epsilon(1e-15));

  CHECK_THROWS_AS(innerProduct(c1, u), Error);
}

TEST_CASE("separation classes and lengths") {
  auto ds = Space::DeSitter3;
  auto x = cPoint(ds);
  auto y = SpaceformPoint::make(ds, Eigen::Vector4d(std::cosh(1.0), 0, 0, std::sinh(1.0)));
  auto s = separation(x, y);
  CHECK(s.cls == SeparationClass::Timelike);
  CHECK(s.length == doctest::Approx(1.0).epsilon(1e-12));

  auto ads = Space::AntiDeSitter3;
  double theta = 0.7;
  auto a = cPoint(ads);
  auto b = SpaceformPoint::make(ads, Eigen::Vector4d(0, 0, std::sin(theta), std::cos(theta)));
  auto t = separation(a, b);
  CHECK(t.cls == SeparationClass::Timelike);
  CHECK(t.length == doctest::Approx(theta).epsilon(1e-12));

  auto mk = Space::Minkowski3;
  auto m0 = SpaceformPoint::make(mk, Eigen::Vector3d(0, 0, 0));
  auto m1 = SpaceformPoint::make(mk, Eigen::Vector3d(0, 0, 2));
  auto u = separation(m0, m1);
  CHECK(u.cls == SeparationClass::Timelike);
  CHECK(u.length == doctest::Approx(2.0).epsilon(1e-14));

  // symmetry and coincidence
  auto s2 = separation(y, x);
  CHECK(s2.length == doctest::Approx(s.length).epsilon(1e-14));
  CHECK(separation(y, y).cls == SeparationClass::Coincident);

  // no spacelike geodesic to the antipode region
  auto anti = SpaceformPoint::make(ds, Eigen::Vector4d(-1.5, 0, 0, std::sqrt(1.25)));
  CHECK_THROWS_WITH_AS(static_cast<void>(separation(x, anti)),
                       doctest::Contains("antipodal-or-beyond"), Error);
}

TEST_CASE("exp map stays on the quadric") {
  auto ds = Space::DeSitter3;
  auto c1 = cPoint(ds);
  AmbientVector v(Eigen::Vector4d(0, 0, 0, 1), ambientSignature(ds));
  for (double t : {0.3, 1.0, 2.5}) {
    auto p = expMap(c1, v, t);
    CHECK(p.coords()(0) == doctest::Approx(std::cosh(t)).epsilon(1e-14));
    CHECK(p.coords()(3) == doctest::Approx(std::sinh(t)).epsilon(1e-14));
  }

  auto mk = Space::Minkowski3;
  auto o = SpaceformPoint::make(mk, Eigen::Vector3d(0, 0, 1));
  AmbientVector w(Eigen::Vector3d(0, 0, 1), ambientSignature(mk));
  auto q = expMap(o, w, 2.0);
  CHECK(q.coords()(2) == doctest::Approx(3.0).epsilon(1e-14));

  auto ads = Space::AntiDeSitter3;
  AmbientVector e1(Eigen::Vector4d(1, 0, 0, 0), ambientSignature(ads));
  auto r = expMap(cPoint(ads), e1, 0.8);
  CHECK(r.coords()(0) == doctest::Approx(std::sinh(0.8)).epsilon(1e-14));
  CHECK(r.coords()(3) == doctest::Approx(std::cosh(0.8)).epsilon(1e-14));
  CHECK(formProduct(ads, r.coords(), r.coords()) == doctest::Approx(-1.0).epsilon(1e-12));

  // non-tangent direction is rejected
  AmbientVector bad(Eigen::Vector4d(0.5, 0, 0, 0), ambientSignature(ds));
  CHECK_THROWS_AS(static_cast<void>(expMap(c1, bad, 1.0)), Error);
}

TEST_CASE("projection to O_K") {
  auto mk = Space::Minkowski3;
  auto p = projectToOK(SpaceformPoint::make(mk, Eigen::Vector3d(0, 0, 3)));
  CHECK((p.coords().head<3>() - Eigen::Vector3d(0, 0, 1)).norm() < 1e-14);

  auto ds = Space::DeSitter3;
  auto q = projectToOK(SpaceformPoint::make(ds, Eigen::Vector4d(std::cosh(2.0), 0, 0, std::sinh(2.0))));
  CHECK(q.coords()(0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK(q.coords()(3) == doctest::Approx(1.0).epsilon(1e-13));

  // idempotence
  auto q2 = projectToOK(q);
  CHECK((q2.coords() - q.coords()).cwiseAbs().maxCoeff() < 1e-13);

  CHECK_THROWS_AS(static_cast<void>(projectToOK(cPoint(ds))), Error);
}

TEST_CASE("model maps: dilation, inversion, infinity") {
  // timelike distance nu from c_1 maps to tanh(nu)
  for (double nu : {0.4, 1.0, 1.7}) {
    auto x = liftFromHyperboloid(1, randomHyperboloid(), nu);
    auto y = modelMap(ModelKind::MinkFromDeSitter, x);
    auto img = SpaceformPoint::make(Space::Minkowski3, Eigen::Vector4d(y.v));
    double d = separation(img, cPoint(Space::Minkowski3)).length;
    CHECK(d == doctest::Approx(std::tanh(nu)).epsilon(1e-12));
  }
  // distance theta from c_-1 maps to tan(theta)
  {
    auto x = liftFromHyperboloid(-1, randomHyperboloid(), M_PI / 4);
    auto y = modelMap(ModelKind::MinkFromAdS, x);
    auto img = SpaceformPoint::make(Space::Minkowski3, Eigen::Vector4d(y.v));
    CHECK(separation(img, cPoint(Space::Minkowski3)).length == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Klein sends c_1 to infinity
  CHECK_THROWS_WITH_AS(static_cast<void>(modelMap(ModelKind::Klein, cPoint(Space::DeSitter3))),
                       doctest::Contains("at-infinity"), Error);

  // unmap inverts map on sampled domain points
  for (int i = 0; i < 50; i++) {
    for (auto kind : {ModelKind::MinkFromDeSitter, ModelKind::MinkFromAdS,
                      ModelKind::SecondMinkFromAdS, ModelKind::Klein}) {
      Space s = kind == ModelKind::MinkFromDeSitter ? Space::DeSitter3 : Space::AntiDeSitter3;
      if (kind == ModelKind::Klein) s = Space::DeSitter3;
      auto x = randomConePoint(s);
      auto y = modelMap(kind, x);
      auto back = modelUnmap(kind, y);
      CHECK((back.coords() - x.coords()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("model maps send geodesics to straight segments") {
  for (auto kind : {ModelKind::MinkFromDeSitter, ModelKind::MinkFromAdS,
                    ModelKind::SecondMinkFromAdS, ModelKind::Klein}) {
    Space s = kind == ModelKind::MinkFromDeSitter || kind == ModelKind::Klein
                  ? Space::DeSitter3
                  : Space::AntiDeSitter3;
    int done = 0;
    while (done < 100) {
      auto x = randomConePoint(s);
      // random unit spacelike tangent at x
      Eigen::Vector4d u = Eigen::Vector4d::Random();
      Eigen::Vector4d jd = formDiag(s);
      const Eigen::Vector4d& p = x.coords();
      double xa = formProduct(s, p, p);
      u -= (formProduct(s, u, p) / xa) * p;
      double q = formProduct(s, u, u);
      if (std::abs(q) < 1e-3) continue;
      u /= std::sqrt(std::abs(q));
      AmbientVector v(u, ambientSignature(s));
      try {
        double t1 = 0.08, t2 = 0.17;
        Eigen::Vector3d a = modelMap(kind, x).head3();
        Eigen::Vector3d b = modelMap(kind, expMap(x, v, t1)).head3();
        Eigen::Vector3d c = modelMap(kind, expMap(x, v, t2)).head3();
        Eigen::Vector3d ab = b - a, ac = c - a;
        double res = ab.cross(ac).norm() / std::max(1e-12, ab.norm() * ac.norm());
        CHECK(res < 1e-9);
        done++;
      } catch (const Error&) {
        continue; // sample left the model chart
      }
      (void)jd;
    }
  }
}

TEST_CASE("duality is an involution exchanging points and planes") {
  for (int i = 0; i < 50; i++) {
    auto h = SpaceformPoint::make(
        Space::Hyperbolic3,
        Eigen::Vector4d(unif(-1, 1), unif(-1, 1), unif(-1, 1), unif(1.5, 3.0)));
    // dual of an H^3 point is a spacelike dS plane (timelike normal), and
    // dual of that plane returns the point
    auto plane = dualOfPoint(h);
    CHECK(formProduct(Space::DeSitter3, plane.normal, plane.normal) < 0);
    auto back = dualOfPlane(plane);
    CHECK(back.space == Space::Hyperbolic3);
    CHECK((back.coords() - h.coords()).cwiseAbs().maxCoeff() < 1e-10);
    // and the other way around for a dS point
    auto q = randomConePoint(Space::DeSitter3);
    auto qPlane = dualOfPoint(q);
    CHECK(formProduct(Space::DeSitter3, qPlane.normal, qPlane.normal) > 0);
    auto qBack = dualOfPlane(qPlane);
    CHECK(qBack.space == Space::DeSitter3);
    CHECK((qBack.coords() - q.coords()).cwiseAbs().maxCoeff() < 1e-10);
  }
  // dual of c_1 is the hyperbolic plane {x1 = 0}
  auto p = dualOfPoint(cPoint(Space::DeSitter3));
  CHECK((p.normal - Eigen::Vector4d(1, 0, 0, 0)).cwiseAbs().maxCoeff() < 1e-15);

  OrientedPlane lightlike{Eigen::Vector4d(1, 0, 0, 1)};
  CHECK_THROWS_AS(static_cast<void>(dualOfPlane(lightlike)), Error);
}

TEST_CASE("isometry extension fixes c_K and commutes with the model maps") {
  for (int K : {-1, 0, 1}) {
    auto id = extendIsometry(Eigen::Matrix3d::Identity(), K);
    CHECK(id.linear.isApprox(Eigen::Matrix4d::Identity()));
    for (int i = 0; i < 20; i++) {
      Eigen::Matrix3d m = randomSO21();
      Isometry f = extendIsometry(m, K);
      if (K != 0) {
        auto c = cPoint(spaceOfCurvature(K));
        CHECK((f.applyRaw(c.coords()) - c.coords()).cwiseAbs().maxCoeff() < 1e-15);
      }
      // quadric preservation on random points
      auto x = randomConePoint(spaceOfCurvature(K));
      auto fx = f.apply(x);
      CHECK(quadricResidual(fx.space, fx.coords()) < 1e-10);
      // commutation with the projective map, K != 0
      if (K != 0) {
        ModelKind kind = K == 1 ? ModelKind::MinkFromDeSitter : ModelKind::MinkFromAdS;
        Eigen::Vector3d lhs = modelMap(kind, fx).head3();
        Eigen::Vector3d rhs = m * modelMap(kind, x).head3();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }
  Eigen::Matrix3d notIso = Eigen::Matrix3d::Identity() * 1.1;
  CHECK_THROWS_AS(static_cast<void>(extendIsometry(notIso, 0)), Error);
}

TEST_CASE("equivariance of the projection p_K") {
  for (int K : {-1, 0, 1}) {
    for (int i = 0; i < 20; i++) {
      Eigen::Matrix3d m = randomSO21();
      Isometry f = extendIsometry(m, K);
      auto x = randomConePoint(spaceOfCurvature(K));
      auto lhs = projectToOK(f.apply(x));
      auto rhs = f.apply(projectToOK(x));
      CHECK((lhs.coords() - rhs.coords()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("constant distance surface forms") {
  double nu = 0.8;
  auto [i1, ii1] = constantDistanceForms(1, nu);
  CHECK(i1 == doctest::Approx(std::sinh(nu) * std::sinh(nu)).epsilon(1e-15));
  CHECK(ii1 == doctest::Approx(std::cosh(nu) * std::sinh(nu)).epsilon(1e-15));

  double th = 0.6;
  auto [i2, ii2] = constantDistanceForms(-1, th);
  CHECK(ii2 / i2 == doctest::Approx(1.0 / std::tan(th)).epsilon(1e-13));

  auto [i0, ii0] = constantDistanceForms(0, 1.0);
  CHECK(i0 == doctest::Approx(1.0));
  CHECK(ii0 == doctest::Approx(1.0));

  CHECK_THROWS_AS(static_cast<void>(constantDistanceForms(-1, 2.0)), Error);
}

TEST_CASE("hyperboloid lifts and radial directions") {
  for (int K : {-1, 0, 1}) {
    for (int i = 0; i < 20; i++) {
      Eigen::Vector3d y = randomHyperboloid();
      double h = K == -1 ? unif(0.05, 1.5) : unif(0.05, 2.5);
      auto x = liftFromHyperboloid(K, y, h);
      CHECK(distanceFromCenter(x) == doctest::Approx(h).epsilon(1e-11));
      auto [y2, h2] = hyperboloidCoords(x);
      CHECK((y2 - y).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(h2 == doctest::Approx(h).epsilon(1e-11));
      if (K != 0) {
        Eigen::Vector4d r = radialUnit(x);
        Space s = x.space;
        CHECK(formProduct(s, r, r) == doctest::Approx(-1.0).epsilon(1e-10));
        CHECK(std::abs(formProduct(s, r, x.coords())) < 1e-10);
      }
    }
  }
}

TEST_SUITE_END();
