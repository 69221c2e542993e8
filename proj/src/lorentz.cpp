#include "fuchsian/lorentz.hpp"

#include <cmath>

#include "fuchsian/log.hpp"

namespace fuchsian {

namespace {
constexpr double kConstructTol = 1e-12;
constexpr double kCheckTol = 1e-10;
constexpr double kBoundaryClamp = 1e-9;
constexpr double kInfinityTol = 1e-12;
} // namespace

const char* spaceName(Space s) {
  switch (s) {
    case Space::Minkowski3: return "minkowski3";
    case Space::DeSitter3: return "desitter3";
    case Space::AntiDeSitter3: return "antidesitter3";
    case Space::Hyperbolic3: return "hyperbolic3";
  }
  return "?";
}

int ambientDim(Space s) { return s == Space::Minkowski3 ? 3 : 4; }

int curvatureOf(Space s) {
  switch (s) {
    case Space::Minkowski3: return 0;
    case Space::DeSitter3: return 1;
    case Space::AntiDeSitter3: return -1;
    case Space::Hyperbolic3: break;
  }
  throw Error("bad-space", "Hyperbolic3 is not a Lorentzian space-form");
}

Space spaceOfCurvature(int K) {
  switch (K) {
    case 0: return Space::Minkowski3;
    case 1: return Space::DeSitter3;
    case -1: return Space::AntiDeSitter3;
  }
  throw Error("bad-curvature", "K must be in {-1,0,1}");
}

Signature ambientSignature(Space s) {
  switch (s) {
    case Space::Minkowski3: return {2, 1};
    case Space::DeSitter3: return {3, 1};
    case Space::Hyperbolic3: return {3, 1};
    case Space::AntiDeSitter3: return {2, 2};
  }
  return {};
}

Eigen::Vector4d formDiag(Signature s) {
  Eigen::Vector4d d = Eigen::Vector4d::Zero();
  for (int i = 0; i < s.dim(); i++) d(i) = i < s.plus ? 1.0 : -1.0;
  return d;
}

Eigen::Vector4d formDiag(Space s) { return formDiag(ambientSignature(s)); }

double formProduct(Space s, const Eigen::Vector4d& u, const Eigen::Vector4d& w) {
  return u.cwiseProduct(formDiag(s)).dot(w);
}

double innerProduct(const AmbientVector& u, const AmbientVector& w) {
  if (!(u.sig == w.sig)) throw Error("signature-mismatch", "inner product needs equal signatures");
  return u.v.cwiseProduct(formDiag(u.sig)).dot(w.v);
}

namespace {

// Target value of <x,x> on each quadric; Minkowski has none.
double quadricTarget(Space s) {
  switch (s) {
    case Space::DeSitter3: return 1.0;
    case Space::AntiDeSitter3: return -1.0;
    case Space::Hyperbolic3: return -1.0;
    case Space::Minkowski3: break;
  }
  throw Error("bad-space", "Minkowski3 carries no quadric constraint");
}

} // namespace

double quadricResidual(Space s, const Eigen::Vector4d& x) {
  if (s == Space::Minkowski3) return 0.0;
  double r = std::abs(formProduct(s, x, x) - quadricTarget(s));
  if (s == Space::Hyperbolic3 && x(3) <= 0) r = std::max(r, 1.0);
  return r;
}

SpaceformPoint SpaceformPoint::make(Space s, const Eigen::Vector4d& raw) {
  SpaceformPoint p;
  p.space = s;
  if (s == Space::Minkowski3) {
    p.ambient = AmbientVector(raw, ambientSignature(s));
    p.ambient.v(3) = 0.0;
    return p;
  }
  double q = formProduct(s, raw, raw);
  double target = quadricTarget(s);
  if (q * target <= 0)
    throw Error("off-quadric", std::string("cannot renormalize onto ") + spaceName(s));
  double scale = std::sqrt(q / target);
  double drift = std::abs(q - target);
  if (drift > kConstructTol)
    logDebug("quadric drift " + std::to_string(drift) + " renormalized on " + spaceName(s));
  Eigen::Vector4d x = raw / scale;
  if (s == Space::Hyperbolic3 && x(3) <= 0)
    throw Error("off-quadric", "hyperbolic point must have x4 > 0");
  p.ambient = AmbientVector(x, ambientSignature(s));
  return p;
}

SpaceformPoint SpaceformPoint::make(Space s, const Eigen::Vector3d& raw) {
  Eigen::Vector4d x;
  x << raw(0), raw(1), raw(2), 0.0;
  return make(s, x);
}

SpaceformPoint cPoint(Space s) {
  switch (s) {
    case Space::Minkowski3: return SpaceformPoint::make(s, Eigen::Vector3d(0, 0, 0));
    case Space::DeSitter3: return SpaceformPoint::make(s, Eigen::Vector4d(1, 0, 0, 0));
    case Space::AntiDeSitter3: return SpaceformPoint::make(s, Eigen::Vector4d(0, 0, 0, 1));
    case Space::Hyperbolic3: break;
  }
  throw Error("bad-space", "no distinguished point for Hyperbolic3");
}

double clampedAcos(double t) {
  if (t > 1.0) {
    if (t > 1.0 + kBoundaryClamp) throw Error("domain", "acos argument beyond 1");
    t = 1.0;
  }
  if (t < -1.0) {
    if (t < -1.0 - kBoundaryClamp) throw Error("domain", "acos argument beyond -1");
    t = -1.0;
  }
  return std::acos(t);
}

double clampedAcosh(double t) {
  if (t < 1.0) {
    if (t < 1.0 - kBoundaryClamp) throw Error("domain", "acosh argument below 1");
    t = 1.0;
  }
  return std::acosh(t);
}

Separation separation(const SpaceformPoint& x, const SpaceformPoint& y) {
  if (x.space != y.space) throw Error("space-mismatch", "separation needs points of one space");
  const Eigen::Vector4d& a = x.coords();
  const Eigen::Vector4d& b = y.coords();
  double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  if ((a - b).cwiseAbs().maxCoeff() <= 1e-12 * scale) return {SeparationClass::Coincident, 0.0};

  switch (x.space) {
    case Space::Minkowski3: {
      double q = formProduct(x.space, a - b, a - b);
      if (std::abs(q) <= 1e-12 * scale * scale) return {SeparationClass::Lightlike, 0.0};
      if (q < 0) return {SeparationClass::Timelike, std::sqrt(-q)};
      return {SeparationClass::Spacelike, std::sqrt(q)};
    }
    case Space::DeSitter3: {
      double p = formProduct(x.space, a, b);
      if (std::abs(p - 1.0) <= kBoundaryClamp) return {SeparationClass::Lightlike, 0.0};
      if (p > 1.0) return {SeparationClass::Timelike, clampedAcosh(p)};
      if (p <= -1.0)
        throw Error("antipodal-or-beyond", "no connecting spacelike geodesic in de Sitter");
      return {SeparationClass::Spacelike, clampedAcos(p)};
    }
    case Space::AntiDeSitter3: {
      double p = -formProduct(x.space, a, b);
      if (std::abs(p - 1.0) <= kBoundaryClamp) return {SeparationClass::Lightlike, 0.0};
      if (p > 1.0) return {SeparationClass::Spacelike, clampedAcosh(p)};
      return {SeparationClass::Timelike, clampedAcos(p)};
    }
    case Space::Hyperbolic3: {
      double p = -formProduct(x.space, a, b);
      return {SeparationClass::Spacelike, clampedAcosh(p)};
    }
  }
  throw Error("bad-space", "unreachable");
}

SpaceformPoint expMap(const SpaceformPoint& x, const AmbientVector& v, double t) {
  Space s = x.space;
  const Eigen::Vector4d& p = x.coords();
  const Eigen::Vector4d& u = v.v;
  double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
  if (s != Space::Minkowski3 && std::abs(formProduct(s, p, u)) > 1e-8 * scale)
    throw Error("non-tangent", "exp_map direction is not tangent to the quadric");
  if (s == Space::Minkowski3) {
    return SpaceformPoint::make(s, Eigen::Vector4d(p + t * u));
  }
  double q = formProduct(s, u, u);
  if (std::abs(q) <= 1e-10) return SpaceformPoint::make(s, Eigen::Vector4d(p + t * u));
  // Trig branch when <v,v> has the same sign as <x,x>, hyperbolic otherwise.
  bool trig = q * quadricTarget(s) > 0;
  Eigen::Vector4d w = u / std::sqrt(std::abs(q));
  Eigen::Vector4d out =
      trig ? Eigen::Vector4d(std::cos(t) * p + std::sin(t) * w)
           : Eigen::Vector4d(std::cosh(t) * p + std::sinh(t) * w);
  return SpaceformPoint::make(s, out);
}

Isometry Isometry::identity(Space s) {
  Isometry f;
  f.space = s;
  return f;
}

double formPreservationResidual(Space s, const Eigen::Matrix4d& A) {
  int d = ambientDim(s);
  Eigen::Matrix4d J = formDiag(s).asDiagonal();
  Eigen::Matrix4d r = A.topLeftCorner(4, 4);
  Eigen::Matrix4d res = r.transpose() * J * r - J;
  return res.topLeftCorner(d, d).cwiseAbs().maxCoeff();
}

namespace {

// A future-pointing timelike probe vector per space, used for the
// time-orientation test.
Eigen::Vector4d futureProbe(Space s) {
  switch (s) {
    case Space::Minkowski3: return Eigen::Vector4d(0, 0, 1, 0);
    case Space::DeSitter3: return Eigen::Vector4d(0, 0, 0, 1); // tangent at c_1
    case Space::AntiDeSitter3: return Eigen::Vector4d(0, 0, 1, 0); // tangent at c_-1
    case Space::Hyperbolic3: return Eigen::Vector4d(0, 0, 0, 1);
  }
  return Eigen::Vector4d::Zero();
}

double timeCoordinate(Space s, const Eigen::Vector4d& u) {
  switch (s) {
    case Space::Minkowski3: return u(2);
    case Space::DeSitter3: return u(3);
    case Space::AntiDeSitter3: return u(2);
    case Space::Hyperbolic3: return u(3);
  }
  return 0;
}

} // namespace

Isometry Isometry::make(Space s, const Eigen::Matrix4d& linear, const Eigen::Vector4d& translation) {
  if (s != Space::Minkowski3 && translation.cwiseAbs().maxCoeff() > 0)
    throw Error("bad-isometry", "translations only exist in Minkowski3");
  Eigen::Matrix4d A = Eigen::Matrix4d::Identity();
  int d = ambientDim(s);
  A.topLeftCorner(d, d) = linear.topLeftCorner(d, d);
  double res = formPreservationResidual(s, A);
  double scale = std::max(1.0, A.cwiseAbs().maxCoeff() * A.cwiseAbs().maxCoeff());
  if (res > kCheckTol * scale)
    throw Error("bad-isometry", "form preservation residual " + std::to_string(res));
  double det = A.topLeftCorner(d, d).determinant();
  if (det < 0) throw Error("bad-isometry", "orientation reversing");
  if (timeCoordinate(s, A * futureProbe(s)) <= 0)
    throw Error("bad-isometry", "time-orientation reversing");
  Isometry f;
  f.space = s;
  f.linear = A;
  f.translation = translation;
  if (s == Space::Minkowski3) f.translation(3) = 0;
  return f;
}

SpaceformPoint Isometry::apply(const SpaceformPoint& x) const {
  if (x.space != space) throw Error("space-mismatch", "isometry applied to foreign point");
  return SpaceformPoint::make(space, applyRaw(x.coords()));
}

Eigen::Vector4d Isometry::applyRaw(const Eigen::Vector4d& x) const {
  return linear * x + translation;
}

Isometry Isometry::compose(const Isometry& rhs) const {
  if (space != rhs.space) throw Error("space-mismatch", "composing isometries of different spaces");
  Isometry f;
  f.space = space;
  f.linear = linear * rhs.linear;
  f.translation = linear * rhs.translation + translation;
  return f;
}

Isometry Isometry::inverse() const {
  // For form-preserving A the inverse is J A^T J (padding slots carry 1).
  Eigen::Vector4d j = formDiag(space);
  for (int i = ambientDim(space); i < 4; i++) j(i) = 1.0;
  Eigen::Matrix4d J = j.asDiagonal();
  Isometry f;
  f.space = space;
  f.linear = J * linear.transpose() * J;
  f.translation = -(f.linear * translation);
  return f;
}

const char* modelName(ModelKind k) {
  switch (k) {
    case ModelKind::Klein: return "klein";
    case ModelKind::MinkFromDeSitter: return "mink-ds";
    case ModelKind::MinkFromAdS: return "mink-ads";
    case ModelKind::SecondMinkFromAdS: return "second-ads";
  }
  return "?";
}

bool modelAccepts(ModelKind k, Space s) {
  switch (k) {
    case ModelKind::Klein: return s == Space::DeSitter3 || s == Space::Hyperbolic3;
    case ModelKind::MinkFromDeSitter: return s == Space::DeSitter3;
    case ModelKind::MinkFromAdS: return s == Space::AntiDeSitter3;
    case ModelKind::SecondMinkFromAdS: return s == Space::AntiDeSitter3;
  }
  return false;
}

namespace {

struct ModelFrame {
  int denom;        // index of the projection coordinate
  int num[3];       // indices of the three model coordinates
  Signature target; // signature of the model hyperplane
};

ModelFrame modelFrame(ModelKind k) {
  switch (k) {
    case ModelKind::Klein: return {3, {0, 1, 2}, {3, 0}};
    case ModelKind::MinkFromDeSitter: return {0, {1, 2, 3}, {2, 1}};
    case ModelKind::MinkFromAdS: return {3, {0, 1, 2}, {2, 1}};
    case ModelKind::SecondMinkFromAdS: return {2, {0, 1, 3}, {2, 1}};
  }
  throw Error("bad-model", "unknown model kind");
}

} // namespace

AmbientVector modelMap(ModelKind k, const SpaceformPoint& x) {
  if (!modelAccepts(k, x.space))
    throw Error("model-mismatch", std::string(modelName(k)) + " does not accept " + spaceName(x.space));
  ModelFrame f = modelFrame(k);
  const Eigen::Vector4d& p = x.coords();
  double den = p(f.denom);
  if (den <= kInfinityTol) throw Error("at-infinity", "model projection denominator vanishes");
  Eigen::Vector3d out(p(f.num[0]) / den, p(f.num[1]) / den, p(f.num[2]) / den);
  return AmbientVector(out, f.target);
}

SpaceformPoint modelUnmap(ModelKind k, const AmbientVector& y) {
  ModelFrame f = modelFrame(k);
  if (!(y.sig == f.target)) throw Error("signature-mismatch", "model point has wrong signature");
  Eigen::Vector4d lift = Eigen::Vector4d::Zero();
  lift(f.denom) = 1.0;
  for (int i = 0; i < 3; i++) lift(f.num[i]) = y[i];
  switch (k) {
    case ModelKind::Klein: {
      double q = formProduct(Space::DeSitter3, lift, lift);
      if (std::abs(q) <= kInfinityTol) throw Error("at-infinity", "Klein point on the light cone");
      return SpaceformPoint::make(q < 0 ? Space::Hyperbolic3 : Space::DeSitter3, lift);
    }
    case ModelKind::MinkFromDeSitter: {
      double q = formProduct(Space::DeSitter3, lift, lift);
      if (q <= kInfinityTol) throw Error("at-infinity", "point outside the de Sitter image");
      return SpaceformPoint::make(Space::DeSitter3, lift);
    }
    case ModelKind::MinkFromAdS:
    case ModelKind::SecondMinkFromAdS: {
      double q = formProduct(Space::AntiDeSitter3, lift, lift);
      if (q >= -kInfinityTol) throw Error("at-infinity", "point outside the anti-de Sitter image");
      return SpaceformPoint::make(Space::AntiDeSitter3, lift);
    }
  }
  throw Error("bad-model", "unknown model kind");
}

Eigen::Vector3d modelMapDifferential(ModelKind k, const SpaceformPoint& x, const Eigen::Vector4d& u) {
  ModelFrame f = modelFrame(k);
  const Eigen::Vector4d& p = x.coords();
  double den = p(f.denom);
  if (den <= kInfinityTol) throw Error("at-infinity", "model projection denominator vanishes");
  // d(p_i/p_d) = (u_i p_d - p_i u_d) / p_d^2
  Eigen::Vector3d out;
  for (int i = 0; i < 3; i++)
    out(i) = (u(f.num[i]) * den - p(f.num[i]) * u(f.denom)) / (den * den);
  return out;
}

OrientedPlane dualOfPoint(const SpaceformPoint& x) {
  if (x.space != Space::Hyperbolic3 && x.space != Space::DeSitter3)
    throw Error("bad-space", "duality lives in R^4_1");
  return OrientedPlane{x.coords()};
}

SpaceformPoint dualOfPlane(const OrientedPlane& p) {
  double q = formProduct(Space::DeSitter3, p.normal, p.normal);
  if (std::abs(q) <= 1e-12)
    throw Error("lightlike-normal", "plane normal is lightlike");
  if (q > 0) return SpaceformPoint::make(Space::DeSitter3, p.normal);
  Eigen::Vector4d n = p.normal;
  if (n(3) < 0) n = -n;
  return SpaceformPoint::make(Space::Hyperbolic3, n);
}

bool inFutureCone(const SpaceformPoint& x) {
  const Eigen::Vector4d& p = x.coords();
  switch (x.space) {
    case Space::Minkowski3:
      return formProduct(x.space, p, p) < 0 && p(2) > 0;
    case Space::DeSitter3:
      return formProduct(x.space, p, cPoint(x.space).coords()) > 1 && p(3) > 0;
    case Space::AntiDeSitter3:
      // future cone of c_-1 intersected with {x4 >= 0}
      return p(3) > 0 && p(3) < 1 && p(2) > 0;
    case Space::Hyperbolic3: return false;
  }
  return false;
}

double distanceFromCenter(const SpaceformPoint& x) {
  if (!inFutureCone(x)) throw Error("outside-cone", "point not strictly inside Omega_K");
  const Eigen::Vector4d& p = x.coords();
  switch (x.space) {
    case Space::Minkowski3: return std::sqrt(-formProduct(x.space, p, p));
    case Space::DeSitter3: return clampedAcosh(p(0));
    case Space::AntiDeSitter3: return clampedAcos(p(3));
    case Space::Hyperbolic3: break;
  }
  throw Error("bad-space", "unreachable");
}

SpaceformPoint projectToOK(const SpaceformPoint& x) {
  if (!inFutureCone(x)) throw Error("outside-cone", "p_K defined on Omega_K only");
  auto [y, h] = hyperboloidCoords(x);
  (void)h;
  return liftFromHyperboloid(curvatureOf(x.space), y, x.space == Space::Minkowski3 ? 1.0
                             : x.space == Space::DeSitter3 ? std::acosh(std::sqrt(2.0))
                                                           : M_PI / 2);
}

SpaceformPoint liftFromHyperboloid(int K, const Eigen::Vector3d& y, double height) {
  if (height <= 0) throw Error("bad-height", "height must be positive");
  switch (K) {
    case 0:
      return SpaceformPoint::make(Space::Minkowski3, Eigen::Vector3d(height * y));
    case 1: {
      Eigen::Vector4d p;
      p << std::cosh(height), std::sinh(height) * y(0), std::sinh(height) * y(1),
          std::sinh(height) * y(2);
      return SpaceformPoint::make(Space::DeSitter3, p);
    }
    case -1: {
      // heights up to and including pi/2 (the surface O_{-1} itself)
      if (height > M_PI / 2 + 1e-12)
        throw Error("bad-height", "anti-de Sitter height must stay within (0, pi/2]");
      Eigen::Vector4d p;
      p << std::sin(height) * y(0), std::sin(height) * y(1), std::sin(height) * y(2),
          std::cos(height);
      return SpaceformPoint::make(Space::AntiDeSitter3, p);
    }
  }
  throw Error("bad-curvature", "K must be in {-1,0,1}");
}

std::pair<Eigen::Vector3d, double> hyperboloidCoords(const SpaceformPoint& x) {
  double h = distanceFromCenter(x);
  const Eigen::Vector4d& p = x.coords();
  switch (x.space) {
    case Space::Minkowski3: return {p.head<3>() / h, h};
    case Space::DeSitter3: return {Eigen::Vector3d(p.tail<3>() / std::sinh(h)), h};
    case Space::AntiDeSitter3: return {p.head<3>() / std::sin(h), h};
    case Space::Hyperbolic3: break;
  }
  throw Error("bad-space", "unreachable");
}

Eigen::Vector4d radialUnit(const SpaceformPoint& x) {
  const Eigen::Vector4d& p = x.coords();
  switch (x.space) {
    case Space::Minkowski3: {
      double d = distanceFromCenter(x);
      return p / d;
    }
    case Space::DeSitter3: {
      double d = distanceFromCenter(x);
      return (std::cosh(d) * p - cPoint(x.space).coords()) / std::sinh(d);
    }
    case Space::AntiDeSitter3: {
      double d = distanceFromCenter(x);
      return (std::cos(d) * p - cPoint(x.space).coords()) / std::sin(d);
    }
    case Space::Hyperbolic3: break;
  }
  throw Error("bad-space", "no radial direction in Hyperbolic3");
}

Isometry extendIsometry(const Eigen::Matrix3d& A, Space s) {
  Eigen::Matrix3d J3 = Eigen::Vector3d(1, 1, -1).asDiagonal();
  double res = (A.transpose() * J3 * A - J3).cwiseAbs().maxCoeff();
  // the attainable residual scales with ||A||^2 (cancellation floor)
  double scale = std::max(1.0, A.cwiseAbs().maxCoeff() * A.cwiseAbs().maxCoeff());
  if (res > kCheckTol * scale)
    throw Error("bad-isometry", "matrix does not preserve the (2,1) form, residual " + std::to_string(res));
  if (A.determinant() < 0 || A(2, 2) <= 0)
    throw Error("bad-isometry", "matrix must lie in SO+(2,1)");
  Eigen::Matrix4d E = Eigen::Matrix4d::Identity();
  switch (s) {
    case Space::Minkowski3:
      E.topLeftCorner(3, 3) = A;
      break;
    case Space::DeSitter3:
    case Space::Hyperbolic3:
      // fixes coordinate x1 (the axis of c_1)
      E.bottomRightCorner(3, 3) = A;
      break;
    case Space::AntiDeSitter3:
      // fixes coordinate x4 (the axis of c_-1)
      E.topLeftCorner(3, 3) = A;
      break;
  }
  return Isometry::make(s, E);
}

Isometry extendIsometry(const Eigen::Matrix3d& A, int K) {
  return extendIsometry(A, spaceOfCurvature(K));
}

std::pair<double, double> constantDistanceForms(int K, double d) {
  if (d <= 0) throw Error("domain", "distance must be positive");
  switch (K) {
    case 1: return {std::sinh(d) * std::sinh(d), std::cosh(d) * std::sinh(d)};
    case -1:
      if (d >= M_PI / 2) throw Error("domain", "anti-de Sitter distance must stay below pi/2");
      return {std::sin(d) * std::sin(d), std::cos(d) * std::sin(d)};
    case 0: return {d * d, d};
  }
  throw Error("bad-curvature", "K must be in {-1,0,1}");
}

} // namespace fuchsian
