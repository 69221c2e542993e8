#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>

namespace fuchsian {

/// Exception with a stable machine-readable code ("at-infinity",
/// "antipodal-or-beyond", "not-completable", ...).
struct Error : std::runtime_error {
  std::string code;
  Error(std::string c, const std::string& what)
      : std::runtime_error(c + ": " + what), code(std::move(c)) {}
};

/// The four fixed models. Minkowski3, DeSitter3 and AntiDeSitter3 are the
/// Lorentzian space-forms of curvature 0, 1, -1; Hyperbolic3 is carried
/// along for the hyperbolic/de Sitter duality.
enum class Space { Minkowski3, DeSitter3, AntiDeSitter3, Hyperbolic3 };

const char* spaceName(Space s);
int ambientDim(Space s); // 3 for Minkowski3, 4 otherwise
int curvatureOf(Space s);
Space spaceOfCurvature(int K);

/// Signature of a flat pseudo-Euclidean form; negative directions are
/// stored last and the form matrix is diagonal +-1.
struct Signature {
  int plus = 0;
  int minus = 0;
  int dim() const { return plus + minus; }
  bool operator==(const Signature&) const = default;
};

Signature ambientSignature(Space s);

/// Coordinate vector in a flat pseudo-Euclidean space of dimension 3 or 4.
/// Dimension-3 vectors keep the unused slot at zero.
struct AmbientVector {
  Eigen::Vector4d v = Eigen::Vector4d::Zero();
  Signature sig;

  AmbientVector() = default;
  AmbientVector(const Eigen::Vector4d& v4, Signature s) : v(v4), sig(s) {}
  AmbientVector(const Eigen::Vector3d& v3, Signature s) : sig(s) {
    v << v3(0), v3(1), v3(2), 0.0;
  }
  int dim() const { return sig.dim(); }
  double operator[](int i) const { return v(i); }
  double& operator[](int i) { return v(i); }
  Eigen::Vector3d head3() const { return v.head<3>(); }
};

/// Diagonal of the bilinear form, zero-padded to length 4.
Eigen::Vector4d formDiag(Signature s);
Eigen::Vector4d formDiag(Space s);

/// <u,v> for the given space's form, on raw coordinate vectors.
double formProduct(Space s, const Eigen::Vector4d& u, const Eigen::Vector4d& w);

/// <u,v>; throws on mismatched signatures.
double innerProduct(const AmbientVector& u, const AmbientVector& w);

/// Point on the quadric model of M_K (or H^3) in its flat ambient space.
struct SpaceformPoint {
  Space space = Space::Minkowski3;
  AmbientVector ambient;

  /// Renormalizes raw coordinates onto the quadric along the ambient ray
  /// (no-op for Minkowski3) and logs the drift when above 1e-12.
  static SpaceformPoint make(Space s, const Eigen::Vector4d& raw);
  static SpaceformPoint make(Space s, const Eigen::Vector3d& raw);

  const Eigen::Vector4d& coords() const { return ambient.v; }
};

/// Distinguished point c_K of each Lorentzian model.
SpaceformPoint cPoint(Space s);

/// Checks the quadric constraint and (where applicable) the branch sign;
/// returns the residual |<x,x>| - target|.
double quadricResidual(Space s, const Eigen::Vector4d& x);

enum class SeparationClass { Timelike, Spacelike, Lightlike, Coincident };

struct Separation {
  SeparationClass cls;
  double length; // nonnegative; the imaginary part of the "distance" for timelike pairs
};

/// Geodesic separation classification and length.
Separation separation(const SpaceformPoint& x, const SpaceformPoint& y);

/// Geodesic through x with tangent v (<x,v> = 0 required for K != 0),
/// evaluated at parameter t. v should be normalized to <v,v> in {-1,0,1}.
SpaceformPoint expMap(const SpaceformPoint& x, const AmbientVector& v, double t);

/// Orientation- and time-orientation-preserving isometry of a model.
/// Minkowski3 may carry a translation part; it is zero elsewhere.
struct Isometry {
  Space space = Space::Minkowski3;
  Eigen::Matrix4d linear = Eigen::Matrix4d::Identity();
  Eigen::Vector4d translation = Eigen::Vector4d::Zero();

  static Isometry identity(Space s);
  /// Validates form preservation (1e-10), det=+1 and time orientation.
  static Isometry make(Space s, const Eigen::Matrix4d& linear,
                       const Eigen::Vector4d& translation = Eigen::Vector4d::Zero());

  SpaceformPoint apply(const SpaceformPoint& x) const;
  Eigen::Vector4d applyRaw(const Eigen::Vector4d& x) const;
  Eigen::Vector4d applyTangent(const Eigen::Vector4d& u) const { return linear * u; }
  Isometry compose(const Isometry& rhs) const; // this after rhs
  Isometry inverse() const;
};

/// Residual of A^T J A - J for the space's form.
double formPreservationResidual(Space s, const Eigen::Matrix4d& A);

/// Projective model maps. Each is a central projection onto a fixed
/// coordinate hyperplane:
///   MinkFromDeSitter (phi_1):  x -> (x2,x3,x4)/x1, target {x1=1}, form (+,+,-)
///   MinkFromAdS (phi_-1):      x -> (x1,x2,x3)/x4, target {x4=1}, form (+,+,-)
///   SecondMinkFromAdS:         x -> (x1,x2,x4)/x3, target {x3=1}, form (+,+,-)
///   Klein:                     x -> (x1,x2,x3)/x4, target {x4=1}, Euclidean
enum class ModelKind { Klein, MinkFromDeSitter, MinkFromAdS, SecondMinkFromAdS };

const char* modelName(ModelKind k);

/// Space(s) a model accepts as input.
bool modelAccepts(ModelKind k, Space s);

AmbientVector modelMap(ModelKind k, const SpaceformPoint& x);
SpaceformPoint modelUnmap(ModelKind k, const AmbientVector& y);

/// Differential of the model map at x applied to a tangent vector.
Eigen::Vector3d modelMapDifferential(ModelKind k, const SpaceformPoint& x,
                                     const Eigen::Vector4d& u);

/// Totally geodesic plane of H^3 or dS^3, stored by its unit normal in
/// R^4_1. Timelike normals are kept future-pointing (n4 > 0).
struct OrientedPlane {
  Eigen::Vector4d normal = Eigen::Vector4d::Zero();
};

/// Polar duality in R^4_1: H^3 point <-> spacelike dS plane, dS point <->
/// hyperbolic plane. An involution.
OrientedPlane dualOfPoint(const SpaceformPoint& x);
SpaceformPoint dualOfPlane(const OrientedPlane& p);

/// Future cone membership (strict interior of Omega_K).
bool inFutureCone(const SpaceformPoint& x);

/// Timelike distance of x in Omega_K from c_K.
double distanceFromCenter(const SpaceformPoint& x);

/// Foot on O_K of the timelike geodesic from c_K through x.
SpaceformPoint projectToOK(const SpaceformPoint& x);

/// O_K as a copy of the hyperboloid model of H^2 in R^3_1
/// ({y1^2+y2^2-y3^2=-1, y3>0}). Lift of a hyperboloid point to the point
/// of M_K at timelike distance `height` from c_K over it.
SpaceformPoint liftFromHyperboloid(int K, const Eigen::Vector3d& y, double height);

/// Inverse bookkeeping of liftFromHyperboloid: hyperboloid point and height.
std::pair<Eigen::Vector3d, double> hyperboloidCoords(const SpaceformPoint& x);

/// Future-pointing unit radial direction at x (tangent of the geodesic
/// from c_K through x).
Eigen::Vector4d radialUnit(const SpaceformPoint& x);

/// Extension of an isometry of the hyperboloid model of H^2 (a 3x3 matrix
/// in SO+(2,1)) to an isometry of M_K fixing c_K (or of H^3 preserving the
/// plane dual to c_1).
Isometry extendIsometry(const Eigen::Matrix3d& A, Space s);
Isometry extendIsometry(const Eigen::Matrix3d& A, int K);

/// Conformal factors of the first and second fundamental forms of the
/// surface at constant distance d from c_K, relative to the hyperbolic
/// metric of O_K's model:
///   K=1 -> (sinh^2 d, cosh d sinh d), K=-1 -> (sin^2 d, cos d sin d),
///   K=0 -> (d^2, d).
std::pair<double, double> constantDistanceForms(int K, double d);

/// arccos/arccosh with arguments clamped to their closed domains when
/// within 1e-9 of the boundary; errors beyond that.
double clampedAcos(double t);
double clampedAcosh(double t);

} // namespace fuchsian
