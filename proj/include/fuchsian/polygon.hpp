#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fuchsian/lorentz.hpp"

namespace fuchsian {

// --- hyperboloid-model plane geometry (O_K as {y1^2+y2^2-y3^2=-1, y3>0}) ---

/// <u,v> for the (+,+,-) form on R^3_1.
double mink3(const Eigen::Vector3d& u, const Eigen::Vector3d& v);

double hypDistance(const Eigen::Vector3d& p, const Eigen::Vector3d& q);

/// Rotation by phi about the basepoint o=(0,0,1).
Eigen::Matrix3d hypRotation(double phi);

/// Translation by length L along the e1 axis.
Eigen::Matrix3d hypBoost(double L);

/// Unique isometry taking o to p; rotation-free along the o-p geodesic.
Eigen::Matrix3d hypTranslationTo(const Eigen::Vector3d& p);

/// Isometry taking (o, e1 direction) to (p, direction from p toward q).
Eigen::Matrix3d hypFrame(const Eigen::Vector3d& p, const Eigen::Vector3d& q);

/// Unit tangent at p of the geodesic toward q.
Eigen::Vector3d hypDirection(const Eigen::Vector3d& p, const Eigen::Vector3d& q);

/// Point at hyperbolic polar coordinates (radius, angle) about o.
Eigen::Vector3d hypPolar(double radius, double angle);

/// Normalized Minkowski-sum centroid of a point set.
Eigen::Vector3d hypCentroid(const std::vector<Eigen::Vector3d>& pts);

// --- canonical polygons ---

/// The 6g-6 side/angle parameters (b3..b_2g, th3, th3', ..., th_2g, th_2g')
/// of a canonical fundamental polygon.
struct ZVCCoordinates {
  int genus = 2;
  Eigen::VectorXd values; // length 6g-6

  int freeSides() const { return 2 * genus - 2; }
  int freeAngles() const { return 4 * genus - 4; }
  double side(int k) const { return values(k); }                    // b_{k+3}
  double angle(int k) const { return values(freeSides() + k); }     // theta list
};

/// Z-V-C values of the regular 4g-gon (all sides equal, angles 2pi/4g).
ZVCCoordinates regularZVC(int genus);

/// Geodesically convex 4g-gon with paired side lengths and angle sum 2pi,
/// centered at o with the first vertex on the e1 axis.
struct CanonicalPolygon {
  int genus = 2;
  std::vector<Eigen::Vector3d> vertices; // 4g, counterclockwise
  Eigen::VectorXd sideLengths;           // 4g, side k runs v_k -> v_{k+1}
  Eigen::VectorXd angles;                // 4g, angle k at vertex v_k
  double closureResidual = 0;
  double angleSumResidual = 0;

  int sides() const { return 4 * genus; }
};

/// Completes Z-V-C data to a closed polygon by a damped Newton iteration
/// on the closure conditions; unknowns (b1, b2, th1) under the balanced
/// normalization th1=th1', th2=th2' and angle sum 2pi.
CanonicalPolygon closePolygon(const ZVCCoordinates& z);

/// Polygon from Z-V-C data and explicit values of the free completion
/// (no solving; the closure residual is whatever the data gives).
CanonicalPolygon completePolygon(const ZVCCoordinates& z, double b1, double b2, double th1);

/// The regular 4g-gon directly (same polygon closePolygon(regularZVC)
/// converges to).
CanonicalPolygon regularPolygon(int genus);

} // namespace fuchsian
