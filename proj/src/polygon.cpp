#include "fuchsian/polygon.hpp"

#include <cmath>

#include "fuchsian/log.hpp"

namespace fuchsian {

double mink3(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
  return u(0) * v(0) + u(1) * v(1) - u(2) * v(2);
}

double hypDistance(const Eigen::Vector3d& p, const Eigen::Vector3d& q) {
  return clampedAcosh(-mink3(p, q));
}

Eigen::Matrix3d hypRotation(double phi) {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  R(0, 0) = std::cos(phi);
  R(0, 1) = -std::sin(phi);
  R(1, 0) = std::sin(phi);
  R(1, 1) = std::cos(phi);
  return R;
}

Eigen::Matrix3d hypBoost(double L) {
  Eigen::Matrix3d B = Eigen::Matrix3d::Identity();
  B(0, 0) = std::cosh(L);
  B(0, 2) = std::sinh(L);
  B(2, 0) = std::sinh(L);
  B(2, 2) = std::cosh(L);
  return B;
}

Eigen::Matrix3d hypTranslationTo(const Eigen::Vector3d& p) {
  double r = clampedAcosh(p(2));
  if (r < 1e-14) return Eigen::Matrix3d::Identity();
  double phi = std::atan2(p(1), p(0));
  return hypRotation(phi) * hypBoost(r) * hypRotation(-phi);
}

Eigen::Vector3d hypDirection(const Eigen::Vector3d& p, const Eigen::Vector3d& q) {
  Eigen::Vector3d t = q + mink3(q, p) * p;
  double n = mink3(t, t);
  if (n <= 1e-24) throw Error("degenerate", "direction between coincident points");
  return t / std::sqrt(n);
}

Eigen::Matrix3d hypFrame(const Eigen::Vector3d& p, const Eigen::Vector3d& q) {
  Eigen::Matrix3d T = hypTranslationTo(p);
  Eigen::Vector3d w = T.inverse() * hypDirection(p, q);
  return T * hypRotation(std::atan2(w(1), w(0)));
}

Eigen::Vector3d hypPolar(double radius, double angle) {
  return {std::sinh(radius) * std::cos(angle), std::sinh(radius) * std::sin(angle),
          std::cosh(radius)};
}

Eigen::Vector3d hypCentroid(const std::vector<Eigen::Vector3d>& pts) {
  Eigen::Vector3d m = Eigen::Vector3d::Zero();
  for (const auto& p : pts) m += p;
  double n = -mink3(m, m);
  if (n <= 0) throw Error("degenerate", "centroid of an empty or spread-out set");
  return m / std::sqrt(n);
}

ZVCCoordinates regularZVC(int genus) {
  if (genus < 2) throw Error("bad-genus", "genus must be at least 2");
  int n = 4 * genus;
  double alpha = 2.0 * M_PI / n;
  // cosh(R) = cot(pi/n) cot(alpha/2) for the regular n-gon with angle alpha
  double coshR = 1.0 / (std::tan(M_PI / n) * std::tan(alpha / 2));
  double sinhHalfSide = std::sinh(std::acosh(coshR)) * std::sin(M_PI / n);
  double side = 2.0 * std::asinh(sinhHalfSide);
  ZVCCoordinates z;
  z.genus = genus;
  z.values.resize(6 * genus - 6);
  for (int k = 0; k < z.freeSides(); k++) z.values(k) = side;
  for (int k = 0; k < z.freeAngles(); k++) z.values(z.freeSides() + k) = alpha;
  return z;
}

namespace {

// Walks the polygon boundary (counterclockwise, interior on the left) and
// returns the holonomy: product of advance-and-turn isometries including
// the final turn back at v0. Identity iff the polygon closes with the
// prescribed angles. Accumulating in a frame centered at the polygon keeps
// the intermediate norms near cosh(R) instead of cosh(2R), which lowers
// the noise floor enough for the larger genera.
Eigen::Matrix3d walkHolonomyFrom(const Eigen::Matrix3d& start, const Eigen::VectorXd& sides,
                                 const Eigen::VectorXd& angles,
                                 std::vector<Eigen::Vector3d>* verticesOut,
                                 double* maxNormOut = nullptr) {
  int n = static_cast<int>(sides.size());
  Eigen::Matrix3d F = start;
  double maxNorm = 1;
  if (verticesOut) verticesOut->clear();
  for (int i = 0; i < n; i++) {
    if (verticesOut) verticesOut->push_back(F.col(2));
    F = F * hypBoost(sides(i)) * hypRotation(M_PI - angles((i + 1) % n));
    maxNorm = std::max(maxNorm, F.cwiseAbs().maxCoeff());
  }
  if (maxNormOut) *maxNormOut = maxNorm;
  Eigen::Matrix3d J = Eigen::Vector3d(1, 1, -1).asDiagonal();
  return (J * start.transpose() * J) * F;
}

Eigen::Matrix3d walkHolonomy(const Eigen::VectorXd& sides, const Eigen::VectorXd& angles,
                             std::vector<Eigen::Vector3d>* verticesOut,
                             double* noiseFloorOut = nullptr) {
  std::vector<Eigen::Vector3d> rough;
  Eigen::Matrix3d M = walkHolonomyFrom(Eigen::Matrix3d::Identity(), sides, angles, &rough);
  Eigen::Matrix3d center;
  try {
    center = hypTranslationTo(hypCentroid(rough)).inverse();
  } catch (const Error&) {
    if (verticesOut) *verticesOut = rough;
    return M;
  }
  std::vector<Eigen::Vector3d> centered;
  double maxNorm = 1;
  Eigen::Matrix3d Mc = walkHolonomyFrom(center, sides, angles, &centered, &maxNorm);
  if (verticesOut) *verticesOut = centered;
  if (noiseFloorOut)
    *noiseFloorOut = 2.0 * sides.size() * 1e-16 * maxNorm * maxNorm;
  return Mc;
}

Eigen::Vector3d closureResidualVec(const Eigen::Matrix3d& M) {
  return {M(0, 2), M(1, 2), M(1, 0) - M(0, 1)};
}

struct AssembledPolygon {
  Eigen::VectorXd sides;  // 4g
  Eigen::VectorXd angles; // 4g
};

// Lays out the full side/angle lists from Z-V-C data plus the unknowns
// (b1, b2, th1) under the balanced normalization.
AssembledPolygon assemble(const ZVCCoordinates& z, double b1, double b2, double th1) {
  int g = z.genus;
  int n = 4 * g;
  AssembledPolygon a;
  a.sides.resize(n);
  a.angles.resize(n);
  double freeAngleSum = 0;
  for (int k = 0; k < z.freeAngles(); k++) freeAngleSum += z.angle(k);
  double th2 = M_PI - freeAngleSum / 2 - th1;
  // block j >= 1 pairs sides (4j, 4j+2) and (4j+1, 4j+3)
  for (int j = 0; j < g; j++) {
    double sa = j == 0 ? b1 : z.side(2 * (j - 1));
    double sb = j == 0 ? b2 : z.side(2 * (j - 1) + 1);
    a.sides(4 * j) = sa;
    a.sides(4 * j + 1) = sb;
    a.sides(4 * j + 2) = sa;
    a.sides(4 * j + 3) = sb;
    if (j == 0) {
      a.angles(0) = th1;
      a.angles(1) = th1;
      a.angles(2) = th2;
      a.angles(3) = th2;
    } else {
      a.angles(4 * j) = z.angle(4 * (j - 1));
      a.angles(4 * j + 1) = z.angle(4 * (j - 1) + 1);
      a.angles(4 * j + 2) = z.angle(4 * (j - 1) + 2);
      a.angles(4 * j + 3) = z.angle(4 * (j - 1) + 3);
    }
  }
  return a;
}

bool unknownsValid(const ZVCCoordinates& z, const Eigen::Vector3d& u) {
  double freeAngleSum = 0;
  for (int k = 0; k < z.freeAngles(); k++) freeAngleSum += z.angle(k);
  double th2 = M_PI - freeAngleSum / 2 - u(2);
  constexpr double m = 1e-3;
  return u(0) > m && u(1) > m && u(2) > m && u(2) < M_PI - m && th2 > m && th2 < M_PI - m;
}

CanonicalPolygon finishPolygon(const ZVCCoordinates& z, const AssembledPolygon& a) {
  CanonicalPolygon poly;
  poly.genus = z.genus;
  poly.sideLengths = a.sides;
  poly.angles = a.angles;
  std::vector<Eigen::Vector3d> verts;
  Eigen::Matrix3d M = walkHolonomy(a.sides, a.angles, &verts);
  poly.closureResidual = closureResidualVec(M).cwiseAbs().maxCoeff();
  poly.angleSumResidual = std::abs(a.angles.sum() - 2 * M_PI);
  // canonical placement: centroid at o, first vertex on the e1 axis
  Eigen::Matrix3d C = hypTranslationTo(hypCentroid(verts)).inverse();
  for (auto& v : verts) v = C * v;
  Eigen::Matrix3d R = hypRotation(-std::atan2(verts[0](1), verts[0](0)));
  for (auto& v : verts) v = R * v;
  poly.vertices = verts;
  return poly;
}

} // namespace

namespace {

// single damped-Newton solve from a given starting completion
CanonicalPolygon closePolygonFrom(const ZVCCoordinates& z, Eigen::Vector3d u);

} // namespace

CanonicalPolygon closePolygon(const ZVCCoordinates& z) {
  if (z.genus < 2) throw Error("bad-genus", "genus must be at least 2");
  if (z.values.size() != 6 * z.genus - 6)
    throw Error("bad-zvc", "expected 6g-6 values");
  for (int k = 0; k < z.freeSides(); k++)
    if (z.side(k) <= 0) throw Error("bad-zvc", "side lengths must be positive");
  for (int k = 0; k < z.freeAngles(); k++)
    if (z.angle(k) <= 0 || z.angle(k) >= M_PI)
      throw Error("bad-zvc", "angles must lie in (0, pi)");

  double meanSide = 0;
  for (int k = 0; k < z.freeSides(); k++) meanSide += z.side(k);
  meanSide /= z.freeSides();
  double freeAngleSum = 0;
  for (int k = 0; k < z.freeAngles(); k++) freeAngleSum += z.angle(k);

  Eigen::Vector3d u(meanSide, meanSide, (2 * M_PI - freeAngleSum) / 4);
  if (!unknownsValid(z, u)) throw Error("not-completable", "no admissible starting completion");

  try {
    return closePolygonFrom(z, u);
  } catch (const Error& e) {
    if (e.code != "not-completable") throw;
  }
  // homotopy fallback from the regular polygon with adaptive bisection,
  // warm-starting each step from the previous completion
  ZVCCoordinates reg = regularZVC(z.genus);
  Eigen::Vector3d warm;
  {
    double rs = reg.values(0);
    double ra = (2 * M_PI - (4 * z.genus - 4) * reg.values(reg.freeSides())) / 4;
    warm = Eigen::Vector3d(rs, rs, ra);
  }
  CanonicalPolygon out;
  double t = 0, step = 1.0;
  int guard = 0;
  while (t < 1.0 - 1e-12) {
    if (++guard > 256) throw Error("not-completable", "homotopy exhausted its budget");
    double tNext = std::min(1.0, t + step);
    ZVCCoordinates mid = z;
    mid.values = (1 - tNext) * reg.values + tNext * z.values;
    try {
      out = closePolygonFrom(mid, warm);
    } catch (const Error& e) {
      if (e.code != "not-completable" || step < 1.0 / 64) throw;
      step /= 2;
      continue;
    }
    warm = Eigen::Vector3d(out.sideLengths(0), out.sideLengths(1), out.angles(0));
    t = tNext;
    step = std::min(1.0, step * 2);
  }
  return out;
}

namespace {

CanonicalPolygon closePolygonFrom(const ZVCCoordinates& z, Eigen::Vector3d u) {
  if (!unknownsValid(z, u)) throw Error("not-completable", "no admissible starting completion");
  double noiseFloor = 0;
  auto residual = [&](const Eigen::Vector3d& w) -> Eigen::Vector3d {
    AssembledPolygon a = assemble(z, w(0), w(1), w(2));
    return closureResidualVec(walkHolonomy(a.sides, a.angles, nullptr, &noiseFloor));
  };

  Eigen::Vector3d r = residual(u);
  // drive to the centered walk's noise floor; the relator residual of the
  // side pairings amplifies whatever closure defect remains
  const double tol = std::max(1e-12, noiseFloor);
  constexpr int maxIter = 100;
  int it = 0;
  for (; it < maxIter && r.cwiseAbs().maxCoeff() > tol; it++) {
    Eigen::Matrix3d Jac;
    for (int c = 0; c < 3; c++) {
      double h = 1e-7 * std::max(1.0, std::abs(u(c)));
      Eigen::Vector3d up = u, um = u;
      up(c) += h;
      um(c) -= h;
      Jac.col(c) = (residual(up) - residual(um)) / (2 * h);
    }
    Eigen::Vector3d step = Jac.fullPivLu().solve(-r);
    double damp = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; half++, damp *= 0.5) {
      Eigen::Vector3d cand = u + damp * step;
      if (!unknownsValid(z, cand)) continue;
      Eigen::Vector3d rc = residual(cand);
      if (rc.cwiseAbs().maxCoeff() < r.cwiseAbs().maxCoeff()) {
        u = cand;
        r = rc;
        accepted = true;
        break;
      }
    }
    if (!accepted) break; // stalled; the tolerance check below decides
  }
  if (r.cwiseAbs().maxCoeff() > std::max(1e-10, 30 * noiseFloor))
    throw Error("not-completable", "closure residual stayed at " +
                                       std::to_string(r.cwiseAbs().maxCoeff()) + " after " +
                                       std::to_string(it) + " iterations");
  return finishPolygon(z, assemble(z, u(0), u(1), u(2)));
}

} // namespace

CanonicalPolygon completePolygon(const ZVCCoordinates& z, double b1, double b2, double th1) {
  return finishPolygon(z, assemble(z, b1, b2, th1));
}

CanonicalPolygon regularPolygon(int genus) {
  // analytic construction; closePolygon(regularZVC(genus)) converges to the
  // same polygon but carries the boundary-walk noise floor
  if (genus < 2) throw Error("bad-genus", "genus must be at least 2");
  int n = 4 * genus;
  double alpha = 2.0 * M_PI / n;
  double R = std::acosh(1.0 / (std::tan(M_PI / n) * std::tan(alpha / 2)));
  double side = 2.0 * std::asinh(std::sinh(R) * std::sin(M_PI / n));
  CanonicalPolygon poly;
  poly.genus = genus;
  poly.vertices.reserve(n);
  for (int k = 0; k < n; k++) poly.vertices.push_back(hypPolar(R, 2 * M_PI * k / n));
  poly.sideLengths = Eigen::VectorXd::Constant(n, side);
  poly.angles = Eigen::VectorXd::Constant(n, alpha);
  poly.closureResidual = 0;
  poly.angleSumResidual = 0;
  return poly;
}

} // namespace fuchsian
