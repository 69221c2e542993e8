#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "fuchsian/group.hpp"
#include "fuchsian/hull.hpp"
#include "fuchsian/lorentz.hpp"

namespace fuchsian {

/// Vertex = lift of hyperboloid point y to the point of `space` at
/// distance d over it. Extends liftFromHyperboloid to Hyperbolic3, where d
/// is measured from the plane dual to c_1.
SpaceformPoint liftVertex(Space space, const Eigen::Vector3d& y, double d);

/// Group + marked points on O_K (inside the Dirichlet domain) + heights.
struct MarkedConfiguration {
  FuchsianGroup group;
  Space space = Space::Minkowski3;
  std::vector<Eigen::Vector3d> points; // hyperboloid model
  Eigen::VectorXd heights;

  int K() const { return group.K; }
  int n() const { return static_cast<int>(points.size()); }
  SpaceformPoint vertex(int i) const { return liftVertex(space, points[i], heights(i)); }

  /// Throws on invalid data (empty, height floor 1e-3, AdS heights >= pi/2,
  /// coincident or out-of-domain points).
  void validate() const;
};

MarkedConfiguration makeConfiguration(const FuchsianGroup& G,
                                      const std::vector<Eigen::Vector3d>& points,
                                      const Eigen::VectorXd& heights);

/// Lifted-vertex label: marked index + group element.
struct VertexLabel {
  int marked = 0;
  Word word;
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
};

/// Face of the polyhedron: supporting plane in the projective model
/// (K=0: ambient coordinates) plus the vertex cycle, counterclockwise
/// seen from outside (the convex side). ambientNormal is the
/// form-orthogonal plane normal in the ambient flat space, oriented with
/// c_K on the concave side.
struct PolyFace {
  Eigen::Vector3d modelNormal = Eigen::Vector3d::Zero();
  double modelOffset = 0;
  Eigen::Vector4d ambientNormal = Eigen::Vector4d::Zero();
  std::vector<VertexLabel> cycle;
};

/// Adjacency of a face side: the neighbor's representative face, side, and
/// the group element carrying the representative onto the actual neighbor.
struct FaceNeighbor {
  int face = -1;
  int side = -1;
  Eigen::Matrix3d transfer = Eigen::Matrix3d::Identity();
  Word transferWord;
};

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double margin = 0; // positive margins pass
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool pass() const;
  const ValidationCheck& check(const std::string& name) const;
};

/// Convex Fuchsian polyhedron: orbit-reduced certified face lattice over a
/// marked configuration.
struct FuchsianPolyhedron {
  Space space = Space::Minkowski3;
  MarkedConfiguration config;
  int hullRadius = 2; // L_hull
  std::vector<PolyFace> faces;
  std::vector<std::vector<FaceNeighbor>> neighbors; // per face, per side

  int K() const { return config.K(); }
  int n() const { return config.n(); }

  /// Ambient coordinates of a labeled vertex.
  Eigen::Vector4d vertexCoords(const VertexLabel& l) const;
  SpaceformPoint vertexPoint(const VertexLabel& l) const;

  /// Ambient supporting-plane normal of a face (form-orthogonal to the
  /// face), oriented so that c_K sits on the concave side.
  Eigen::Vector4d ambientFaceNormal(int face) const;
};

/// Model-space coordinates used for hull building: a vertex over y at
/// height h maps to t*y with t = h, tanh h, tan h for K = 0, 1, -1.
double modelRadialScale(int K, double h);
Eigen::Vector3d modelPoint(int K, const Eigen::Vector3d& y, double h);

/// Boundary of the convex hull of the marked orbits, certified stable
/// between hull radii and orbit-reduced. Throws "hull-unstable" if no
/// stabilization by maxRadius.
FuchsianPolyhedron buildHullPolyhedron(const MarkedConfiguration& config, int hullRadius = 2,
                                       int maxRadius = 8);

/// Structural report: spacelike faces, c_K concavity, light-cone
/// avoidance, convexity, Omega_{-1} containment (K=-1), projection
/// injectivity samples, quotient-tiling audit.
ValidationReport validatePolyhedron(const FuchsianPolyhedron& P);

/// Second anti-de Sitter model height over disc position (a,b):
///   z = cot(h) sqrt(1-a^2-b^2)      (K = -1)
/// and the Minkowski-height dilation tan(t) of an AdS distance (K = 0).
double heightToModel(int K, double h, double a = 0, double b = 0);
double modelToHeight(int K, double z, double a = 0, double b = 0);

/// Polar dual: vertices of the dual are the face normals, faces of the
/// dual are the vertex stars; same acting group through the common
/// SO+(2,1) embedding. Input in DeSitter3 or Hyperbolic3.
FuchsianPolyhedron dualPolyhedron(const FuchsianPolyhedron& P);

/// One edge crossing of an intrinsic geodesic: parameter, one-sided
/// derivative jump of the coordinate function u, edge length coordinate.
struct EdgeCrossing {
  double t = 0;
  double jump = 0;
};

struct ConvexityProfile {
  std::vector<EdgeCrossing> crossings;
  double maxSecondDerivResidual = 0; // |u'' + 1| (K=0) or |u'' + u| (K=1) in faces
};

/// Traces a unit-speed intrinsic geodesic from an interior point of a face
/// across maxCrossings edges, reporting the derivative jumps of
/// u = d^2/2 (K=0) or cosh d (K=1). Throws "vertex-hit" when the path
/// meets a vertex.
ConvexityProfile convexityProfile(const FuchsianPolyhedron& P, int startFace, double angle,
                                  int maxCrossings);

} // namespace fuchsian
