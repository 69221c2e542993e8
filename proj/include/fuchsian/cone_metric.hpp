#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fuchsian/polyhedron.hpp"

namespace fuchsian {

/// Edge of the quotient triangulation with its lift address: the edge runs
/// from the identity lift of vertex a to the w-translate of the lift of b.
struct TriEdge {
  int a = 0, b = 0;
  Word word;
};

/// Oriented triangle; e[k] is the edge id of the side (v[k], v[k+1]).
struct TriFace {
  int v[3];
  int e[3];
};

/// Combinatorial triangulation of the genus-g quotient surface with n
/// marked vertices; e = 6g-6+3n.
struct Triangulation {
  int genus = 2;
  int n = 1;
  std::vector<TriFace> faces;
  std::vector<TriEdge> edges;

  int edgeCount() const { return static_cast<int>(edges.size()); }
  /// V - E + F == 2 - 2g and e == 6g-6+3n; throws otherwise.
  void validate() const;
};

/// Cone metric of curvature K given by edge lengths over a triangulation.
struct ConeMetric {
  int K = 0;
  Triangulation tri;
  Eigen::VectorXd lengths;

  Eigen::VectorXd squaredLengths() const { return lengths.cwiseProduct(lengths); }
};

/// Interior angle opposite side c (law of cosines in curvature K).
double triangleAngle(int K, double a, double b, double c);

/// Per-vertex total cone angles of the metric.
Eigen::VectorXd coneAngles(const ConeMetric& m);

/// Gauss-Bonnet residual |K Area + sum(2pi - alpha_i) - 2pi(2-2g)|.
double gaussBonnetResidual(const ConeMetric& m);

/// Triangle inequalities (with the K=1 extras), cone angles > 2pi,
/// Gauss-Bonnet, and the partial >2pi proxy for K=1 loops of at most two
/// edges whose holonomy word is trivial.
ValidationReport validateConeMetric(const ConeMetric& m, const FuchsianGroup* holonomy = nullptr);

/// Induced cone metric of a polyhedron (fan triangulation of each face
/// from its least-index vertex; edge lengths by ambient separation).
ConeMetric induceMetric(const FuchsianPolyhedron& P);

/// Squared edge lengths of the configuration over a frozen triangulation,
/// in the triangulation's edge order.
Eigen::VectorXd epMap(const MarkedConfiguration& config, const Triangulation& T);

/// Whether the polyhedron's face lattice realizes T (compared by edge
/// address element keys and counts).
bool realizesTriangulation(const FuchsianPolyhedron& P, const Triangulation& T);

} // namespace fuchsian
