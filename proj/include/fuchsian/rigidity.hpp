#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fuchsian/cone_metric.hpp"
#include "fuchsian/pogorelov.hpp"
#include "fuchsian/polyhedron.hpp"

namespace fuchsian {

/// Coordinates on the space of convex Fuchsian polyhedra with n marked
/// vertices: Z-V-C values, marked-point chart coordinates on O_K, heights.
struct ChartPoint {
  int K = 0;
  int genus = 2;
  int n = 1;
  Eigen::VectorXd zvc;                 // 6g-6
  std::vector<Eigen::Vector2d> marked; // (y1, y2) hyperboloid chart
  Eigen::VectorXd heights;             // n

  int dim() const { return 6 * genus - 6 + 3 * n; }
  Eigen::VectorXd pack() const;
  static ChartPoint unpack(int K, int genus, int n, const Eigen::VectorXd& values);
};

/// Configuration at a chart point (no domain validation: finite-difference
/// stencils wander freely).
MarkedConfiguration configFromChart(const ChartPoint& c);

/// Chart coordinates of an existing instance.
ChartPoint chartFromInstance(const FuchsianPolyhedron& P);

/// Squared edge lengths over T at the chart point.
Eigen::VectorXd epAtChart(const ChartPoint& c, const Triangulation& T);

/// Finite-difference Jacobian of the squared-edge-length map over the
/// chart, with its singular values; pass iff the least singular value
/// clears 1e-6 times the largest.
struct RigidityCertificate {
  ChartPoint chart;
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd singularValues;
  double threshold = 0;
  bool pass = false;
};

RigidityCertificate epJacobian(const ChartPoint& c, const Triangulation& T);

/// First-order isometric deformation system of the polyhedron: unknowns
/// are tangent vertex velocities plus so(2,1) cocycle values per
/// generator; equations are edge-length stationarity over T plus the
/// relator-cocycle integrability rows.
struct DeformationSystem {
  Eigen::MatrixXd matrix; // (E + 3) x (3n + 6g)
  std::vector<Eigen::Matrix<double, 4, 3>> tangentBasis; // per marked vertex
};

DeformationSystem assembleDeformationSystem(const MarkedConfiguration& config,
                                            const Triangulation& T);

struct KernelAnalysis {
  int kernelDim = 0;
  int trivialDim = 0;
  int excess = 0;
  double trivialResidual = 0;         // worst system residual of a trivial direction
  Eigen::MatrixXd kernelBasis;        // columns
  Eigen::VectorXd singularValues;
};

KernelAnalysis kernelAnalysis(const FuchsianPolyhedron& P, const Triangulation& T);

/// Unpacks a system kernel vector into deformation data.
FuchsianDeformation deformationFromVector(const MarkedConfiguration& config,
                                          const DeformationSystem& sys,
                                          const Eigen::VectorXd& v);

/// Transports kernel vectors to Minkowski and evaluates the image system;
/// returns the worst residual (the numeric shadow of the reduction of the
/// curved cases to the flat one).
double crossCheckTransport(const FuchsianPolyhedron& P, const Triangulation& T,
                           const KernelAnalysis& ka);

} // namespace fuchsian
