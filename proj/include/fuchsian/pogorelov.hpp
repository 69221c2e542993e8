#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "fuchsian/polyhedron.hpp"

namespace fuchsian {

/// Killing field of a model, v(x) = A x (+ b in Minkowski); A is
/// infinitesimally form-preserving: A^T J + J A = 0.
struct KillingField {
  Space space = Space::Minkowski3;
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  Eigen::Vector4d b = Eigen::Vector4d::Zero();

  Eigen::Vector4d eval(const Eigen::Vector4d& x) const { return A * x + b; }
  /// max |A^T J + J A|.
  double infinitesimalResidual() const;
};

/// The 6 basis Killing fields of a model.
std::vector<KillingField> killingBasis(Space s);

KillingField makeKillingField(Space s, const Eigen::Matrix4d& A,
                              const Eigen::Vector4d& b = Eigen::Vector4d::Zero());

/// Radial/lateral decomposition at x in Omega_K: Z = Zr R(x) + Zl with
/// <R, Zl> = 0 and R the future unit radial.
struct RadialSplit {
  double radial = 0;
  Eigen::Vector4d lateral = Eigen::Vector4d::Zero();
};

RadialSplit splitRadial(const SpaceformPoint& x, const Eigen::Vector4d& Z);

/// Infinitesimal Pogorelov map: lateral part pushed by the differential of
/// the projective map, signed radial coefficient preserved along the
/// Minkowski future radial.
struct PushedVector {
  SpaceformPoint base;           // phi_K(x) in Minkowski
  Eigen::Vector4d vector;        // tangent at base (4th slot zero)
};

PushedVector pogorelovPush(int K, const SpaceformPoint& x, const Eigen::Vector4d& Z);

/// Inverse transport: Minkowski tangent data back to M_K.
Eigen::Vector4d pogorelovPull(int K, const SpaceformPoint& x0, const Eigen::Vector4d& Z0);

/// Ambient vector field near the quadric (must be tangent to it on it).
using VectorField = std::function<Eigen::Vector4d(const Eigen::Vector4d&)>;

/// Numerical (L_v g)(X, Y) at x via ambient extensions of X, Y and central
/// differences with one Richardson level.
double lieDerivative(Space s, const VectorField& v, const SpaceformPoint& x,
                     const Eigen::Vector4d& X, const Eigen::Vector4d& Y);

/// The transported field Phi_K(v) on the Minkowski model.
VectorField pogorelovTransportField(int K, const VectorField& v);

/// Max |L_{Phi_K(v)} g_0| over sampled points and tangent pairs; the
/// bidirectional variant samples the pulled field on M_K instead.
double verifyKillingTransport(int K, const KillingField& v, int samples, uint64_t seed = 7,
                              bool pullDirection = false);

/// Extension of a Killing field of O_K (an so(2,1) matrix in the
/// hyperboloid model) to the Fuchsian Killing field of M_K; radial
/// component vanishes identically.
KillingField fuchsianExtend(const Eigen::Matrix3d& L, int K);

/// Fuchsian deformation data on a polyhedron: tangent velocities of the
/// marked vertex lifts plus the representation derivative, one so(2,1)
/// cocycle value per generator (a Fuchsian Killing direction).
struct FuchsianDeformation {
  std::vector<Eigen::Vector4d> vertexVelocity;
  std::vector<Eigen::Matrix3d> cocycle;
};

/// Equivariance residual of the data over the generators (the defect of
/// Z(rho(g) y) = d rho(g) (rho_vec(g) + Z)(y) evaluated on vertex lifts).
double equivarianceResidual(const FuchsianPolyhedron& P, const FuchsianDeformation& Z);

/// Vertexwise Pogorelov push plus the group-morphism transport of the
/// cocycle; checks the input equivariance residual (1e-8) and reports the
/// output residual on the image polyhedron data.
struct TransportedDeformation {
  FuchsianDeformation data;
  double inputResidual = 0;
  double outputResidual = 0;
};

TransportedDeformation transportDeformation(const FuchsianPolyhedron& P,
                                            const FuchsianDeformation& Z);

} // namespace fuchsian
