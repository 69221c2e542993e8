#include "fuchsian/pogorelov.hpp"

#include <cmath>
#include <random>

#include "fuchsian/log.hpp"

namespace fuchsian {

double KillingField::infinitesimalResidual() const {
  Eigen::Matrix4d J = formDiag(space).asDiagonal();
  int d = ambientDim(space);
  return (A.transpose() * J + J * A).topLeftCorner(d, d).cwiseAbs().maxCoeff();
}

KillingField makeKillingField(Space s, const Eigen::Matrix4d& A, const Eigen::Vector4d& b) {
  KillingField v;
  v.space = s;
  v.A = A;
  v.b = b;
  if (s != Space::Minkowski3 && b.cwiseAbs().maxCoeff() > 0)
    throw Error("bad-killing", "translation parts exist in Minkowski only");
  double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if (v.infinitesimalResidual() > 1e-12 * scale * scale)
    throw Error("bad-killing", "matrix is not infinitesimally form-preserving");
  return v;
}

std::vector<KillingField> killingBasis(Space s) {
  std::vector<KillingField> basis;
  Eigen::Vector4d j = formDiag(s);
  int d = ambientDim(s);
  for (int p = 0; p < d; p++) {
    for (int q = p + 1; q < d; q++) {
      Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
      A(p, q) = j(p);
      A(q, p) = -j(q);
      basis.push_back(makeKillingField(s, A));
    }
  }
  if (s == Space::Minkowski3) {
    for (int p = 0; p < 3; p++) {
      Eigen::Vector4d b = Eigen::Vector4d::Zero();
      b(p) = 1.0;
      basis.push_back(makeKillingField(s, Eigen::Matrix4d::Zero(), b));
    }
  }
  return basis;
}

RadialSplit splitRadial(const SpaceformPoint& x, const Eigen::Vector4d& Z) {
  Eigen::Vector4d R = radialUnit(x); // throws at c_K where the direction is undefined
  RadialSplit s;
  s.radial = -formProduct(x.space, Z, R);
  s.lateral = Z - s.radial * R;
  return s;
}

PushedVector pogorelovPush(int K, const SpaceformPoint& x, const Eigen::Vector4d& Z) {
  if (K != 1 && K != -1) throw Error("bad-curvature", "Pogorelov maps run from K in {-1,1}");
  ModelKind kind = K == 1 ? ModelKind::MinkFromDeSitter : ModelKind::MinkFromAdS;
  RadialSplit split = splitRadial(x, Z);
  AmbientVector y = modelMap(kind, x);
  Eigen::Vector3d lateral0 = modelMapDifferential(kind, x, split.lateral);
  PushedVector out;
  out.base = SpaceformPoint::make(Space::Minkowski3, Eigen::Vector4d(y.v));
  Eigen::Vector4d R0 = radialUnit(out.base);
  out.vector = Eigen::Vector4d(lateral0(0), lateral0(1), lateral0(2), 0.0) + split.radial * R0;
  return out;
}

Eigen::Vector4d pogorelovPull(int K, const SpaceformPoint& x0, const Eigen::Vector4d& Z0) {
  if (K != 1 && K != -1) throw Error("bad-curvature", "Pogorelov maps run from K in {-1,1}");
  if (x0.space != Space::Minkowski3) throw Error("space-mismatch", "pull starts from Minkowski");
  ModelKind kind = K == 1 ? ModelKind::MinkFromDeSitter : ModelKind::MinkFromAdS;
  RadialSplit split0 = splitRadial(x0, Z0);
  SpaceformPoint x = modelUnmap(kind, AmbientVector(Eigen::Vector3d(x0.coords().head<3>()),
                                                    Signature{2, 1}));
  // invert the model differential on the tangent space at x
  Space s = x.space;
  const Eigen::Vector4d& p = x.coords();
  Eigen::Matrix<double, 4, 3> basis;
  {
    int col = 0;
    for (int c = 0; c < 4 && col < 3; c++) {
      Eigen::Vector4d e = Eigen::Vector4d::Unit(c);
      Eigen::Vector4d t = e - (formProduct(s, e, p) / formProduct(s, p, p)) * p;
      // Gram-Schmidt against the accepted columns in the euclidean sense
      for (int k = 0; k < col; k++) t -= t.dot(basis.col(k)) * basis.col(k);
      if (t.norm() < 1e-8) continue;
      basis.col(col++) = t.normalized();
    }
    if (col < 3) throw Error("degenerate", "tangent basis construction failed");
  }
  Eigen::Matrix3d M;
  for (int c = 0; c < 3; c++) M.col(c) = modelMapDifferential(kind, x, basis.col(c));
  Eigen::Vector3d coeff = M.fullPivLu().solve(Eigen::Vector3d(split0.lateral.head<3>()));
  Eigen::Vector4d lateral = basis * coeff;
  return lateral + split0.radial * radialUnit(x);
}

double lieDerivative(Space s, const VectorField& v, const SpaceformPoint& x,
                     const Eigen::Vector4d& X, const Eigen::Vector4d& Y) {
  const Eigen::Vector4d p = x.coords();
  auto tangential = [s](const Eigen::Vector4d& u, const Eigen::Vector4d& at) {
    if (s == Space::Minkowski3) return u;
    return Eigen::Vector4d(u - (formProduct(s, u, at) / formProduct(s, at, at)) * at);
  };
  Eigen::Vector4d Xt = tangential(X, p), Yt = tangential(Y, p);
  // ambient-constant extensions projected tangentially
  auto fieldX = [&](const Eigen::Vector4d& q) { return tangential(X, q); };
  auto fieldY = [&](const Eigen::Vector4d& q) { return tangential(Y, q); };

  auto dirDeriv = [&](const VectorField& f, const Eigen::Vector4d& at, const Eigen::Vector4d& dir,
                      double h) {
    return Eigen::Vector4d((f(at + h * dir) - f(at - h * dir)) / (2 * h));
  };

  auto value = [&](double h) {
    Eigen::Vector4d vx = v(p);
    // v( g(X~, Y~) )
    auto scalar = [&](const Eigen::Vector4d& q) {
      return formProduct(s, fieldX(q), fieldY(q));
    };
    double term1 = (scalar(p + h * vx) - scalar(p - h * vx)) / (2 * h);
    // [v, X~] = DX~ . v - Dv . X~
    Eigen::Vector4d brX = dirDeriv(fieldX, p, vx, h) - dirDeriv(v, p, Xt, h);
    Eigen::Vector4d brY = dirDeriv(fieldY, p, vx, h) - dirDeriv(v, p, Yt, h);
    return term1 - formProduct(s, brX, Yt) - formProduct(s, brY, Xt);
  };

  double h = 1e-5 * std::max(1.0, p.cwiseAbs().maxCoeff());
  double coarse = value(h), fine = value(h / 2);
  return (4 * fine - coarse) / 3;
}

VectorField pogorelovTransportField(int K, const VectorField& v) {
  ModelKind kind = K == 1 ? ModelKind::MinkFromDeSitter : ModelKind::MinkFromAdS;
  return [K, kind, v](const Eigen::Vector4d& y) {
    SpaceformPoint x = modelUnmap(kind, AmbientVector(Eigen::Vector3d(y.head<3>()), Signature{2, 1}));
    Eigen::Vector4d vx = v(x.coords());
    return pogorelovPush(K, x, vx).vector;
  };
}

double verifyKillingTransport(int K, const KillingField& v, int samples, uint64_t seed,
                              bool pullDirection) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0, 2 * M_PI), radius(0, 1.2),
      height(0.2, K == -1 ? 1.3 : 1.5);
  Space sK = spaceOfCurvature(K);
  double worst = 0;

  VectorField field;
  Space evalSpace;
  if (!pullDirection) {
    VectorField base = [v](const Eigen::Vector4d& p) { return v.eval(p); };
    field = pogorelovTransportField(K, base);
    evalSpace = Space::Minkowski3;
  } else {
    ModelKind kind = K == 1 ? ModelKind::MinkFromDeSitter : ModelKind::MinkFromAdS;
    field = [K, kind, v, sK](const Eigen::Vector4d& q) {
      SpaceformPoint x = SpaceformPoint::make(sK, q); // project back onto the quadric
      AmbientVector y = modelMap(kind, x);
      SpaceformPoint x0 = SpaceformPoint::make(Space::Minkowski3, Eigen::Vector4d(y.v));
      return pogorelovPull(K, x0, v.eval(x0.coords()));
    };
    evalSpace = sK;
  }

  for (int i = 0; i < samples; i++) {
    Eigen::Vector3d yb = hypPolar(radius(rng), angle(rng));
    SpaceformPoint xK = liftFromHyperboloid(K, yb, height(rng));
    SpaceformPoint at = evalSpace == Space::Minkowski3
                            ? SpaceformPoint::make(Space::Minkowski3,
                                                   Eigen::Vector4d(modelMap(K == 1
                                                                                ? ModelKind::MinkFromDeSitter
                                                                                : ModelKind::MinkFromAdS,
                                                                            xK)
                                                                       .v))
                            : xK;
    // two random tangent directions at the evaluation point
    std::normal_distribution<double> gauss(0, 1);
    auto randTangent = [&]() {
      Eigen::Vector4d u;
      for (int c = 0; c < 4; c++) u(c) = gauss(rng);
      if (evalSpace == Space::Minkowski3) {
        u(3) = 0;
        return u;
      }
      const Eigen::Vector4d& p = at.coords();
      u -= (formProduct(evalSpace, u, p) / formProduct(evalSpace, p, p)) * p;
      return u;
    };
    Eigen::Vector4d X = randTangent(), Y = randTangent();
    worst = std::max(worst, std::abs(lieDerivative(evalSpace, field, at, X, Y)));
  }
  return worst;
}

KillingField fuchsianExtend(const Eigen::Matrix3d& L, int K) {
  Eigen::Matrix3d J3 = Eigen::Vector3d(1, 1, -1).asDiagonal();
  double lscale = std::max(1.0, L.cwiseAbs().maxCoeff());
  if ((L.transpose() * J3 + J3 * L).cwiseAbs().maxCoeff() > 1e-10 * lscale * lscale)
    throw Error("bad-killing", "not a Killing field of the hyperbolic plane");
  Space s = spaceOfCurvature(K);
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  switch (K) {
    case 0: A.topLeftCorner(3, 3) = L; break;
    case 1: A.bottomRightCorner(3, 3) = L; break;
    case -1: A.topLeftCorner(3, 3) = L; break;
  }
  return makeKillingField(s, A);
}

namespace {

// cocycle value of a word from per-generator values: A(uv) = A(u) + Ad(u) A(v)
Eigen::Matrix3d cocycleOfWord(const FuchsianGroup& G, const std::vector<Eigen::Matrix3d>& gen,
                              const Word& w) {
  Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d prefix = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d J = Eigen::Vector3d(1, 1, -1).asDiagonal();
  for (int8_t l : w.letters) {
    int idx = std::abs(l) - 1;
    Eigen::Matrix3d R = G.generators[idx];
    Eigen::Matrix3d Aletter;
    if (l > 0) {
      Aletter = gen[idx];
    } else {
      Eigen::Matrix3d Rinv = J * R.transpose() * J;
      Aletter = -(Rinv * gen[idx] * R);
      R = Rinv;
    }
    acc += prefix * Aletter * (J * prefix.transpose() * J);
    prefix = prefix * R;
  }
  // project the accumulated drift back onto so(2,1)
  return 0.5 * (acc - J * acc.transpose() * J);
}

Word relatorWord(int genus) {
  Word w;
  for (int j = 0; j < genus; j++) {
    int a = 2 * j + 1, b = 2 * j + 2;
    for (int l : {a, b, -a, -b}) w.letters.push_back(static_cast<int8_t>(l));
  }
  return w;
}

} // namespace

double equivarianceResidual(const FuchsianPolyhedron& P, const FuchsianDeformation& Z) {
  const FuchsianGroup& G = P.config.group;
  if (static_cast<int>(Z.vertexVelocity.size()) != P.n() ||
      static_cast<int>(Z.cocycle.size()) != 2 * G.genus)
    throw Error("bad-deformation", "deformation data sized for another instance");
  // integrability of the cocycle over the surface-group relator
  return cocycleOfWord(G, Z.cocycle, relatorWord(G.genus)).cwiseAbs().maxCoeff();
}

TransportedDeformation transportDeformation(const FuchsianPolyhedron& P,
                                            const FuchsianDeformation& Z) {
  int K = P.K();
  if (K != 1 && K != -1)
    throw Error("bad-curvature", "transport runs from the curved models to Minkowski");
  TransportedDeformation out;
  out.inputResidual = equivarianceResidual(P, Z);
  if (out.inputResidual > 1e-8)
    throw Error("bad-deformation",
                "input equivariance residual " + std::to_string(out.inputResidual));

  const MarkedConfiguration& cfg = P.config;
  out.data.cocycle = Z.cocycle; // the group morphism acts as the identity on so(2,1)
  out.data.vertexVelocity.resize(P.n());
  for (int i = 0; i < P.n(); i++)
    out.data.vertexVelocity[i] = pogorelovPush(K, cfg.vertex(i), Z.vertexVelocity[i]).vector;

  // commutation check: the pushed equivariant extension over each
  // generator equals the Minkowski equivariant extension of the pushed data
  double worst = 0;
  for (int g = 0; g < 2 * cfg.group.genus; g++) {
    Eigen::Matrix3d m = cfg.group.generators[g];
    Isometry Eg = extendIsometry(m, K);
    Eigen::Matrix4d Acurved = fuchsianExtend(Z.cocycle[g], K).A;
    for (int i = 0; i < P.n(); i++) {
      SpaceformPoint xi = cfg.vertex(i);
      Eigen::Vector4d translated = Eg.applyRaw(xi.coords());
      Eigen::Vector4d velocityK = Acurved * translated + Eg.applyTangent(Z.vertexVelocity[i]);
      PushedVector lhs = pogorelovPush(K, SpaceformPoint::make(spaceOfCurvature(K), translated),
                                       velocityK);
      // Minkowski side
      Eigen::Vector4d y0 = pogorelovPush(K, xi, Z.vertexVelocity[i]).base.coords();
      Eigen::Matrix4d A0 = fuchsianExtend(Z.cocycle[g], 0).A;
      Eigen::Vector4d ty0 = Eigen::Vector4d::Zero();
      ty0.head<3>() = m * y0.head<3>();
      Eigen::Vector4d rhsVec = A0 * ty0;
      rhsVec.head<3>() += m * out.data.vertexVelocity[i].head<3>();
      worst = std::max(worst, (lhs.vector - rhsVec).cwiseAbs().maxCoeff());
      worst = std::max(worst, (lhs.base.coords() - ty0).cwiseAbs().maxCoeff());
    }
  }
  out.outputResidual = worst;
  return out;
}

} // namespace fuchsian
