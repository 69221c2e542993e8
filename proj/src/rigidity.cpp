#include "fuchsian/rigidity.hpp"

#include <cmath>

#include "fuchsian/log.hpp"

namespace fuchsian {

Eigen::VectorXd ChartPoint::pack() const {
  Eigen::VectorXd v(dim());
  int z = static_cast<int>(zvc.size());
  v.head(z) = zvc;
  for (int i = 0; i < n; i++) v.segment(z + 2 * i, 2) = marked[i];
  v.tail(n) = heights;
  return v;
}

ChartPoint ChartPoint::unpack(int K, int genus, int n, const Eigen::VectorXd& values) {
  ChartPoint c;
  c.K = K;
  c.genus = genus;
  c.n = n;
  int z = 6 * genus - 6;
  if (values.size() != z + 3 * n) throw Error("bad-chart", "chart vector has the wrong size");
  c.zvc = values.head(z);
  for (int i = 0; i < n; i++) c.marked.push_back(values.segment(z + 2 * i, 2));
  c.heights = values.tail(n);
  return c;
}

MarkedConfiguration configFromChart(const ChartPoint& c) {
  ZVCCoordinates z;
  z.genus = c.genus;
  z.values = c.zvc;
  MarkedConfiguration cfg;
  cfg.group = groupFromZVC(z, c.K);
  cfg.space = spaceOfCurvature(c.K);
  for (const auto& m : c.marked) {
    Eigen::Vector3d y(m(0), m(1), std::sqrt(1 + m(0) * m(0) + m(1) * m(1)));
    cfg.points.push_back(y);
  }
  cfg.heights = c.heights;
  return cfg;
}

ChartPoint chartFromInstance(const FuchsianPolyhedron& P) {
  ChartPoint c;
  c.K = P.K();
  c.genus = P.config.group.genus;
  c.n = P.n();
  c.zvc = P.config.group.zvc.values.size() > 0 ? P.config.group.zvc.values
                                               : regularZVC(c.genus).values;
  for (const auto& y : P.config.points) c.marked.push_back(Eigen::Vector2d(y(0), y(1)));
  c.heights = P.config.heights;
  return c;
}

Eigen::VectorXd epAtChart(const ChartPoint& c, const Triangulation& T) {
  return epMap(configFromChart(c), T);
}

RigidityCertificate epJacobian(const ChartPoint& c, const Triangulation& T) {
  RigidityCertificate cert;
  cert.chart = c;
  int dim = c.dim();
  if (T.edgeCount() != dim) throw Error("bad-chart", "triangulation and chart dimensions differ");
  Eigen::VectorXd base = c.pack();

  auto evalAt = [&](const Eigen::VectorXd& v) {
    return epAtChart(ChartPoint::unpack(c.K, c.genus, c.n, v), T);
  };

  auto columns = [&](double hScale) {
    Eigen::MatrixXd J(dim, dim);
    for (int i = 0; i < dim; i++) {
      double h = hScale * std::max(1.0, std::abs(base(i)));
      Eigen::VectorXd up = base, dn = base;
      up(i) += h;
      dn(i) -= h;
      J.col(i) = (evalAt(up) - evalAt(dn)) / (2 * h);
    }
    return J;
  };

  try {
    cert.jacobian = columns(1e-6);
  } catch (const Error&) {
    try {
      cert.jacobian = columns(1e-7); // one stencil shrink before failing
    } catch (const Error& e) {
      throw Error("stencil-broken", std::string("combinatorics broke in the stencil: ") + e.what());
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cert.jacobian);
  cert.singularValues = svd.singularValues();
  cert.threshold = 1e-6 * cert.singularValues(0);
  cert.pass = cert.singularValues(dim - 1) > cert.threshold;
  return cert;
}

namespace {

// basis of so(2,1): free entries (0,1), (0,2), (1,2)
std::vector<Eigen::Matrix3d> so21Basis() {
  Eigen::Matrix3d B1, B2, B3;
  B1 << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  B2 << 0, 0, 1, 0, 0, 0, 1, 0, 0;
  B3 << 0, 0, 0, 0, 0, 1, 0, 1, 0;
  return {B1, B2, B3};
}

Eigen::Vector3d so21Coords(const Eigen::Matrix3d& A) {
  return {A(1, 0), A(2, 0), A(2, 1)};
}

// cocycle value of a word, A(uv) = A(u) + Ad(u) A(v), from per-generator values
Eigen::Matrix3d wordCocycle(const FuchsianGroup& G, const std::vector<Eigen::Matrix3d>& gen,
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

Eigen::Matrix<double, 4, 3> tangentBasisAt(const SpaceformPoint& x) {
  Eigen::Matrix<double, 4, 3> basis;
  if (x.space == Space::Minkowski3) {
    basis.setZero();
    basis(0, 0) = basis(1, 1) = basis(2, 2) = 1.0;
    return basis;
  }
  const Eigen::Vector4d& p = x.coords();
  int col = 0;
  for (int c = 0; c < 4 && col < 3; c++) {
    Eigen::Vector4d e = Eigen::Vector4d::Unit(c);
    Eigen::Vector4d t = e - (formProduct(x.space, e, p) / formProduct(x.space, p, p)) * p;
    for (int k = 0; k < col; k++) t -= t.dot(basis.col(k)) * basis.col(k);
    if (t.norm() < 1e-8) continue;
    basis.col(col++) = t.normalized();
  }
  if (col < 3) throw Error("degenerate", "tangent basis construction failed");
  return basis;
}

} // namespace

DeformationSystem assembleDeformationSystem(const MarkedConfiguration& config,
                                            const Triangulation& T) {
  const FuchsianGroup& G = config.group;
  int K = config.K();
  Space s = spaceOfCurvature(K);
  int n = config.n();
  int g2 = 2 * G.genus;
  int cols = 3 * n + 3 * g2;
  int rows = T.edgeCount() + 3;

  DeformationSystem sys;
  sys.matrix = Eigen::MatrixXd::Zero(rows, cols);
  for (int i = 0; i < n; i++) sys.tangentBasis.push_back(tangentBasisAt(config.vertex(i)));

  std::vector<Eigen::Matrix3d> basis = so21Basis();
  Eigen::Vector4d j4 = formDiag(s);

  for (int e = 0; e < T.edgeCount(); e++) {
    const TriEdge& edge = T.edges[e];
    Eigen::Vector4d p = config.vertex(edge.a).coords();
    Isometry Ew = extendIsometry(G.evalWord(edge.word), s);
    Eigen::Vector4d q = Ew.applyRaw(config.vertex(edge.b).coords());

    // d/dt <p, q> (K != 0) or |p - q|^2 (K = 0) under V_p, V_q
    auto rowContribution = [&](const Eigen::Vector4d& Vp, const Eigen::Vector4d& Vq) {
      if (K != 0)
        return Vp.cwiseProduct(j4).dot(q) + p.cwiseProduct(j4).dot(Vq);
      Eigen::Vector4d d = p - q;
      return 2 * d.cwiseProduct(j4).dot(Vp - Vq);
    };

    // vertex velocity unknowns
    for (int c = 0; c < 3; c++) {
      Eigen::Vector4d Vp = sys.tangentBasis[edge.a].col(c);
      sys.matrix(e, 3 * edge.a + c) += rowContribution(Vp, Eigen::Vector4d::Zero());
      Eigen::Vector4d Vq = Ew.applyTangent(sys.tangentBasis[edge.b].col(c));
      sys.matrix(e, 3 * edge.b + c) += rowContribution(Eigen::Vector4d::Zero(), Vq);
    }
    // cocycle unknowns: velocity A_w^ambient q, linear in the generator values
    for (int gIdx = 0; gIdx < g2; gIdx++) {
      for (int bIdx = 0; bIdx < 3; bIdx++) {
        std::vector<Eigen::Matrix3d> delta(g2, Eigen::Matrix3d::Zero());
        delta[gIdx] = basis[bIdx];
        Eigen::Matrix3d Aw = wordCocycle(G, delta, edge.word);
        Eigen::Matrix4d Aamb = fuchsianExtend(Aw.eval(), K).A;
        sys.matrix(e, 3 * n + 3 * gIdx + bIdx) +=
            rowContribution(Eigen::Vector4d::Zero(), Aamb * q);
      }
    }
  }

  // relator integrability rows
  Word rel = relatorWord(G.genus);
  for (int gIdx = 0; gIdx < g2; gIdx++) {
    for (int bIdx = 0; bIdx < 3; bIdx++) {
      std::vector<Eigen::Matrix3d> delta(g2, Eigen::Matrix3d::Zero());
      delta[gIdx] = basis[bIdx];
      Eigen::Vector3d coords = so21Coords(wordCocycle(G, delta, rel));
      for (int r = 0; r < 3; r++)
        sys.matrix(T.edgeCount() + r, 3 * n + 3 * gIdx + bIdx) = coords(r);
    }
  }

  // row normalization: kernels are unchanged and thresholds become
  // meaningful across rows of very different magnitude
  for (int r = 0; r < rows; r++) {
    double m = sys.matrix.row(r).cwiseAbs().maxCoeff();
    if (m > 0) sys.matrix.row(r) /= m;
  }
  return sys;
}

KernelAnalysis kernelAnalysis(const FuchsianPolyhedron& P, const Triangulation& T) {
  const MarkedConfiguration& cfg = P.config;
  DeformationSystem sys = assembleDeformationSystem(cfg, T);
  int cols = static_cast<int>(sys.matrix.cols());

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.matrix, Eigen::ComputeFullV);
  KernelAnalysis ka;
  ka.singularValues = svd.singularValues();
  double scale = ka.singularValues(0);
  int rank = 0;
  for (int i = 0; i < ka.singularValues.size(); i++)
    if (ka.singularValues(i) > 1e-8 * scale) rank++;
  ka.kernelDim = cols - rank;
  ka.kernelBasis = svd.matrixV().rightCols(ka.kernelDim);

  // trivial directions: coboundaries of the three Fuchsian Killing basis
  // fields, expressed in the system's unknowns
  std::vector<Eigen::Matrix3d> basis = so21Basis();
  Eigen::Matrix3d J = Eigen::Vector3d(1, 1, -1).asDiagonal();
  Eigen::MatrixXd trivial(cols, 3);
  for (int b = 0; b < 3; b++) {
    Eigen::VectorXd vec = Eigen::VectorXd::Zero(cols);
    Eigen::Matrix4d W = fuchsianExtend(basis[b], cfg.K()).A;
    for (int i = 0; i < cfg.n(); i++) {
      Eigen::Vector4d vel = W * cfg.vertex(i).coords();
      vec.segment(3 * i, 3) = sys.tangentBasis[i].transpose() * vel;
    }
    for (int g = 0; g < 2 * cfg.group.genus; g++) {
      const Eigen::Matrix3d& R = cfg.group.generators[g];
      Eigen::Matrix3d cocycle = basis[b] - R * basis[b] * (J * R.transpose() * J);
      vec.segment(3 * cfg.n() + 3 * g, 3) = so21Coords(cocycle);
    }
    trivial.col(b) = vec;
    ka.trivialResidual =
        std::max(ka.trivialResidual, (sys.matrix * vec).cwiseAbs().maxCoeff() /
                                         std::max(1.0, vec.cwiseAbs().maxCoeff()));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> tsvd(trivial);
  ka.trivialDim = 0;
  for (int i = 0; i < tsvd.singularValues().size(); i++)
    if (tsvd.singularValues()(i) > 1e-8 * tsvd.singularValues()(0)) ka.trivialDim++;
  ka.excess = ka.kernelDim - ka.trivialDim;
  return ka;
}

FuchsianDeformation deformationFromVector(const MarkedConfiguration& config,
                                          const DeformationSystem& sys,
                                          const Eigen::VectorXd& v) {
  FuchsianDeformation z;
  int n = config.n();
  for (int i = 0; i < n; i++)
    z.vertexVelocity.push_back(sys.tangentBasis[i] * v.segment(3 * i, 3));
  std::vector<Eigen::Matrix3d> basis = so21Basis();
  for (int g = 0; g < 2 * config.group.genus; g++) {
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    for (int b = 0; b < 3; b++) A += v(3 * n + 3 * g + b) * basis[b];
    z.cocycle.push_back(A);
  }
  return z;
}

double crossCheckTransport(const FuchsianPolyhedron& P, const Triangulation& T,
                           const KernelAnalysis& ka) {
  int K = P.K();
  if (K == 0) throw Error("bad-curvature", "transport cross-check runs from K in {-1,1}");
  const MarkedConfiguration& cfg = P.config;
  DeformationSystem sys = assembleDeformationSystem(cfg, T);

  // image configuration under the projective map: same base points, the
  // heights dilate by tanh (K=1) or tan (K=-1)
  MarkedConfiguration flat = cfg;
  flat.space = Space::Minkowski3;
  flat.group.K = 0;
  for (int i = 0; i < cfg.n(); i++) flat.heights(i) = modelRadialScale(K, cfg.heights(i));
  DeformationSystem sys0 = assembleDeformationSystem(flat, T);

  double worst = 0;
  for (int k = 0; k < ka.kernelDim; k++) {
    FuchsianDeformation z = deformationFromVector(cfg, sys, ka.kernelBasis.col(k));
    TransportedDeformation tz = transportDeformation(P, z);
    Eigen::VectorXd v0 = Eigen::VectorXd::Zero(sys0.matrix.cols());
    for (int i = 0; i < cfg.n(); i++)
      v0.segment(3 * i, 3) = tz.data.vertexVelocity[i].head<3>();
    std::vector<Eigen::Matrix3d> basis = so21Basis();
    for (int g = 0; g < 2 * cfg.group.genus; g++)
      v0.segment(3 * cfg.n() + 3 * g, 3) = so21Coords(tz.data.cocycle[g]);
    double res = (sys0.matrix * v0).cwiseAbs().maxCoeff() /
                 std::max(1.0, v0.cwiseAbs().maxCoeff());
    worst = std::max(worst, res);
  }
  return worst;
}

} // namespace fuchsian
