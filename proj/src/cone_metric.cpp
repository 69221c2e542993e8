#include "fuchsian/cone_metric.hpp"

#include <algorithm>
#include <cmath>

#include "fuchsian/log.hpp"

namespace fuchsian {

void Triangulation::validate() const {
  int V = n, E = edgeCount(), F = static_cast<int>(faces.size());
  if (V - E + F != 2 - 2 * genus)
    throw Error("bad-triangulation", "Euler characteristic mismatch");
  if (E != 6 * genus - 6 + 3 * n)
    throw Error("bad-triangulation", "edge count is not 6g-6+3n");
  std::vector<int> uses(E, 0);
  for (const auto& f : faces)
    for (int k = 0; k < 3; k++) uses.at(f.e[k])++;
  for (int u : uses)
    if (u != 2) throw Error("bad-triangulation", "every edge must bound two corners");
}

double triangleAngle(int K, double a, double b, double c) {
  if (a <= 0 || b <= 0 || c <= 0) throw Error("domain", "side lengths must be positive");
  switch (K) {
    case 0: {
      if (c >= a + b || a >= b + c || b >= c + a)
        throw Error("domain", "triangle inequality violated");
      return clampedAcos((a * a + b * b - c * c) / (2 * a * b));
    }
    case -1: {
      if (c >= a + b || a >= b + c || b >= c + a)
        throw Error("domain", "triangle inequality violated");
      return clampedAcos((std::cosh(a) * std::cosh(b) - std::cosh(c)) /
                         (std::sinh(a) * std::sinh(b)));
    }
    case 1: {
      if (a >= M_PI || b >= M_PI || c >= M_PI)
        throw Error("domain", "spherical sides must stay below pi");
      if (a + b + c >= 2 * M_PI) throw Error("domain", "spherical perimeter must stay below 2pi");
      if (c >= a + b || a >= b + c || b >= c + a)
        throw Error("domain", "triangle inequality violated");
      return clampedAcos((std::cos(c) - std::cos(a) * std::cos(b)) /
                         (std::sin(a) * std::sin(b)));
    }
  }
  throw Error("bad-curvature", "K must be in {-1,0,1}");
}

Eigen::VectorXd coneAngles(const ConeMetric& m) {
  Eigen::VectorXd angles = Eigen::VectorXd::Zero(m.tri.n);
  for (const auto& f : m.tri.faces) {
    for (int k = 0; k < 3; k++) {
      // corner at v[k] between sides e[k] and e[k+2], opposite e[k+1]
      double a = m.lengths(f.e[k]);
      double b = m.lengths(f.e[(k + 2) % 3]);
      double c = m.lengths(f.e[(k + 1) % 3]);
      angles(f.v[k]) += triangleAngle(m.K, a, b, c);
    }
  }
  return angles;
}

namespace {

double triangleArea(int K, double a, double b, double c) {
  double s = triangleAngle(K, a, b, c) + triangleAngle(K, b, c, a) + triangleAngle(K, c, a, b);
  switch (K) {
    case 0: return 0; // unused: the K=0 Gauss-Bonnet term vanishes
    case -1: return M_PI - s;
    case 1: return s - M_PI;
  }
  return 0;
}

} // namespace

double gaussBonnetResidual(const ConeMetric& m) {
  double area = 0;
  if (m.K != 0)
    for (const auto& f : m.tri.faces)
      area += triangleArea(m.K, m.lengths(f.e[0]), m.lengths(f.e[1]), m.lengths(f.e[2]));
  Eigen::VectorXd alpha = coneAngles(m);
  double defect = 0;
  for (int i = 0; i < m.tri.n; i++) defect += 2 * M_PI - alpha(i);
  return std::abs(m.K * area + defect - 2 * M_PI * (2 - 2 * m.tri.genus));
}

ValidationReport validateConeMetric(const ConeMetric& m, const FuchsianGroup* holonomy) {
  ValidationReport rep;
  m.tri.validate();

  double worstTriangle = 1e300;
  bool trianglesOk = true;
  for (const auto& f : m.tri.faces) {
    double a = m.lengths(f.e[0]), b = m.lengths(f.e[1]), c = m.lengths(f.e[2]);
    double slack = std::min({a + b - c, b + c - a, c + a - b});
    if (m.K == 1) slack = std::min({slack, M_PI - a, M_PI - b, M_PI - c, 2 * M_PI - a - b - c});
    worstTriangle = std::min(worstTriangle, slack);
    trianglesOk = trianglesOk && slack > 0;
  }
  rep.checks.push_back({"triangle-inequalities", trianglesOk, worstTriangle});

  double worstAngle = 1e300;
  if (trianglesOk) {
    Eigen::VectorXd alpha = coneAngles(m);
    for (int i = 0; i < m.tri.n; i++) worstAngle = std::min(worstAngle, alpha(i) - 2 * M_PI);
  } else {
    worstAngle = -1;
  }
  rep.checks.push_back({"negative-singular-curvature", worstAngle > 0, worstAngle});

  double gb = trianglesOk ? gaussBonnetResidual(m) : 1.0;
  rep.checks.push_back({"gauss-bonnet", gb < 1e-8, 1e-8 - gb});

  if (m.K == 1) {
    // partial proxy: loops of at most two edges with trivial holonomy word
    // must be longer than 2pi; full geodesic verification is out of scope
    bool pass = true;
    double margin = 1e300;
    if (holonomy != nullptr) {
      auto trivial = [&](const Word& w) {
        return (holonomy->evalWord(w) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-6;
      };
      for (const auto& e : m.tri.edges) {
        if (e.a == e.b && trivial(e.word)) {
          margin = std::min(margin, m.lengths(&e - m.tri.edges.data()) - 2 * M_PI);
          pass = pass && margin > 0;
        }
      }
      for (size_t i = 0; i < m.tri.edges.size(); i++) {
        for (size_t j = i + 1; j < m.tri.edges.size(); j++) {
          const TriEdge& e1 = m.tri.edges[i];
          const TriEdge& e2 = m.tri.edges[j];
          if (!((e1.a == e2.a && e1.b == e2.b) || (e1.a == e2.b && e1.b == e2.a))) continue;
          Word loop = e1.a == e2.a ? e1.word.concat(e2.word.inverse())
                                   : e1.word.concat(e2.word);
          if (!trivial(loop)) continue;
          double len = m.lengths(static_cast<int>(i)) + m.lengths(static_cast<int>(j));
          margin = std::min(margin, len - 2 * M_PI);
          pass = pass && len > 2 * M_PI;
        }
      }
    }
    rep.checks.push_back({"contractible-loop-proxy-partial", pass, margin == 1e300 ? 1.0 : margin});
  }
  return rep;
}

namespace {

// canonical address of an edge between two vertex labels; the word runs
// from the first endpoint's frame to the second
struct EdgeAddress {
  int a, b;
  Word w;
};

bool wordLess(const Word& x, const Word& y) { return x < y; }

EdgeAddress canonicalAddress(const FuchsianGroup& G, const VertexLabel& la,
                             const VertexLabel& lb) {
  Word fwd = la.word.inverse().concat(lb.word);
  Word bwd = fwd.inverse();
  if (la.marked < lb.marked) return {la.marked, lb.marked, fwd};
  if (lb.marked < la.marked) return {lb.marked, la.marked, bwd};
  // equal marked ends: orient by the group element, not the spelling, so
  // the two incidences of one edge orbit agree
  Eigen::Vector3d probe(0.31, 0.57, std::sqrt(1 + 0.31 * 0.31 + 0.57 * 0.57));
  Eigen::Vector3d pf = G.evalWord(fwd) * probe;
  Eigen::Vector3d pb = G.evalWord(bwd) * probe;
  for (int c = 0; c < 3; c++) {
    if (pf(c) < pb(c) - 1e-6) return {la.marked, lb.marked, fwd};
    if (pf(c) > pb(c) + 1e-6) return {lb.marked, la.marked, bwd};
  }
  return {la.marked, lb.marked, fwd}; // self-inverse element: both agree
}

double edgeLength(const MarkedConfiguration& cfg, Space space, const EdgeAddress& ad) {
  SpaceformPoint x = liftVertex(space, cfg.points[ad.a], cfg.heights(ad.a));
  Isometry g = extendIsometry(cfg.group.evalWord(ad.w), space);
  SpaceformPoint y = g.apply(liftVertex(space, cfg.points[ad.b], cfg.heights(ad.b)));
  Separation s = separation(x, y);
  if (s.cls != SeparationClass::Spacelike)
    throw Error("edge-not-spacelike", "edge is not spacelike-realizable");
  return s.length;
}

// element key for address comparison across spellings of one group element
std::vector<double> addressKey(const MarkedConfiguration& cfg, const EdgeAddress& ad) {
  Eigen::Matrix3d m = cfg.group.evalWord(ad.w);
  Eigen::Vector3d p = m * Eigen::Vector3d(0.31, 0.57, std::sqrt(1 + 0.31 * 0.31 + 0.57 * 0.57));
  return {static_cast<double>(ad.a), static_cast<double>(ad.b), p(0), p(1), p(2)};
}

} // namespace

ConeMetric induceMetric(const FuchsianPolyhedron& P) {
  const MarkedConfiguration& cfg = P.config;
  ConeMetric m;
  m.K = P.K();
  m.tri.genus = cfg.group.genus;
  m.tri.n = P.n();

  struct PendingEdge {
    EdgeAddress ad;
    std::vector<double> key;
  };
  std::vector<PendingEdge> edges;
  auto edgeId = [&](const VertexLabel& la, const VertexLabel& lb) {
    EdgeAddress ad = canonicalAddress(cfg.group, la, lb);
    std::vector<double> key = addressKey(cfg, ad);
    for (size_t i = 0; i < edges.size(); i++) {
      if (edges[i].ad.a != ad.a || edges[i].ad.b != ad.b) continue;
      bool same = true;
      for (int c = 2; c < 5 && same; c++) same = std::abs(edges[i].key[c] - key[c]) < 1e-6;
      if (same) return static_cast<int>(i);
    }
    edges.push_back({ad, key});
    return static_cast<int>(edges.size()) - 1;
  };

  // fan triangulation of each face from its least-index vertex
  for (size_t f = 0; f < P.faces.size(); f++) {
    const auto& cyc = P.faces[f].cycle;
    int mSize = static_cast<int>(cyc.size());
    int root = 0;
    for (int k = 1; k < mSize; k++) {
      if (cyc[k].marked < cyc[root].marked ||
          (cyc[k].marked == cyc[root].marked && wordLess(cyc[k].word, cyc[root].word)))
        root = k;
    }
    for (int j = 1; j + 1 < mSize; j++) {
      const VertexLabel& A = cyc[root];
      const VertexLabel& B = cyc[(root + j) % mSize];
      const VertexLabel& C = cyc[(root + j + 1) % mSize];
      TriFace tf;
      tf.v[0] = A.marked;
      tf.v[1] = B.marked;
      tf.v[2] = C.marked;
      tf.e[0] = edgeId(A, B);
      tf.e[1] = edgeId(B, C);
      tf.e[2] = edgeId(C, A);
      m.tri.faces.push_back(tf);
    }
  }

  // frozen edge order: lexicographic in (min vertex, max vertex, word key)
  std::vector<int> order(edges.size());
  for (size_t i = 0; i < edges.size(); i++) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    const EdgeAddress& ex = edges[x].ad;
    const EdgeAddress& ey = edges[y].ad;
    if (ex.a != ey.a) return ex.a < ey.a;
    if (ex.b != ey.b) return ex.b < ey.b;
    return wordLess(ex.w, ey.w);
  });
  std::vector<int> rank(edges.size());
  for (size_t i = 0; i < order.size(); i++) rank[order[i]] = static_cast<int>(i);
  for (auto& f : m.tri.faces)
    for (int k = 0; k < 3; k++) f.e[k] = rank[f.e[k]];

  m.tri.edges.resize(edges.size());
  m.lengths.resize(edges.size());
  for (size_t i = 0; i < edges.size(); i++) {
    const EdgeAddress& ad = edges[order[i]].ad;
    m.tri.edges[i] = TriEdge{ad.a, ad.b, ad.w};
    m.lengths(i) = edgeLength(cfg, P.space, ad);
  }
  m.tri.validate();
  return m;
}

Eigen::VectorXd epMap(const MarkedConfiguration& config, const Triangulation& T) {
  Eigen::VectorXd out(T.edgeCount());
  Space space = spaceOfCurvature(config.K());
  for (int i = 0; i < T.edgeCount(); i++) {
    const TriEdge& e = T.edges[i];
    double len = edgeLength(config, space, EdgeAddress{e.a, e.b, e.word});
    out(i) = len * len;
  }
  return out;
}

bool realizesTriangulation(const FuchsianPolyhedron& P, const Triangulation& T) {
  ConeMetric m;
  try {
    m = induceMetric(P);
  } catch (const Error&) {
    return false;
  }
  if (m.tri.edgeCount() != T.edgeCount()) return false;
  if (m.tri.faces.size() != T.faces.size()) return false;
  // compare edge address element keys as multisets
  std::vector<char> used(T.edgeCount(), 0);
  for (int i = 0; i < T.edgeCount(); i++) {
    std::vector<double> ki =
        addressKey(P.config, EdgeAddress{m.tri.edges[i].a, m.tri.edges[i].b, m.tri.edges[i].word});
    bool found = false;
    for (int j = 0; j < T.edgeCount() && !found; j++) {
      if (used[j]) continue;
      if (T.edges[j].a != m.tri.edges[i].a || T.edges[j].b != m.tri.edges[i].b) continue;
      std::vector<double> kj =
          addressKey(P.config, EdgeAddress{T.edges[j].a, T.edges[j].b, T.edges[j].word});
      bool same = true;
      for (int c = 2; c < 5 && same; c++) same = std::abs(ki[c] - kj[c]) < 1e-6;
      if (same) {
        used[j] = 1;
        found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

} // namespace fuchsian
