#include "fuchsian/polyhedron.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <unordered_map>

#include "fuchsian/log.hpp"

namespace fuchsian {

SpaceformPoint liftVertex(Space space, const Eigen::Vector3d& y, double d) {
  if (space == Space::Hyperbolic3) {
    if (d <= 0) throw Error("bad-height", "height must be positive");
    Eigen::Vector4d p;
    p << std::sinh(d), std::cosh(d) * y(0), std::cosh(d) * y(1), std::cosh(d) * y(2);
    return SpaceformPoint::make(space, p);
  }
  return liftFromHyperboloid(curvatureOf(space), y, d);
}

namespace {

constexpr double kHeightFloor = 1e-3;
constexpr double kKeyTol = 1e-6; // canonical-form matching tolerance

Eigen::Matrix3d inverseSO21(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d J = Eigen::Vector3d(1, 1, -1).asDiagonal();
  return J * m.transpose() * J;
}

// Tolerance-based set of flattened canonical keys. Keys of one orbit agree
// to ~1e-12, distinct orbits differ macroscopically; hashing quantizes the
// leading values and probes the neighbor cells.
class KeyIndex {
 public:
  // returns the index of a matching key, inserting when absent
  int findOrInsert(const std::vector<double>& key) {
    int found = lookup(key);
    if (found >= 0) return found;
    long q0 = quant(key.size() > 1 ? key[1] : 0);
    long q1 = quant(key.size() > 2 ? key[2] : 0);
    map_.emplace(hash(key.size(), q0, q1), keys_.size());
    keys_.push_back(key);
    return -static_cast<int>(keys_.size()); // negative marks "new", -(idx+1)
  }

  bool contains(const std::vector<double>& key) const { return lookup(key) >= 0; }

  const std::vector<double>& key(size_t i) const { return keys_[i]; }

  size_t size() const { return keys_.size(); }

 private:
  int lookup(const std::vector<double>& key) const {
    long q0 = quant(key.size() > 1 ? key[1] : 0);
    long q1 = quant(key.size() > 2 ? key[2] : 0);
    for (long d0 = -1; d0 <= 1; d0++)
      for (long d1 = -1; d1 <= 1; d1++) {
        auto range = map_.equal_range(hash(key.size(), q0 + d0, q1 + d1));
        for (auto it = range.first; it != range.second; ++it)
          if (equal(keys_[it->second], key)) return static_cast<int>(it->second);
      }
    return -1;
  }

  static long quant(double x) { return std::lround(x / 1e-4); }
  static uint64_t hash(size_t n, long a, long b) {
    uint64_t h = 1469598103934665603ull;
    for (uint64_t w : {static_cast<uint64_t>(n), static_cast<uint64_t>(a), static_cast<uint64_t>(b)}) {
      h ^= w;
      h *= 1099511628211ull;
    }
    return h;
  }
  static bool equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); i++)
      if (std::abs(a[i] - b[i]) > kKeyTol) return false;
    return true;
  }

  std::unordered_multimap<uint64_t, size_t> map_;
  std::vector<std::vector<double>> keys_;
};

// Lexicographic comparison with tolerance: entries closer than tol count
// equal. The band must sit above the FP noise of translated labels (~1e-8
// at desk-scale ball radii) and below point separations (~1e-1).
int lexCompare(const std::vector<double>& a, const std::vector<double>& b, double tol = kKeyTol) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; i++) {
    if (a[i] < b[i] - tol) return -1;
    if (a[i] > b[i] + tol) return 1;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

} // namespace

double modelRadialScale(int K, double h) {
  switch (K) {
    case 0: return h;
    case 1: return std::tanh(h);
    case -1:
      if (h >= M_PI / 2) throw Error("bad-height", "anti-de Sitter height must stay below pi/2");
      return std::tan(h);
  }
  throw Error("bad-curvature", "K must be in {-1,0,1}");
}

Eigen::Vector3d modelPoint(int K, const Eigen::Vector3d& y, double h) {
  return modelRadialScale(K, h) * y;
}

void MarkedConfiguration::validate() const {
  if (points.empty()) throw Error("bad-config", "at least one marked point required");
  if (static_cast<int>(points.size()) != heights.size())
    throw Error("bad-config", "points/heights size mismatch");
  for (int i = 0; i < n(); i++) {
    if (heights(i) < kHeightFloor) throw Error("bad-config", "height below the 1e-3 floor");
    if (K() == -1 && heights(i) >= M_PI / 2)
      throw Error("bad-config", "anti-de Sitter vertex height must stay below pi/2");
  }
  GroupBall ball = groupBall(group, 3);
  Eigen::Vector3d base(0, 0, 1);
  for (int i = 0; i < n(); i++) {
    if (!dirichletContains(group, ball, base, points[i]))
      throw Error("bad-config", "marked point outside the Dirichlet domain");
    for (int j = i + 1; j < n(); j++)
      if (hypDistance(points[i], points[j]) < 1e-6)
        throw Error("bad-config", "coincident marked points");
  }
}

MarkedConfiguration makeConfiguration(const FuchsianGroup& G,
                                      const std::vector<Eigen::Vector3d>& points,
                                      const Eigen::VectorXd& heights) {
  MarkedConfiguration c;
  c.group = G;
  c.space = spaceOfCurvature(G.K);
  c.points = points;
  c.heights = heights;
  c.validate();
  return c;
}

Eigen::Vector4d FuchsianPolyhedron::vertexCoords(const VertexLabel& l) const {
  return liftVertex(space, l.m * config.points[l.marked], config.heights(l.marked)).coords();
}

SpaceformPoint FuchsianPolyhedron::vertexPoint(const VertexLabel& l) const {
  return liftVertex(space, l.m * config.points[l.marked], config.heights(l.marked));
}

Eigen::Vector4d FuchsianPolyhedron::ambientFaceNormal(int face) const {
  return faces[face].ambientNormal;
}

namespace {

// ambient plane normal of a model plane {<m,u> = delta}; the linear span
// of the face upstairs for K != 0, the Lorentz normal of the affine plane
// for K = 0
Eigen::Vector4d ambientNormalFromModel(int K, const Eigen::Vector3d& m, double delta) {
  switch (K) {
    case 0: return Eigen::Vector4d(m(0), m(1), -m(2), 0);
    case 1: return Eigen::Vector4d(-delta, m(0), m(1), -m(2));
    case -1: return Eigen::Vector4d(m(0), m(1), -m(2), delta);
  }
  throw Error("bad-curvature", "K must be in {-1,0,1}");
}

struct LiftedPoint {
  int marked;
  int ballIndex;
  Eigen::Vector3d model;
};

struct RawFace {
  Eigen::Vector3d normal;
  double offset;
  std::vector<int> cycle; // indices into the lifted point list
  int maxWordLen;
};

// canonical key of a face: min over corner translates of the sorted flat
// list [(marked, x, y, z), ...] of translated model points
struct CanonicalFace {
  std::vector<double> key;
  PolyFace face;
};

std::vector<double> flattenEntries(std::vector<std::pair<int, Eigen::Vector3d>>& entries) {
  // tolerance bands keep the order stable across translates of one orbit,
  // where mathematically equal coordinates differ by FP noise
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    for (int c = 0; c < 3; c++) {
      if (a.second(c) < b.second(c) - kKeyTol) return true;
      if (a.second(c) > b.second(c) + kKeyTol) return false;
    }
    return false;
  });
  std::vector<double> flat;
  flat.reserve(entries.size() * 4);
  for (const auto& [mk, p] : entries) {
    flat.push_back(static_cast<double>(mk));
    flat.push_back(p(0));
    flat.push_back(p(1));
    flat.push_back(p(2));
  }
  return flat;
}

// Canonical translate of a face orbit: fold the face centroid into the
// Dirichlet domain of the base point. The folding element is determined by
// the orbit geometry (not by which translate we saw), so all translates of
// one orbit produce the same canonical form to machine precision.
// Elements whose bisectors can carve the Dirichlet domain of the base
// point: everything in the radius-3 ball that moves the base within twice
// the largest generator translation length.
std::vector<GroupElement> dirichletSteps(const FuchsianGroup& G) {
  Eigen::Vector3d base(0, 0, 1);
  double reach = 0;
  for (const auto& g : G.generators) reach = std::max(reach, hypDistance(g * base, base));
  GroupBall ball = groupBall(G, 3);
  std::vector<GroupElement> steps;
  for (const auto& e : ball.elements) {
    if (e.word.letters.empty()) continue;
    if (hypDistance(e.m * base, base) <= 2.0 * reach + 1e-9) steps.push_back(e);
  }
  return steps;
}

Eigen::Matrix3d foldIntoDomain(const FuchsianGroup& G, const std::vector<GroupElement>& stepSet,
                               const Eigen::Vector3d& y, Word* wordOut) {
  Eigen::Vector3d base(0, 0, 1);
  Eigen::Matrix3d acc = Eigen::Matrix3d::Identity();
  Word w;
  Eigen::Vector3d cur = y;
  double d = hypDistance(cur, base);
  for (int guard = 0; guard < 64; guard++) {
    const GroupElement* best = nullptr;
    double bestD = d - 1e-12;
    for (const auto& e : stepSet) {
      Eigen::Vector3d cand = e.m * cur;
      cand(2) = std::sqrt(1 + cand(0) * cand(0) + cand(1) * cand(1));
      double dc = hypDistance(cand, base);
      if (dc < bestD) {
        bestD = dc;
        best = &e;
      }
    }
    if (best == nullptr) break;
    w = best->word.concat(w);
    acc = G.evalWord(w);
    cur = acc * y;
    cur(2) = std::sqrt(1 + cur(0) * cur(0) + cur(1) * cur(1)); // back onto the hyperboloid
    d = hypDistance(cur, base);
  }
  // near the domain boundary several translates are equidistant and the
  // descent can stall on either side; break the tie lexicographically over
  // all near-minimal candidates so every orbit copy lands identically
  {
    const GroupElement* pick = nullptr;
    Eigen::Vector3d pickPt = cur;
    for (const auto& e : stepSet) {
      Eigen::Vector3d cand = e.m * cur;
      cand(2) = std::sqrt(1 + cand(0) * cand(0) + cand(1) * cand(1));
      if (hypDistance(cand, base) > d + 1e-9) continue;
      for (int c = 0; c < 3; c++) {
        if (cand(c) < pickPt(c) - 1e-6) {
          pick = &e;
          pickPt = cand;
          break;
        }
        if (cand(c) > pickPt(c) + 1e-6) break;
      }
    }
    if (pick != nullptr) {
      w = pick->word.concat(w);
      acc = G.evalWord(w);
    }
  }
  if (wordOut) *wordOut = w;
  return acc;
}

CanonicalFace canonicalizeFace(const MarkedConfiguration& cfg, const GroupBall& ball,
                               const ElementLookup& lookup,
                               const std::vector<GroupElement>& foldSteps, const RawFace& raw,
                               const std::vector<LiftedPoint>& lifted) {
  int m = static_cast<int>(raw.cycle.size());
  int K = cfg.K();

  // fold the centroid of the face into the Dirichlet domain
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (int j = 0; j < m; j++) centroid += lifted[raw.cycle[j]].model;
  centroid /= m;
  double cn = -mink3(centroid, centroid);
  if (cn <= 0) throw Error("degenerate", "face centroid leaves the cone");
  Eigen::Vector3d yc = centroid / std::sqrt(cn);
  Word foldWord;
  foldIntoDomain(cfg.group, foldSteps, yc, &foldWord);

  CanonicalFace out;
  PolyFace& f = out.face;
  std::vector<Eigen::Vector3d> cycModel;
  std::vector<std::pair<int, Eigen::Vector3d>> entries;
  for (int j = 0; j < m; j++) {
    const LiftedPoint& lp = lifted[raw.cycle[j]];
    VertexLabel lbl;
    lbl.marked = lp.marked;
    lbl.word = foldWord.concat(ball.elements[lp.ballIndex].word);
    lbl.m = cfg.group.evalWord(lbl.word);
    if (const GroupElement* e = lookup.find(lbl.m)) {
      lbl.word = e->word;
      lbl.m = e->m;
    }
    Eigen::Vector3d p = modelPoint(K, lbl.m * cfg.points[lbl.marked], cfg.heights(lbl.marked));
    cycModel.push_back(p);
    entries.push_back({lbl.marked, p});
    f.cycle.push_back(std::move(lbl));
  }

  // rotate the cycle so the lexicographically least vertex leads
  int lead = 0;
  for (int j = 1; j < m; j++) {
    const auto &a = entries[j], &b = entries[lead];
    bool less = a.first < b.first;
    if (a.first == b.first) {
      for (int c = 0; c < 3; c++) {
        if (a.second(c) < b.second(c) - kKeyTol) {
          less = true;
          break;
        }
        if (a.second(c) > b.second(c) + kKeyTol) break;
      }
    }
    if (less) lead = j;
  }
  std::rotate(f.cycle.begin(), f.cycle.begin() + lead, f.cycle.end());
  std::rotate(cycModel.begin(), cycModel.begin() + lead, cycModel.end());

  out.key = flattenEntries(entries);
  if (logLevel() >= LogLevel::Debug) {
    std::string s = "canon fold=" + foldWord.str() + " ->";
    for (const auto& l : f.cycle) s += " (" + std::to_string(l.marked) + "," + l.word.str() + ")";
    char buf[48];
    std::snprintf(buf, sizeof buf, " key0=%.9f", out.key.size() > 1 ? out.key[1] : 0.0);
    s += buf;
    logDebug(s);
  }

  Eigen::Vector3d nrm = Eigen::Vector3d::Zero();
  for (int j = 0; j < m; j++) nrm += cycModel[j].cross(cycModel[(j + 1) % m]);
  nrm.normalize();
  double off = 0;
  for (const auto& p : cycModel) off += nrm.dot(p);
  off /= m;
  f.modelNormal = nrm;
  f.modelOffset = off;
  f.ambientNormal = ambientNormalFromModel(K, nrm, off);
  return out;
}

std::vector<double> edgeKeyOf(const Eigen::Vector3d& pa, int ia, const Eigen::Matrix3d& ma,
                              const Eigen::Vector3d& pb, int ib, const Eigen::Matrix3d& mb) {
  // two candidate translates; keep the lexicographic minimum
  Eigen::Matrix3d invA = inverseSO21(ma), invB = inverseSO21(mb);
  std::vector<std::pair<int, Eigen::Vector3d>> c1 = {{ia, invA * pa}, {ib, invA * pb}};
  std::vector<std::pair<int, Eigen::Vector3d>> c2 = {{ia, invB * pa}, {ib, invB * pb}};
  std::vector<double> k1 = flattenEntries(c1);
  std::vector<double> k2 = flattenEntries(c2);
  return lexCompare(k1, k2) <= 0 ? k1 : k2;
}

// Pairs every face side with its partner across the edge orbit and infers
// the gluing transfer. Throws "hull-unstable" on unpaired or inconsistent
// gluings.
std::vector<std::vector<FaceNeighbor>> buildFaceGraph(const MarkedConfiguration& config,
                                                      const std::vector<PolyFace>& faces) {
  int K = config.K();
  struct Incidence {
    int face, side;
  };
  KeyIndex edgeIndex;
  std::vector<std::vector<Incidence>> buckets;
  for (size_t f = 0; f < faces.size(); f++) {
    int m = static_cast<int>(faces[f].cycle.size());
    for (int s = 0; s < m; s++) {
      const VertexLabel& a = faces[f].cycle[s];
      const VertexLabel& b = faces[f].cycle[(s + 1) % m];
      std::vector<double> key = edgeKeyOf(
          modelPoint(K, a.m * config.points[a.marked], config.heights(a.marked)), a.marked, a.m,
          modelPoint(K, b.m * config.points[b.marked], config.heights(b.marked)), b.marked, b.m);
      int idx = edgeIndex.findOrInsert(key);
      if (idx < 0)
        buckets.push_back({{static_cast<int>(f), s}});
      else
        buckets[idx].push_back({static_cast<int>(f), s});
    }
  }
  std::vector<std::vector<FaceNeighbor>> nb(faces.size());
  for (size_t f = 0; f < faces.size(); f++) nb[f].resize(faces[f].cycle.size());
  for (const auto& bucket : buckets) {
    if (bucket.size() != 2) throw Error("hull-unstable", "edge orbit not paired");
    for (int k = 0; k < 2; k++) {
      Incidence self = bucket[k], other = bucket[1 - k];
      const PolyFace& fs = faces[self.face];
      const PolyFace& fo = faces[other.face];
      int ms = static_cast<int>(fs.cycle.size());
      int mo = static_cast<int>(fo.cycle.size());
      const VertexLabel& a = fs.cycle[self.side];
      const VertexLabel& b = fs.cycle[(self.side + 1) % ms];
      const VertexLabel& c = fo.cycle[other.side];
      const VertexLabel& d = fo.cycle[(other.side + 1) % mo];
      FaceNeighbor v;
      v.face = other.face;
      v.side = other.side;
      // normally glued with reversed orientation: g maps (d, c) onto (a, b)
      auto tryTransfer = [&](const VertexLabel& from1, const VertexLabel& from2) {
        if (a.marked != from1.marked || b.marked != from2.marked) return false;
        Eigen::Matrix3d g = a.m * inverseSO21(from1.m);
        Eigen::Vector3d lhs = g * (from2.m * config.points[from2.marked]);
        Eigen::Vector3d rhs = b.m * config.points[b.marked];
        if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-5) return false;
        v.transferWord = a.word.concat(from1.word.inverse());
        v.transfer = config.group.evalWord(v.transferWord);
        return true;
      };
      if (!tryTransfer(d, c) && !tryTransfer(c, d))
        throw Error("hull-unstable", "edge gluing transfer mismatch");
      nb[self.face][self.side] = v;
    }
  }
  return nb;
}

} // namespace

FuchsianPolyhedron buildHullPolyhedron(const MarkedConfiguration& config, int hullRadius,
                                       int maxRadius) {
  config.validate();
  if (hullRadius < 2) throw Error("bad-config", "hull radius must be at least 2");
  int K = config.K();
  const FuchsianGroup& G = config.group;
  int n = config.n();

  for (int L = hullRadius; L <= maxRadius; L++) {
    // certification ball one word longer than the hull input: supporting
    // planes are scanned against it without hulling it
    GroupBall ball = groupBall(G, L + 2);
    if (ball.elements.size() * config.points.size() > 400000)
      throw Error("hull-unstable", "orbit ball grew past the practical limit");
    ElementLookup lookup(ball);
    std::vector<GroupElement> foldSteps = dirichletSteps(G);

    std::vector<LiftedPoint> lifted;
    lifted.reserve(ball.elements.size() * n);
    std::vector<Eigen::Vector3d> hullPts;
    std::vector<int> hullToLifted;
    for (size_t e = 0; e < ball.elements.size(); e++) {
      for (int i = 0; i < n; i++) {
        LiftedPoint lp;
        lp.marked = i;
        lp.ballIndex = static_cast<int>(e);
        lp.model = modelPoint(K, ball.elements[e].m * config.points[i], config.heights(i));
        if (ball.elements[e].word.length() <= L + 1) {
          hullPts.push_back(lp.model);
          hullToLifted.push_back(static_cast<int>(lifted.size()));
        }
        lifted.push_back(lp);
      }
    }

    // raw hull triangles; maximal faces are rebuilt per orbit below, in a
    // well-conditioned canonical position, so that coplanarity decisions
    // are group-invariant
    std::vector<HullFacet> tris = convexHull(hullPts);

    std::vector<CanonicalFace> triReps;
    {
      KeyIndex index;
      for (const auto& tf : tris) {
        if (tf.offset >= 0) continue; // c_K not separated: truncation facet
        RawFace rf;
        rf.normal = tf.normal;
        rf.offset = tf.offset;
        rf.cycle = {hullToLifted[tf.a], hullToLifted[tf.b], hullToLifted[tf.c]};
        // no word-length cutoff: rim artifacts fail the supporting-plane
        // certification below, genuine faces pass it at any depth
        CanonicalFace cf = canonicalizeFace(config, ball, lookup, foldSteps, rf, lifted);
        if (index.findOrInsert(cf.key) < 0) triReps.push_back(std::move(cf));
      }
    }

    // One maximal polygon face orbit per canonical plane: collect every
    // orbit point on the plane (group-invariant because plane and points
    // are word-exact) and cycle them with a 2d hull. This both merges
    // coplanar hull facets and restores cocircular points the triangulated
    // hull dropped.
    std::vector<CanonicalFace> repsL;
    {
      KeyIndex index;
      for (const auto& tr : triReps) {
        const Eigen::Vector3d& nrm = tr.face.modelNormal;
        double off = tr.face.modelOffset;
        std::vector<int> onPlane;
        for (size_t p = 0; p < lifted.size(); p++) {
          double tol = 1e-9 * std::max(1.0, lifted[p].model.cwiseAbs().maxCoeff());
          if (std::abs(nrm.dot(lifted[p].model) - off) <= tol)
            onPlane.push_back(static_cast<int>(p));
        }
        if (onPlane.size() < 3) continue;
        Eigen::Vector3d o3 = lifted[onPlane[0]].model;
        Eigen::Vector3d e1 = Eigen::Vector3d::Zero();
        for (int p : onPlane)
          if ((lifted[p].model - o3).norm() > 1e-8) {
            e1 = (lifted[p].model - o3).normalized();
            break;
          }
        if (e1.isZero()) continue;
        Eigen::Vector3d e2 = nrm.cross(e1).normalized();
        std::vector<Eigen::Vector2d> flat;
        flat.reserve(onPlane.size());
        for (int p : onPlane)
          flat.push_back(
              Eigen::Vector2d(e1.dot(lifted[p].model - o3), e2.dot(lifted[p].model - o3)));
        std::vector<int> cyc = hullPolygon2D(flat);
        RawFace rf;
        rf.normal = nrm;
        rf.offset = off;
        for (int c : cyc) rf.cycle.push_back(onPlane[c]);
        rf.maxWordLen = 0;
        CanonicalFace cf = canonicalizeFace(config, ball, lookup, foldSteps, rf, lifted);
        if (index.findOrInsert(cf.key) < 0) repsL.push_back(std::move(cf));
      }
    }

    // Spacelike filter first: the cap analysis below needs timelike
    // normals. For K in {-1,0} every genuine face is spacelike, so drops
    // are always truncation junk; for K=1 a drop that leaves a broken
    // lattice is the genuine rejection reported below.
    int droppedNonSpacelike = 0;
    double worstNormal = -1e300;
    {
      std::vector<CanonicalFace> kept;
      for (auto& r : repsL) {
        double q = formProduct(spaceOfCurvature(K), r.face.ambientNormal, r.face.ambientNormal);
        worstNormal = std::max(worstNormal, q / r.face.ambientNormal.squaredNorm());
        if (q < 0) {
          kept.push_back(std::move(r));
        } else {
          droppedNonSpacelike++;
        }
      }
      repsL = std::move(kept);
    }

    // Supporting-plane certification, two parts.
    //
    // Sampled part: every lifted orbit point lies on the polytope side.
    //
    // Cap part: the vertex surface S_h rises above the plane exactly on a
    // metric disc (center M/|M| on the hyperboloid, radius
    // arccosh(|delta|/(t |M|)) with M the Lorentz normal); if that disc is
    // not fully covered by the sampled orbit range, deeper orbit points
    // could still violate the plane and the face is uncertifiable here.
    std::vector<CanonicalFace> flagged;
    {
      // per-vertex sampled coverage radius: nearest boundary-sphere translate
      Eigen::VectorXd reach(n);
      Eigen::Vector3d base(0, 0, 1);
      for (int i = 0; i < n; i++) {
        double r = 1e300;
        for (const auto& e : ball.elements) {
          if (e.word.length() != L + 2) continue;
          r = std::min(r, hypDistance(e.m * config.points[i], base));
        }
        reach(i) = r;
      }
      std::vector<CanonicalFace> kept;
      for (auto& r : repsL) {
        double worstRel = -1e300;
        for (size_t p = 0; p < lifted.size(); p++) {
          double margin = r.face.modelNormal.dot(lifted[p].model) - r.face.modelOffset;
          worstRel = std::max(worstRel,
                              margin / std::max(1.0, lifted[p].model.cwiseAbs().maxCoeff()));
        }
        bool capCovered = true;
        {
          const Eigen::Vector3d& m = r.face.modelNormal;
          double mm = m(2) * m(2) - m(0) * m(0) - m(1) * m(1);
          if (mm <= 0 || m(2) >= 0) {
            capCovered = false; // not a downward spacelike plane: junk
          } else {
            double Mn = std::sqrt(mm);
            Eigen::Vector3d center(m(0) / Mn, m(1) / Mn, -m(2) / Mn);
            center(2) = std::sqrt(1 + center(0) * center(0) + center(1) * center(1));
            double dCenter = hypDistance(center, base);
            for (int i = 0; i < n && capCovered; i++) {
              double t = modelRadialScale(K, config.heights(i));
              double q = -r.face.modelOffset / (t * Mn);
              if (q <= 1 + 1e-12) continue; // plane below the whole surface
              capCovered = dCenter + std::acosh(q) <= reach(i);
            }
          }
        }
        if (worstRel <= 1e-10 && capCovered) {
          kept.push_back(std::move(r));
        } else if (worstRel <= 1e-10) {
          flagged.push_back(std::move(r));
        } else if (logLevel() >= LogLevel::Debug) {
          std::string s = "dropping uncertified face (rel margin " + std::to_string(worstRel) + "):";
          for (const auto& l : r.face.cycle) s += " (" + std::to_string(l.marked) + "," + l.word.str() + ")";
          logDebug(s);
        }
      }
      repsL = std::move(kept);
    }

    // quotient audit: marked coverage, paired edges, Euler characteristic.
    // Faces that pass the point certification but whose cap disc outruns
    // the sampled coverage are admitted exactly when the audited lattice
    // needs them: a consistent Euler-correct pairing over certified faces
    // is accepted first, then the flagged-augmented set.
    auto auditSet = [&](const std::vector<CanonicalFace>& reps) -> bool {
      bool audit = !reps.empty();
      const std::vector<CanonicalFace>& repsL = reps;
    {
      std::vector<char> seen(n, 0);
      for (const auto& r : repsL)
        for (const auto& l : r.face.cycle) seen[l.marked] = 1;
      bool coverage = true;
      for (int i = 0; i < n; i++) coverage = coverage && seen[i];

      KeyIndex edgeIndex;
      std::vector<int> count;
      std::vector<std::string> firstSeen;
      int sides = 0;
      for (const auto& r : repsL) {
        int m = static_cast<int>(r.face.cycle.size());
        sides += m;
        for (int s = 0; s < m; s++) {
          const VertexLabel& a = r.face.cycle[s];
          const VertexLabel& b = r.face.cycle[(s + 1) % m];
          std::vector<double> key = edgeKeyOf(
              modelPoint(K, a.m * config.points[a.marked], config.heights(a.marked)), a.marked,
              a.m, modelPoint(K, b.m * config.points[b.marked], config.heights(b.marked)),
              b.marked, b.m);
          int idx = edgeIndex.findOrInsert(key);
          std::string desc = "(" + std::to_string(a.marked) + "," + a.word.str() + ")-(" +
                             std::to_string(b.marked) + "," + b.word.str() + ")";
          if (idx < 0) {
            count.push_back(1);
            firstSeen.push_back(desc);
          } else {
            count[idx]++;
            firstSeen[idx] += " | " + desc;
          }
        }
      }
      bool paired = sides % 2 == 0;
      for (size_t c = 0; c < count.size(); c++) {
        paired = paired && count[c] == 2;
        if (count[c] != 2 && logLevel() >= LogLevel::Debug) {
          char buf[64];
          std::string kv;
          for (double v : edgeIndex.key(c)) {
            std::snprintf(buf, sizeof buf, "%.9f ", v);
            kv += buf;
          }
          logDebug("edge bucket size " + std::to_string(count[c]) + ": " + firstSeen[c] +
                   " key=[" + kv + "]");
        }
      }
      int E = sides / 2;
      int F = static_cast<int>(repsL.size());
      bool euler = n - E + F == 2 - 2 * G.genus;
      audit = audit && coverage && paired && euler;
      if (!audit)
        logInfo("quotient audit failed at radius " + std::to_string(L) + ": coverage=" +
                std::to_string(coverage) + " paired=" + std::to_string(paired) +
                " chi=" + std::to_string(n - E + F) + " target=" + std::to_string(2 - 2 * G.genus) +
                " F=" + std::to_string(F));
    }
      return audit;
    };

    bool audit = auditSet(repsL);
    if (!audit && !flagged.empty()) {
      std::vector<CanonicalFace> augmented = repsL;
      for (const auto& r : flagged) augmented.push_back(r);
      if (auditSet(augmented)) {
        repsL = std::move(augmented);
        audit = true;
      }
    }
    if (!audit) {
      if (K == 1 && droppedNonSpacelike > 0)
        throw Error("non-spacelike-face",
                    "retained de Sitter face with non-timelike normal, margin " +
                        std::to_string(worstNormal));
      continue;
    }

    FuchsianPolyhedron P;
    P.space = spaceOfCurvature(K);
    P.config = config;
    P.hullRadius = L;
    for (auto& r : repsL) P.faces.push_back(std::move(r.face));

    // face adjacency across edge orbits
    P.neighbors = buildFaceGraph(config, P.faces);

    logDebug("hull stabilized at radius " + std::to_string(L) + " with " +
             std::to_string(P.faces.size()) + " face orbits");
    return P;
  }
  throw Error("hull-unstable", "no stabilization by the maximum hull radius");
}

bool ValidationReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const ValidationCheck& ValidationReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error("bad-check", "no validation check named " + name);
}

namespace {

// causal margin between two points: positive iff the pair is spacelike
// separated (outside each other's light cones)
double causalMargin(Space s, const Eigen::Vector4d& x, const Eigen::Vector4d& y) {
  switch (s) {
    case Space::Minkowski3: return formProduct(s, x - y, x - y);
    case Space::DeSitter3: return 1.0 - formProduct(s, x, y);
    case Space::AntiDeSitter3: return -formProduct(s, x, y) - 1.0;
    case Space::Hyperbolic3: return 1.0; // Riemannian
  }
  return 0;
}

} // namespace

ValidationReport validatePolyhedron(const FuchsianPolyhedron& P) {
  ValidationReport rep;
  const MarkedConfiguration& cfg = P.config;
  int K = cfg.K();
  Space s = P.space;

  if (s == Space::Hyperbolic3) {
    // dual polyhedra: quadric membership of vertices, support inequalities
    double quadric = 0;
    double heightLo = 1e300, heightHi = -1e300;
    for (int i = 0; i < P.n(); i++) {
      Eigen::Vector4d v = cfg.vertex(i).coords();
      quadric = std::max(quadric, std::abs(formProduct(s, v, v) + 1.0));
      double mu = std::asinh(v(0));
      heightLo = std::min(heightLo, mu);
      heightHi = std::max(heightHi, mu);
    }
    rep.checks.push_back({"vertices-on-h3", quadric < 1e-9, 1e-9 - quadric});
    rep.checks.push_back({"between-constant-distance-surfaces",
                          heightLo > 0 && std::isfinite(heightHi), heightLo});
    // convexity: all orbit vertices on one side of every face plane
    // (support values <= 0, vanishing exactly on incident vertices)
    GroupBall ball = groupBall(cfg.group, P.hullRadius + 2);
    double worst = -1e300;
    for (size_t f = 0; f < P.faces.size(); f++) {
      Eigen::Vector4d N = P.faces[f].ambientNormal;
      for (const auto& e : ball.elements) {
        for (int i = 0; i < P.n(); i++) {
          Eigen::Vector4d v = liftVertex(s, e.m * cfg.points[i], cfg.heights(i)).coords();
          worst = std::max(worst, formProduct(Space::DeSitter3, N, v));
        }
      }
    }
    rep.checks.push_back({"convexity-support", worst < 1e-9, 1e-9 - worst});
    bool fuchsian = true;
    for (const auto& g : cfg.group.generators) fuchsian = fuchsian && std::isfinite(g.sum());
    rep.checks.push_back({"group-fuchsian", fuchsian, fuchsian ? 1.0 : -1.0});
    return rep;
  }

  GroupBall ball = groupBall(cfg.group, P.hullRadius + 2);

  // (a) spacelike faces: timelike ambient normals
  double spacelikeMargin = 1e300;
  for (size_t f = 0; f < P.faces.size(); f++) {
    Eigen::Vector4d N = P.faces[f].ambientNormal;
    double norm2 = formProduct(s, N, N);
    spacelikeMargin = std::min(spacelikeMargin, -norm2 / N.squaredNorm());
  }
  rep.checks.push_back({"spacelike-faces", spacelikeMargin > 0, spacelikeMargin});

  // (b) c_K on the concave side of every face plane
  double concaveMargin = 1e300;
  for (const auto& f : P.faces) concaveMargin = std::min(concaveMargin, -f.modelOffset);
  rep.checks.push_back({"center-concave-side", concaveMargin > 0, concaveMargin});

  // (c) light-cone avoidance over the certification ball
  double causal = 1e300;
  for (int i = 0; i < P.n(); i++) {
    Eigen::Vector4d xi = cfg.vertex(i).coords();
    for (const auto& e : ball.elements) {
      for (int j = 0; j < P.n(); j++) {
        if (e.word.letters.empty() && i == j) continue;
        Eigen::Vector4d xj = liftVertex(s, e.m * cfg.points[j], cfg.heights(j)).coords();
        causal = std::min(causal, causalMargin(s, xi, xj));
      }
    }
  }
  rep.checks.push_back({"light-cone-avoidance", causal > 0, causal});

  // (d) convexity: every orbit point below every retained face plane
  double convexMargin = 1e300;
  double scale = 1.0;
  for (const auto& f : P.faces) {
    for (const auto& e : ball.elements) {
      for (int j = 0; j < P.n(); j++) {
        Eigen::Vector3d p = modelPoint(K, e.m * cfg.points[j], cfg.heights(j));
        scale = std::max(scale, p.cwiseAbs().maxCoeff());
        convexMargin = std::min(convexMargin, f.modelOffset - f.modelNormal.dot(p));
      }
    }
  }
  // vertices of the face itself sit on the plane; accept the FP band
  rep.checks.push_back({"convexity", convexMargin > -1e-9 * scale, convexMargin + 1e-9 * scale});

  // (e) containment in Omega_{-1}
  if (K == -1) {
    double band = 1e300;
    for (const auto& e : ball.elements)
      for (int j = 0; j < P.n(); j++) {
        Eigen::Vector4d x = liftVertex(s, e.m * cfg.points[j], cfg.heights(j)).coords();
        band = std::min({band, x(3), 1.0 - x(3), x(2)});
      }
    rep.checks.push_back({"omega-containment", band > 0, band});
  }

  // (f) p_K injectivity on samples of the polyhedral surface
  {
    std::mt19937_64 sampler(2024);
    std::uniform_real_distribution<double> u01(0, 1);
    std::vector<Eigen::Vector3d> projections;
    std::vector<Eigen::Vector3d> samples;
    for (int t = 0; t < 1000; t++) {
      const PolyFace& f = P.faces[t % P.faces.size()];
      // random convex combination in the model face polygon
      double wsum = 0;
      Eigen::Vector3d q = Eigen::Vector3d::Zero();
      for (const auto& l : f.cycle) {
        double w = u01(sampler) + 1e-3;
        q += w * modelPoint(K, l.m * cfg.points[l.marked], cfg.heights(l.marked));
        wsum += w;
      }
      q /= wsum;
      samples.push_back(q);
      projections.push_back(q.normalized()); // radial direction determines p_K
    }
    bool injective = true;
    for (size_t a = 0; a < samples.size() && injective; a++)
      for (size_t b = a + 1; b < samples.size(); b++) {
        if ((samples[a] - samples[b]).norm() < 1e-8) continue;
        if ((projections[a] - projections[b]).norm() < 1e-12) {
          injective = false;
          break;
        }
      }
    rep.checks.push_back({"projection-injectivity", injective, injective ? 1.0 : -1.0});
  }

  return rep;
}

double heightToModel(int K, double h, double a, double b) {
  switch (K) {
    case -1: {
      if (h <= 0 || h >= M_PI / 2) throw Error("domain", "height must lie in (0, pi/2)");
      double r2 = a * a + b * b;
      if (r2 >= 1) throw Error("domain", "disc position outside the unit disc");
      return std::sqrt(1 - r2) / std::tan(h);
    }
    case 0:
      if (h <= 0 || h >= M_PI / 2) throw Error("domain", "distance must lie in (0, pi/2)");
      return std::tan(h);
  }
  throw Error("bad-curvature", "height conversions exist for K in {-1,0}");
}

double modelToHeight(int K, double z, double a, double b) {
  switch (K) {
    case -1: {
      if (z <= 0) throw Error("domain", "model height must be positive");
      double r2 = a * a + b * b;
      if (r2 >= 1) throw Error("domain", "disc position outside the unit disc");
      return std::atan(std::sqrt(1 - r2) / z);
    }
    case 0:
      if (z <= 0) throw Error("domain", "model distance must be positive");
      return std::atan(z);
  }
  throw Error("bad-curvature", "height conversions exist for K in {-1,0}");
}

FuchsianPolyhedron dualPolyhedron(const FuchsianPolyhedron& P) {
  if (P.space != Space::DeSitter3 && P.space != Space::Hyperbolic3)
    throw Error("bad-space", "duality acts between de Sitter and hyperbolic polyhedra");
  Space dualSpace = P.space == Space::DeSitter3 ? Space::Hyperbolic3 : Space::DeSitter3;
  const MarkedConfiguration& cfg = P.config;

  // dual vertices: unit face normals on the target quadric
  int numFaces = static_cast<int>(P.faces.size());
  std::vector<Eigen::Vector3d> dualPoints(numFaces);
  Eigen::VectorXd dualHeights(numFaces);
  std::vector<Eigen::Matrix3d> norma(numFaces); // base change into the domain
  std::vector<Word> normaWord(numFaces);
  GroupBall ball = groupBall(cfg.group, P.hullRadius + 2);
  Eigen::Vector3d base(0, 0, 1);
  for (int f = 0; f < numFaces; f++) {
    Eigen::Vector4d N = P.faces[f].ambientNormal;
    double q = formProduct(Space::DeSitter3, N, N);
    double target = dualSpace == Space::Hyperbolic3 ? -1.0 : 1.0;
    if (q * target <= 0)
      throw Error("not-hyperbolic-type", "face normal on the wrong side of the light cone");
    Eigen::Vector4d v = N / std::sqrt(std::abs(q));
    if (dualSpace == Space::Hyperbolic3 && v(3) < 0) v = -v;
    // hyperboloid bookkeeping per target space
    Eigen::Vector3d y;
    double d;
    if (dualSpace == Space::Hyperbolic3) {
      d = std::asinh(v(0));
      if (d <= 0) throw Error("not-hyperbolic-type", "dual vertex below the invariant plane");
      y = v.tail<3>() / std::cosh(d);
    } else {
      d = std::acosh(v(0));
      y = v.tail<3>() / std::sinh(d);
    }
    // bring the representative into the Dirichlet domain
    Eigen::Matrix3d best = Eigen::Matrix3d::Identity();
    Word bestWord;
    double bestDist = hypDistance(y, base);
    for (const auto& e : ball.elements) {
      Eigen::Vector3d cand = e.m * y;
      double dist = hypDistance(cand, base);
      if (dist < bestDist - 1e-12) {
        bestDist = dist;
        best = e.m;
        bestWord = e.word;
      }
    }
    dualPoints[f] = best * y;
    dualHeights(f) = d;
    norma[f] = best;
    normaWord[f] = bestWord;
  }

  FuchsianPolyhedron D;
  D.space = dualSpace;
  D.config.group = cfg.group;
  D.config.space = dualSpace;
  D.config.points = dualPoints;
  D.config.heights = dualHeights;
  D.hullRadius = P.hullRadius;

  // dual faces: one per original vertex orbit, cycle = faces around the
  // vertex chained through shared edges
  for (int i = 0; i < P.n(); i++) {
    // incidences (face, corner) with label marked == i
    int f0 = -1, c0 = -1;
    for (int f = 0; f < numFaces && f0 < 0; f++) {
      const auto& cyc = P.faces[f].cycle;
      for (int c = 0; c < static_cast<int>(cyc.size()); c++)
        if (cyc[c].marked == i) {
          f0 = f;
          c0 = c;
          break;
        }
    }
    if (f0 < 0) throw Error("bad-polyhedron", "marked vertex missing from the face lattice");

    PolyFace df;
    df.ambientNormal = cfg.vertex(i).coords();
    // walk around the vertex: current face translate g * rep(f), corner c
    int f = f0, c = c0;
    Eigen::Matrix3d g = inverseSO21(P.faces[f0].cycle[c0].m);
    Word gWord = P.faces[f0].cycle[c0].word.inverse();
    int guard = 0;
    do {
      // dual vertex label for the translate g * rep(f): marked = f
      VertexLabel lbl;
      lbl.marked = f;
      lbl.m = g * inverseSO21(norma[f]);
      lbl.word = gWord.concat(normaWord[f].inverse());
      df.cycle.push_back(lbl);

      // cross the side leaving this corner: side c of rep(f)
      const FaceNeighbor& nb = P.neighbors[f][c];
      Eigen::Matrix3d gNext = g * nb.transfer;
      Word gNextWord = gWord.concat(nb.transferWord);
      // find the corner of the neighbor rep at our vertex i
      const auto& cyc = P.faces[nb.face].cycle;
      int cNext = -1;
      for (int cc = 0; cc < static_cast<int>(cyc.size()); cc++) {
        if (cyc[cc].marked != i) continue;
        Eigen::Vector3d cand = gNext * (cyc[cc].m * cfg.points[i]);
        if ((cand - cfg.points[i]).cwiseAbs().maxCoeff() < 1e-6) {
          cNext = cc;
          break;
        }
      }
      if (cNext < 0) throw Error("bad-polyhedron", "vertex star chain broken");
      f = nb.face;
      c = cNext;
      g = gNext;
      gWord = gNextWord;
      guard++;
    } while (!(f == f0 && c == c0) && guard < 64);
    if (guard >= 64) throw Error("bad-polyhedron", "vertex star did not close");
    D.faces.push_back(df);
  }
  D.neighbors = buildFaceGraph(D.config, D.faces);
  return D;
}

namespace {

struct FaceFrame {
  Eigen::Vector3d origin;
  Eigen::Vector3d e1, e2; // euclidean frame on the model plane
  std::vector<Eigen::Vector2d> poly;
};

FaceFrame faceFrame(const FuchsianPolyhedron& P, int f) {
  const PolyFace& face = P.faces[f];
  const MarkedConfiguration& cfg = P.config;
  FaceFrame fr;
  std::vector<Eigen::Vector3d> pts;
  for (const auto& l : face.cycle)
    pts.push_back(modelPoint(P.K(), l.m * cfg.points[l.marked], cfg.heights(l.marked)));
  fr.origin = pts[0];
  fr.e1 = (pts[1] - pts[0]).normalized();
  fr.e2 = face.modelNormal.cross(fr.e1).normalized();
  for (const auto& p : pts)
    fr.poly.push_back(Eigen::Vector2d(fr.e1.dot(p - fr.origin), fr.e2.dot(p - fr.origin)));
  return fr;
}

// ambient point of a model point for K in {0,1}
Eigen::Vector4d unmapModel(int K, const Eigen::Vector3d& q) {
  if (K == 0) return Eigen::Vector4d(q(0), q(1), q(2), 0);
  AmbientVector y(q, Signature{2, 1});
  return modelUnmap(ModelKind::MinkFromDeSitter, y).coords();
}

Eigen::Vector3d mapModel(int K, const Eigen::Vector4d& x) {
  if (K == 0) return x.head<3>();
  return modelMap(ModelKind::MinkFromDeSitter, SpaceformPoint::make(Space::DeSitter3, x)).head3();
}

// unit tangent at x toward y inside a common totally geodesic face
Eigen::Vector4d tangentToward(Space s, const Eigen::Vector4d& x, const Eigen::Vector4d& y) {
  Eigen::Vector4d t;
  if (s == Space::Minkowski3)
    t = y - x;
  else {
    double xx = formProduct(s, x, x);
    t = y - (formProduct(s, y, x) / xx) * x;
  }
  double q = formProduct(s, t, t);
  if (q <= 1e-20) throw Error("degenerate", "tangent between coincident points");
  return t / std::sqrt(q);
}

double uValue(int K, const Eigen::Vector4d& x) {
  if (K == 0) return -0.5 * formProduct(Space::Minkowski3, x, x);
  return x(0); // cosh of the distance from c_1
}

double uDifferential(int K, const Eigen::Vector4d& x, const Eigen::Vector4d& v) {
  if (K == 0) return -formProduct(Space::Minkowski3, x, v);
  return v(0);
}

} // namespace

ConvexityProfile convexityProfile(const FuchsianPolyhedron& P, int startFace, double angle,
                                  int maxCrossings) {
  int K = P.K();
  if (K != 0 && K != 1)
    throw Error("bad-curvature", "convexity profiles are defined for K in {0,1}");
  Space s = P.space;
  const MarkedConfiguration& cfg = P.config;

  ConvexityProfile out;
  int f = startFace;
  int skipSide = -1;

  // start at the interior centroid of the model polygon
  FaceFrame fr = faceFrame(P, f);
  Eigen::Vector2d c2 = Eigen::Vector2d::Zero();
  for (const auto& q : fr.poly) c2 += q;
  c2 /= static_cast<double>(fr.poly.size());
  Eigen::Vector2d d2(std::cos(angle), std::sin(angle));

  Eigen::Vector3d q0 = fr.origin + c2(0) * fr.e1 + c2(1) * fr.e2;
  Eigen::Vector3d q1 = fr.origin + (c2(0) + 1e-2 * d2(0)) * fr.e1 + (c2(1) + 1e-2 * d2(1)) * fr.e2;
  Eigen::Vector4d X = unmapModel(K, q0);
  Eigen::Vector4d w = tangentToward(s, X, unmapModel(K, q1));

  double tGlobal = 0;
  while (static_cast<int>(out.crossings.size()) < maxCrossings) {
    fr = faceFrame(P, f);
    Eigen::Vector3d qStart = mapModel(K, X);
    Eigen::Vector2d p0(fr.e1.dot(qStart - fr.origin), fr.e2.dot(qStart - fr.origin));
    // model direction of the geodesic: image of the tangent
    Eigen::Vector3d dm3 = K == 0 ? w.head<3>()
                                 : modelMapDifferential(ModelKind::MinkFromDeSitter,
                                                        SpaceformPoint::make(s, X), w);
    Eigen::Vector2d dir(fr.e1.dot(dm3), fr.e2.dot(dm3));
    dir.normalize();

    // exit through the polygon boundary
    int m = static_cast<int>(fr.poly.size());
    double bestT = 1e300, bestSeg = 0;
    int bestSide = -1;
    for (int e = 0; e < m; e++) {
      if (e == skipSide) continue;
      Eigen::Vector2d a = fr.poly[e], b = fr.poly[(e + 1) % m];
      Eigen::Vector2d ab = b - a;
      double den = dir(0) * (-ab(1)) + dir(1) * ab(0);
      if (std::abs(den) < 1e-14) continue;
      double tRay = ((a - p0)(0) * (-ab(1)) + (a - p0)(1) * ab(0)) / den;
      double tSeg = (dir(0) * (a - p0)(1) - dir(1) * (a - p0)(0)) / den;
      if (tRay > 1e-10 && tSeg >= -1e-12 && tSeg <= 1 + 1e-12 && tRay < bestT) {
        bestT = tRay;
        bestSide = e;
        bestSeg = tSeg;
      }
    }
    if (bestSide < 0) throw Error("degenerate", "geodesic failed to exit the face");
    if (bestSeg < 1e-9 || bestSeg > 1 - 1e-9) throw Error("vertex-hit", "geodesic met a vertex");

    Eigen::Vector2d pExit2 = p0 + bestT * dir;
    Eigen::Vector3d qExit = fr.origin + pExit2(0) * fr.e1 + pExit2(1) * fr.e2;
    Eigen::Vector4d Xe = unmapModel(K, qExit);

    // arc length to the exit and the tangent there
    double tExit;
    Eigen::Vector4d gExit;
    if (K == 0) {
      tExit = std::sqrt(formProduct(s, Xe - X, Xe - X));
      gExit = w;
    } else {
      tExit = separation(SpaceformPoint::make(s, X), SpaceformPoint::make(s, Xe)).length;
      gExit = -std::sin(tExit) * X + std::cos(tExit) * w;
    }

    // u'' residual sampled inside the face
    for (double frac : {0.25, 0.5, 0.75}) {
      double t = frac * tExit;
      double h = std::max(1e-4, 1e-3 * tExit);
      auto gamma = [&](double tt) {
        if (K == 0) return Eigen::Vector4d(X + tt * w);
        return Eigen::Vector4d(std::cos(tt) * X + std::sin(tt) * w);
      };
      double upp =
          (uValue(K, gamma(t + h)) - 2 * uValue(K, gamma(t)) + uValue(K, gamma(t - h))) / (h * h);
      double res = K == 0 ? std::abs(upp + 1.0) : std::abs(upp + uValue(K, gamma(t)));
      out.maxSecondDerivResidual = std::max(out.maxSecondDerivResidual, res);
    }

    // cross into the neighbor
    const FaceNeighbor& nb = P.neighbors[f][bestSide];
    const PolyFace& cur = P.faces[f];
    int mc = static_cast<int>(cur.cycle.size());
    const VertexLabel& lb = cur.cycle[(bestSide + 1) % mc];
    Eigen::Vector4d B = liftVertex(s, lb.m * cfg.points[lb.marked], cfg.heights(lb.marked)).coords();
    Eigen::Vector4d eHat = tangentToward(s, Xe, B);
    double alpha = formProduct(s, gExit, eHat);
    Eigen::Vector4d mOut = gExit - alpha * eHat;
    double mn = formProduct(s, mOut, mOut);
    if (mn <= 1e-18) throw Error("degenerate", "grazing edge crossing");
    mOut /= std::sqrt(mn);
    double beta = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));

    // neighbor centroid gives the inward direction on the other side
    Isometry T = extendIsometry(nb.transfer, s);
    FaceFrame nfr = faceFrame(P, nb.face);
    Eigen::Vector2d nc2 = Eigen::Vector2d::Zero();
    for (const auto& q : nfr.poly) nc2 += q;
    nc2 /= static_cast<double>(nfr.poly.size());
    Eigen::Vector3d nCenter = nfr.origin + nc2(0) * nfr.e1 + nc2(1) * nfr.e2;
    Eigen::Vector4d C = T.applyRaw(unmapModel(K, nCenter));
    Eigen::Vector4d tau = tangentToward(s, Xe, C);
    Eigen::Vector4d mIn = tau - formProduct(s, tau, eHat) * eHat;
    mIn /= std::sqrt(formProduct(s, mIn, mIn));

    Eigen::Vector4d wNew = alpha * eHat + beta * mIn;
    double jump = uDifferential(K, Xe, wNew) - uDifferential(K, Xe, gExit);
    tGlobal += tExit;
    out.crossings.push_back({tGlobal, jump});

    // pull the state back to the neighbor representative
    Isometry Tinv = T.inverse();
    X = Tinv.applyRaw(Xe);
    w = Tinv.applyTangent(wNew);
    f = nb.face;
    skipSide = nb.side;
  }
  return out;
}

} // namespace fuchsian
