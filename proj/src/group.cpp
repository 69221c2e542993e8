#include "fuchsian/group.hpp"

#include <cmath>
#include <unordered_map>

#include "fuchsian/log.hpp"

namespace fuchsian {

Word Word::inverse() const {
  Word w;
  w.letters.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) w.letters.push_back(-*it);
  return w;
}

Word Word::concat(const Word& rhs) const {
  Word w = *this;
  for (int8_t l : rhs.letters) {
    if (!w.letters.empty() && w.letters.back() == -l)
      w.letters.pop_back();
    else
      w.letters.push_back(l);
  }
  return w;
}

std::string Word::str() const {
  if (letters.empty()) return "e";
  std::string s;
  for (size_t i = 0; i < letters.size(); i++) {
    if (i) s += ".";
    int8_t l = letters[i];
    int gen = std::abs(l) - 1;
    char base = gen % 2 == 0 ? 'a' : 'b';
    if (l < 0) base = static_cast<char>(base - 'a' + 'A');
    s += base;
    s += std::to_string(gen / 2 + 1);
  }
  return s;
}

bool Word::operator<(const Word& rhs) const {
  if (letters.size() != rhs.letters.size()) return letters.size() < rhs.letters.size();
  return letters < rhs.letters;
}

namespace {

// Gram-Schmidt in the (+,+,-) form: projects a near-isometry back onto
// SO(2,1), keeping form preservation at machine precision after long
// word evaluations.
Eigen::Matrix3d orthonormalizeSO21(const Eigen::Matrix3d& m) {
  Eigen::Vector3d j(1, 1, -1);
  auto form = [&](const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
    return u.cwiseProduct(j).dot(v);
  };
  Eigen::Vector3d c0 = m.col(0), c1 = m.col(1), c2 = m.col(2);
  c0 /= std::sqrt(form(c0, c0));
  c1 -= form(c1, c0) * c0;
  c1 /= std::sqrt(form(c1, c1));
  c2 -= form(c2, c0) * c0;
  c2 -= form(c2, c1) * c1;
  c2 /= std::sqrt(-form(c2, c2));
  Eigen::Matrix3d out;
  out << c0, c1, c2;
  return out;
}

} // namespace

Eigen::Matrix3d FuchsianGroup::evalWord(const Word& w) const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  for (int8_t l : w.letters) {
    int gen = std::abs(l) - 1;
    const Eigen::Matrix3d& g = generators.at(gen);
    // SO(2,1) inverse via the form
    if (l > 0)
      m = m * g;
    else {
      Eigen::Matrix3d J = Eigen::Vector3d(1, 1, -1).asDiagonal();
      m = m * (J * g.transpose() * J);
    }
  }
  // The Gram-Schmidt projection cancels catastrophically on boost-heavy
  // matrices (nearly parallel columns), so keep it only when it stays a
  // small correction; raw products are relatively accurate anyway.
  if (w.length() > 0) {
    Eigen::Matrix3d gs = orthonormalizeSO21(m);
    double norm = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((gs - m).cwiseAbs().maxCoeff() < 1e-6 * norm) m = gs;
  }
  return m;
}

double FuchsianGroup::formResidual() const {
  Eigen::Matrix3d J = Eigen::Vector3d(1, 1, -1).asDiagonal();
  double r = 0;
  for (const auto& g : generators)
    r = std::max(r, (g.transpose() * J * g - J).cwiseAbs().maxCoeff());
  return r;
}

namespace {

// Side-pairing scheme of the canonical polygon: block j pairs side 4j+2
// (reversed) onto side 4j, and side 4j+3 (reversed) onto side 4j+1.
struct Pairing {
  std::vector<int> partner;   // partner side index
  std::vector<int> generator; // signed: +k / -k for generator k-1 / inverse
};

Pairing canonicalPairing(int genus) {
  int n = 4 * genus;
  Pairing p;
  p.partner.resize(n);
  p.generator.resize(n);
  for (int j = 0; j < genus; j++) {
    int a = 2 * j + 1, b = 2 * j + 2; // generator numbers (1-based)
    p.partner[4 * j] = 4 * j + 2;
    p.partner[4 * j + 2] = 4 * j;
    p.partner[4 * j + 1] = 4 * j + 3;
    p.partner[4 * j + 3] = 4 * j + 1;
    // M_s maps side s onto its partner; A_j maps side 4j+2 onto side 4j,
    // B_j maps side 4j+1 onto side 4j+3. This orientation makes the
    // vertex-cycle relator the commutator product of the generators.
    p.generator[4 * j + 2] = a;
    p.generator[4 * j] = -a;
    p.generator[4 * j + 1] = b;
    p.generator[4 * j + 3] = -b;
  }
  return p;
}

} // namespace

namespace {

// relator residual vector of the side pairings (components of R - Id in
// the so(2,1) chart)
Eigen::Vector3d relatorResidualVec(const FuchsianGroup& G) {
  Pairing p = canonicalPairing(G.genus);
  int n = 4 * G.genus;
  Word relator;
  int corner = 0, visited = 0;
  do {
    Word letter;
    letter.letters.push_back(static_cast<int8_t>(-p.generator[corner]));
    relator = relator.concat(letter);
    corner = (p.partner[corner] + 1) % n;
    visited++;
  } while (corner != 0 && visited <= n);
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  for (int8_t l : relator.letters) {
    int idx = std::abs(l) - 1;
    Eigen::Matrix3d J = Eigen::Vector3d(1, 1, -1).asDiagonal();
    R = R * (l > 0 ? G.generators[idx]
                   : Eigen::Matrix3d(J * G.generators[idx].transpose() * J));
  }
  return {R(0, 2), R(1, 2), R(1, 0) - R(0, 1)};
}

} // namespace

FuchsianGroup groupFromPolygon(const CanonicalPolygon& poly, int K, bool holonomyGate) {
  int g = poly.genus;
  int n = 4 * g;
  const auto& v = poly.vertices;
  if (static_cast<int>(v.size()) != n) throw Error("bad-polygon", "vertex count mismatch");

  FuchsianGroup G;
  G.K = K;
  G.genus = g;
  G.polygon = poly;
  G.generators.resize(2 * g);
  for (int j = 0; j < g; j++) {
    // A_j : (v_{4j+3}, v_{4j+2}) -> (v_{4j}, v_{4j+1})
    Eigen::Matrix3d A = hypFrame(v[4 * j], v[4 * j + 1]) *
                        hypFrame(v[(4 * j + 3) % n], v[4 * j + 2]).inverse();
    // B_j : (v_{4j+1}, v_{4j+2}) -> (v_{4j+4}, v_{4j+3})
    Eigen::Matrix3d B = hypFrame(v[(4 * j + 4) % n], v[(4 * j + 3) % n]) *
                        hypFrame(v[4 * j + 1], v[4 * j + 2]).inverse();
    G.generators[2 * j] = A;
    G.generators[2 * j + 1] = B;
  }

  // Relator from the corner chase around the single vertex class: crossing
  // side s of the fundamental polygon applies M_s^{-1} and continues at
  // corner partner(s)+1.
  Pairing p = canonicalPairing(g);
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  int corner = 0;
  int visited = 0;
  Word relator;
  do {
    Word letter;
    letter.letters.push_back(static_cast<int8_t>(-p.generator[corner]));
    relator = relator.concat(letter);
    corner = (p.partner[corner] + 1) % n;
    visited++;
  } while (corner != 0 && visited <= n);
  if (visited != n)
    throw Error("holonomy", "vertex cycle does not close through all corners");
  R = G.evalWord(relator);
  G.relationResidual = (R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (holonomyGate && G.relationResidual > 1e-6)
    throw Error("holonomy", "relator residual " + std::to_string(G.relationResidual));
  logDebug("relator " + relator.str() + " residual " + std::to_string(G.relationResidual));
  return G;
}

FuchsianGroup groupFromZVC(const ZVCCoordinates& z, int K) {
  CanonicalPolygon poly = closePolygon(z);
  // Polish the free completion against the relator itself: the boundary
  // walk's closure noise amplifies through the side pairings, and at the
  // larger genera the relator residual would otherwise sit near the
  // holonomy gate.
  Eigen::Vector3d u(poly.sideLengths(0), poly.sideLengths(1), poly.angles(0));
  auto evalAt = [&](const Eigen::Vector3d& w) -> Eigen::Vector3d {
    CanonicalPolygon cand = completePolygon(z, w(0), w(1), w(2));
    FuchsianGroup Gc = groupFromPolygon(cand, K, /*holonomyGate=*/false);
    return relatorResidualVec(Gc);
  };
  Eigen::Vector3d r = evalAt(u);
  for (int it = 0; it < 12 && r.cwiseAbs().maxCoeff() > 1e-10; it++) {
    Eigen::Matrix3d Jac;
    for (int c = 0; c < 3; c++) {
      double h = 1e-8 * std::max(1.0, std::abs(u(c)));
      Eigen::Vector3d up = u, dn = u;
      up(c) += h;
      dn(c) -= h;
      Jac.col(c) = (evalAt(up) - evalAt(dn)) / (2 * h);
    }
    Eigen::Vector3d step = Jac.fullPivLu().solve(-r);
    bool accepted = false;
    double damp = 1.0;
    for (int half = 0; half < 12 && !accepted; half++, damp *= 0.5) {
      Eigen::Vector3d cand = u + damp * step;
      Eigen::Vector3d rc = evalAt(cand);
      if (rc.cwiseAbs().maxCoeff() < r.cwiseAbs().maxCoeff()) {
        u = cand;
        r = rc;
        accepted = true;
      }
    }
    if (!accepted) break;
  }
  FuchsianGroup G = groupFromPolygon(completePolygon(z, u(0), u(1), u(2)), K);
  G.zvc = z;
  return G;
}

namespace {

// Spatial-hash dedup of group elements keyed by the image of a probe
// point; equal elements agree to machine precision while distinct ones in
// a discrete group sit far apart, so cell size 1e-6 with a neighborhood
// scan is safe for the word lengths used here.
class ElementSet {
 public:
  ElementSet() : probe_(0.31, 0.57, std::sqrt(1 + 0.31 * 0.31 + 0.57 * 0.57)) {}

  bool insert(const Eigen::Matrix3d& m) {
    Eigen::Vector3d u = m * probe_;
    long kx = std::lround(u(0) / cell_), ky = std::lround(u(1) / cell_),
         kz = std::lround(u(2) / cell_);
    for (long dx = -1; dx <= 1; dx++)
      for (long dy = -1; dy <= 1; dy++)
        for (long dz = -1; dz <= 1; dz++) {
          auto range = map_.equal_range(key(kx + dx, ky + dy, kz + dz));
          for (auto it = range.first; it != range.second; ++it)
            if ((mats_[it->second] - m).cwiseAbs().maxCoeff() < 1e-6) return false;
        }
    map_.emplace(key(kx, ky, kz), mats_.size());
    mats_.push_back(m);
    return true;
  }

 private:
  static uint64_t key(long x, long y, long z) {
    uint64_t h = 1469598103934665603ull;
    for (uint64_t w : {static_cast<uint64_t>(x), static_cast<uint64_t>(y), static_cast<uint64_t>(z)}) {
      h ^= w;
      h *= 1099511628211ull;
    }
    return h;
  }

  Eigen::Vector3d probe_;
  double cell_ = 1e-6;
  std::unordered_multimap<uint64_t, size_t> map_;
  std::vector<Eigen::Matrix3d> mats_;
};

} // namespace

namespace {

GroupBall computeBall(const FuchsianGroup& G, int radius) {
  GroupBall ball;
  ball.radius = radius;
  ElementSet seen;
  GroupElement id;
  id.m = Eigen::Matrix3d::Identity();
  seen.insert(id.m);
  ball.elements.push_back(id);
  std::vector<GroupElement> frontier = {id};
  int numLetters = 2 * G.genus;
  for (int len = 1; len <= radius; len++) {
    std::vector<GroupElement> next;
    for (const auto& e : frontier) {
      for (int l = 1; l <= numLetters; l++) {
        for (int sign : {+1, -1}) {
          int8_t letter = static_cast<int8_t>(sign * l);
          if (!e.word.letters.empty() && e.word.letters.back() == -letter) continue;
          GroupElement c;
          c.word = e.word;
          c.word.letters.push_back(letter);
          Word w;
          w.letters.push_back(letter);
          c.m = e.m * G.evalWord(w);
          if (!seen.insert(c.m)) continue;
          next.push_back(c);
        }
      }
    }
    ball.elements.insert(ball.elements.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return ball;
}

} // namespace

GroupBall groupBall(const FuchsianGroup& G, int radius) {
  double fp = 0;
  for (const auto& g : G.generators) fp += g.cwiseAbs().sum();
  if (G.cache->fingerprint != fp) {
    G.cache->balls.clear();
    G.cache->fingerprint = fp;
  }
  auto it = G.cache->balls.lower_bound(radius);
  if (it != G.cache->balls.end()) {
    // any ball of radius >= requested contains it; trim by word length
    if (it->first == radius) return *it->second;
    GroupBall trimmed;
    trimmed.radius = radius;
    for (const auto& e : it->second->elements)
      if (e.word.length() <= radius) trimmed.elements.push_back(e);
    return trimmed;
  }
  auto ball = std::make_shared<GroupBall>(computeBall(G, radius));
  G.cache->balls[radius] = ball;
  return *ball;
}

std::vector<SpaceformPoint> orbitBall(const FuchsianGroup& G, const SpaceformPoint& x, int radius) {
  if (!inFutureCone(x)) throw Error("outside-cone", "orbit of a point outside Omega_K");
  auto [y, h] = hyperboloidCoords(x);
  GroupBall ball = groupBall(G, radius);
  std::vector<SpaceformPoint> out;
  out.reserve(ball.elements.size());
  for (const auto& e : ball.elements) out.push_back(liftFromHyperboloid(G.K, e.m * y, h));
  return out;
}

bool dirichletContains(const FuchsianGroup& G, const GroupBall& ball, const Eigen::Vector3d& base,
                       const Eigen::Vector3d& x) {
  (void)G;
  double d0 = hypDistance(x, base);
  for (const auto& e : ball.elements) {
    if (e.word.letters.empty()) continue;
    double d = hypDistance(x, e.m * base);
    if (d < d0 - 1e-12) return false;
  }
  return true;
}

namespace {

Eigen::Vector3d lookupProbe() {
  return {0.31, 0.57, std::sqrt(1 + 0.31 * 0.31 + 0.57 * 0.57)};
}

uint64_t lookupKey(long x, long y, long z) {
  uint64_t h = 1469598103934665603ull;
  for (uint64_t w : {static_cast<uint64_t>(x), static_cast<uint64_t>(y), static_cast<uint64_t>(z)}) {
    h ^= w;
    h *= 1099511628211ull;
  }
  return h;
}

// cells scale with the probe magnitude so that far elements, whose
// matrices carry proportionally larger noise, still land near their cell
long lookupQuant(double v, double scale) { return std::lround(v / (1e-2 * scale)); }

} // namespace

ElementLookup::ElementLookup(const GroupBall& ball) : ball_(ball) {
  for (size_t i = 0; i < ball.elements.size(); i++) {
    Eigen::Vector3d p = ball.elements[i].m * lookupProbe();
    double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
    map_.emplace(lookupKey(lookupQuant(p(0), scale), lookupQuant(p(1), scale),
                           lookupQuant(p(2), scale)),
                 static_cast<int>(i));
  }
}

const GroupElement* ElementLookup::find(const Eigen::Matrix3d& m) const {
  Eigen::Vector3d p = m * lookupProbe();
  double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
  const GroupElement* best = nullptr;
  for (long dx = -1; dx <= 1; dx++)
    for (long dy = -1; dy <= 1; dy++)
      for (long dz = -1; dz <= 1; dz++) {
        uint64_t key = lookupKey(lookupQuant(p(0), scale) + dx, lookupQuant(p(1), scale) + dy,
                                 lookupQuant(p(2), scale) + dz);
        auto range = map_.equal_range(key);
        for (auto it = range.first; it != range.second; ++it) {
          const GroupElement& e = ball_.elements[it->second];
          Eigen::Vector3d q = e.m * lookupProbe();
          if ((q - p).cwiseAbs().maxCoeff() > 1e-3 * scale) continue;
          if (best == nullptr || e.word < best->word) best = &e;
        }
      }
  return best;
}

bool freenessCertificate(const FuchsianGroup& G, int radius, Word* offender) {
  GroupBall ball = groupBall(G, radius);
  // the ball is deduplicated, so it suffices to re-check each element
  for (const auto& e : ball.elements) {
    if (e.word.letters.empty()) continue;
    if ((e.m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-6) {
      if (offender) *offender = e.word;
      return false;
    }
  }
  return true;
}

} // namespace fuchsian
