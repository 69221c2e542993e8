#include "fuchsian/hull.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "fuchsian/lorentz.hpp"

namespace fuchsian {

namespace {

struct Facet {
  int v[3];
  Eigen::Vector3d n;
  double off;
  int adj[3]; // neighbor across edge (v[i], v[(i+1)%3])
  std::vector<int> outside;
  int farthest = -1;
  double farDist = 0;
  bool alive = true;
};

double dist(const Facet& f, const Eigen::Vector3d& p) { return f.n.dot(p) - f.off; }

bool facetFrom(const std::vector<Eigen::Vector3d>& pts, int a, int b, int c, Facet& f) {
  Eigen::Vector3d n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
  double ln = n.norm();
  if (ln < 1e-14) return false;
  f.v[0] = a;
  f.v[1] = b;
  f.v[2] = c;
  f.n = n / ln;
  f.off = f.n.dot(pts[a]);
  f.adj[0] = f.adj[1] = f.adj[2] = -1;
  return true;
}

uint64_t edgeKey(int u, int v) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(u)) << 32) | static_cast<uint32_t>(v);
}

} // namespace

namespace {

std::vector<HullFacet> convexHullAttempt(const std::vector<Eigen::Vector3d>& pts, double planeTol) {
  int n = static_cast<int>(pts.size());
  if (n < 4) throw Error("degenerate", "hull needs at least 4 points");
  double scale = 0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  // visibility band relative to each point's own magnitude: a global band
  // would flatten near-origin features when the point set spans many
  // orders of magnitude
  double tolRel = std::max(planeTol, 1e-13);
  auto eps = [tolRel](const Eigen::Vector3d& p) {
    return tolRel * std::max(1.0, p.cwiseAbs().maxCoeff());
  };

  // initial simplex from extreme points
  int i0 = 0, i1 = 0;
  for (int d = 0; d < 3; d++) {
    int lo = 0, hi = 0;
    for (int i = 1; i < n; i++) {
      if (pts[i](d) < pts[lo](d)) lo = i;
      if (pts[i](d) > pts[hi](d)) hi = i;
    }
    if ((pts[hi] - pts[lo]).norm() > (pts[i1] - pts[i0]).norm()) {
      i0 = lo;
      i1 = hi;
    }
  }
  if ((pts[i1] - pts[i0]).norm() < eps(pts[i0])) throw Error("degenerate", "point set has no extent");
  int i2 = -1;
  double best = eps(pts[i0]);
  Eigen::Vector3d dir = (pts[i1] - pts[i0]).normalized();
  for (int i = 0; i < n; i++) {
    Eigen::Vector3d r = pts[i] - pts[i0];
    double d = (r - r.dot(dir) * dir).norm();
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (i2 < 0) throw Error("degenerate", "point set is collinear");
  Eigen::Vector3d pn = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  int i3 = -1;
  best = eps(pts[i0]);
  for (int i = 0; i < n; i++) {
    double d = std::abs(pn.dot(pts[i] - pts[i0]));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (i3 < 0) throw Error("degenerate", "point set is coplanar");
  if (pn.dot(pts[i3] - pts[i0]) > 0) std::swap(i1, i2);

  std::vector<Facet> fs(4);
  // tetrahedron (i0,i1,i2,i3) with outward orientation
  if (!facetFrom(pts, i0, i1, i2, fs[0]) || !facetFrom(pts, i0, i3, i1, fs[1]) ||
      !facetFrom(pts, i1, i3, i2, fs[2]) || !facetFrom(pts, i2, i3, i0, fs[3]))
    throw Error("degenerate", "initial simplex is flat");

  auto wire = [&](std::vector<int> ids) {
    std::unordered_map<uint64_t, std::pair<int, int>> half;
    for (int fi : ids) {
      for (int e = 0; e < 3; e++) {
        int u = fs[fi].v[e], v = fs[fi].v[(e + 1) % 3];
        auto it = half.find(edgeKey(v, u));
        if (it != half.end()) {
          fs[fi].adj[e] = it->second.first;
          fs[it->second.first].adj[it->second.second] = fi;
        } else {
          half[edgeKey(u, v)] = {fi, e};
        }
      }
    }
  };
  wire({0, 1, 2, 3});

  auto assign = [&](int pi, const std::vector<int>& candidates) {
    for (int fi : candidates) {
      if (!fs[fi].alive) continue;
      double d = dist(fs[fi], pts[pi]);
      if (d > eps(pts[pi])) {
        fs[fi].outside.push_back(pi);
        if (d > fs[fi].farDist) {
          fs[fi].farDist = d;
          fs[fi].farthest = pi;
        }
        return;
      }
    }
  };
  for (int i = 0; i < n; i++) {
    if (i == i0 || i == i1 || i == i2 || i == i3) continue;
    assign(i, {0, 1, 2, 3});
  }

  std::vector<int> pending;
  for (int fi = 0; fi < 4; fi++)
    if (!fs[fi].outside.empty()) pending.push_back(fi);

  while (!pending.empty()) {
    int fi = pending.back();
    pending.pop_back();
    if (!fs[fi].alive || fs[fi].outside.empty()) continue;
    int p = fs[fi].farthest;

    // visible set via BFS over adjacency
    std::vector<int> visible = {fi};
    std::vector<char> seen(fs.size(), 0);
    seen[fi] = 1;
    std::vector<std::pair<int, int>> horizon; // (facet, edge) from the visible side
    for (size_t k = 0; k < visible.size(); k++) {
      int cur = visible[k];
      for (int e = 0; e < 3; e++) {
        int nb = fs[cur].adj[e];
        if (nb < 0) throw Error("degenerate", "open hull surface");
        if (seen[nb]) continue;
        if (dist(fs[nb], pts[p]) > eps(pts[p])) {
          seen[nb] = 1;
          visible.push_back(nb);
        } else {
          horizon.push_back({cur, e});
        }
      }
    }

    // collect orphaned outside points
    std::vector<int> orphans;
    for (int vi : visible) {
      for (int q : fs[vi].outside)
        if (q != p) orphans.push_back(q);
      fs[vi].alive = false;
      fs[vi].outside.clear();
    }

    // new facets over horizon edges
    std::unordered_map<int, int> byStart, byEnd;
    std::vector<int> fresh;
    for (auto [hf, he] : horizon) {
      int a = fs[hf].v[he], b = fs[hf].v[(he + 1) % 3];
      if (byStart.count(a) || byEnd.count(b))
        throw Error("pinched", "horizon touches a vertex twice");
      Facet nf;
      if (!facetFrom(pts, a, b, p, nf)) throw Error("degenerate", "sliver facet at horizon");
      nf.adj[0] = fs[hf].adj[he]; // outside neighbor across (a,b)
      int id = static_cast<int>(fs.size());
      // fix the neighbor's back-pointer
      int nb = fs[hf].adj[he];
      for (int e = 0; e < 3; e++)
        if (fs[nb].adj[e] == hf) fs[nb].adj[e] = id;
      fs.push_back(nf);
      byStart[a] = id;
      byEnd[b] = id;
      fresh.push_back(id);
    }
    for (int id : fresh) {
      int a = fs[id].v[0], b = fs[id].v[1];
      auto itS = byStart.find(b), itE = byEnd.find(a);
      if (itS == byStart.end() || itE == byEnd.end())
        throw Error("pinched", "open horizon cycle");
      fs[id].adj[1] = itS->second; // edge (b,p)
      fs[id].adj[2] = itE->second; // edge (p,a)
    }
    for (int q : orphans) assign(q, fresh);
    for (int id : fresh)
      if (!fs[id].outside.empty()) pending.push_back(id);
  }

  std::vector<HullFacet> out;
  for (const auto& f : fs) {
    if (!f.alive) continue;
    out.push_back(HullFacet{f.v[0], f.v[1], f.v[2], f.n, f.off});
  }
  return out;
}

} // namespace

std::vector<HullFacet> convexHull(const std::vector<Eigen::Vector3d>& pts, double planeTol) {
  // Pinched horizons come from nearly coplanar regions. Retries first
  // jitter the points deterministically, then widen the visibility band;
  // callers recompute exact geometry from group labels afterwards, so both
  // knobs only reshuffle the candidate topology.
  double tol = planeTol;
  for (int round = 0; round < 3; round++, tol *= 100) {
    for (int attempt = 0; attempt < 3; attempt++) {
      try {
        if (attempt == 0) return convexHullAttempt(pts, tol);
        double scale = 1.0;
        for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
        std::vector<Eigen::Vector3d> jittered = pts;
        uint64_t h = 88172645463325252ull + 977 * round + attempt;
        for (auto& p : jittered)
          for (int c = 0; c < 3; c++) {
            h ^= h << 13;
            h ^= h >> 7;
            h ^= h << 17;
            double u = static_cast<double>(h % 2000001) / 1000000.0 - 1.0;
            p(c) += 1e3 * tol * scale * attempt * u;
          }
        return convexHullAttempt(jittered, tol);
      } catch (const Error& e) {
        if (e.code != "pinched") throw;
      }
    }
  }
  throw Error("degenerate", "hull horizons stayed pinched");
}

// 2d convex hull (monotone chain); returns indices in counterclockwise order
std::vector<int> hullPolygon2D(const std::vector<Eigen::Vector2d>& q) {
  int n = static_cast<int>(q.size());
  std::vector<int> idx(n);
  for (int i = 0; i < n; i++) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return q[a](0) < q[b](0) || (q[a](0) == q[b](0) && q[a](1) < q[b](1));
  });
  auto cross = [&](int o, int a, int b) {
    return (q[a] - q[o])(0) * (q[b] - q[o])(1) - (q[a] - q[o])(1) * (q[b] - q[o])(0);
  };
  std::vector<int> h;
  for (int ii = 0; ii < n; ii++) { // lower chain
    int i = idx[ii];
    while (h.size() >= 2 && cross(h[h.size() - 2], h.back(), i) <= 0) h.pop_back();
    h.push_back(i);
  }
  size_t lower = h.size() + 1;
  for (int ii = n - 2; ii >= 0; ii--) { // upper chain
    int i = idx[ii];
    while (h.size() >= lower && cross(h[h.size() - 2], h.back(), i) <= 0) h.pop_back();
    h.push_back(i);
  }
  h.pop_back();
  return h;
}

std::vector<HullFace> convexHullFaces(const std::vector<Eigen::Vector3d>& pts, double mergeTol) {
  std::vector<HullFacet> facets = convexHull(pts);
  double scale = 1.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());

  // adjacency via shared directed edges
  std::unordered_map<uint64_t, int> owner;
  for (size_t i = 0; i < facets.size(); i++) {
    const auto& f = facets[i];
    int vs[3] = {f.a, f.b, f.c};
    for (int e = 0; e < 3; e++) owner[edgeKey(vs[e], vs[(e + 1) % 3])] = static_cast<int>(i);
  }
  auto neighbor = [&](const HullFacet& f, int e) {
    int vs[3] = {f.a, f.b, f.c};
    return owner.at(edgeKey(vs[(e + 1) % 3], vs[e]));
  };

  // group coplanar connected facets
  std::vector<int> group(facets.size(), -1);
  int numGroups = 0;
  for (size_t i = 0; i < facets.size(); i++) {
    if (group[i] >= 0) continue;
    int gid = numGroups++;
    std::vector<int> stack = {static_cast<int>(i)};
    group[i] = gid;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      for (int e = 0; e < 3; e++) {
        int nb = neighbor(facets[cur], e);
        if (group[nb] >= 0) continue;
        bool coplanar = facets[cur].normal.dot(facets[nb].normal) > 1.0 - mergeTol &&
                        std::abs(facets[cur].offset - facets[nb].offset) < mergeTol * scale;
        if (coplanar) {
          group[nb] = gid;
          stack.push_back(nb);
        }
      }
    }
  }

  std::vector<HullFace> faces(numGroups);
  std::vector<std::vector<int>> members(numGroups);
  for (size_t i = 0; i < facets.size(); i++) members[group[i]].push_back(static_cast<int>(i));

  std::vector<char> isVertex(pts.size(), 0);
  for (const auto& f : facets) {
    isVertex[f.a] = isVertex[f.b] = isVertex[f.c] = 1;
  }
  std::vector<int> loose;
  for (size_t i = 0; i < pts.size(); i++)
    if (!isVertex[i]) loose.push_back(static_cast<int>(i));

  for (int gid = 0; gid < numGroups; gid++) {
    HullFace& face = faces[gid];
    face.normal = Eigen::Vector3d::Zero();
    for (int fi : members[gid]) face.normal += facets[fi].normal;
    face.normal.normalize();
    double off = 0;
    int cnt = 0;
    std::vector<int> vset;
    for (int fi : members[gid]) {
      for (int v : {facets[fi].a, facets[fi].b, facets[fi].c}) {
        if (std::find(vset.begin(), vset.end(), v) == vset.end()) vset.push_back(v);
      }
    }
    for (int v : vset) {
      off += face.normal.dot(pts[v]);
      cnt++;
    }
    face.offset = off / cnt;

    // cocircular points dropped by the facet hull re-enter through the 2d hull
    for (int v : loose)
      if (std::abs(face.normal.dot(pts[v]) - face.offset) < mergeTol * scale) vset.push_back(v);

    // frame on the plane, counterclockwise w.r.t. the outward normal
    Eigen::Vector3d e1 = (pts[vset[1]] - pts[vset[0]]).normalized();
    Eigen::Vector3d e2 = face.normal.cross(e1);
    std::vector<Eigen::Vector2d> flat;
    flat.reserve(vset.size());
    for (int v : vset)
      flat.push_back(Eigen::Vector2d(e1.dot(pts[v] - pts[vset[0]]), e2.dot(pts[v] - pts[vset[0]])));
    std::vector<int> cyc = hullPolygon2D(flat);
    face.cycle.reserve(cyc.size());
    for (int c : cyc) face.cycle.push_back(vset[c]);
  }
  return faces;
}

} // namespace fuchsian
