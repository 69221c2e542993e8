#pragma once

// Shared helpers for the unit and acceptance suites: seeded instance
// sampling and the ambient-angle oracle (kept independent of the
// law-of-cosines path it cross-checks).

#include <random>

#include "fuchsian/cone_metric.hpp"
#include "fuchsian/polyhedron.hpp"

namespace fuchsian::testing {

struct Sampler {
  std::mt19937_64 rng;
  explicit Sampler(uint64_t seed) : rng(seed) {}
  double unif(double a, double b) {
    std::uniform_real_distribution<double> d(a, b);
    return d(rng);
  }
  double logUnif(double a, double b) { return a * std::exp(unif(0, std::log(b / a))); }
};

/// Marked configuration with points rejection-sampled in the Dirichlet
/// domain and heights log-uniform in [0.2, 1.5] (K=-1 capped at 1.4). For
/// K=1 the heights shrink geometrically until the hull accepts them.
inline MarkedConfiguration sampleConfig(Sampler& s, const FuchsianGroup& G, int n,
                                        double heightScale = 1.0) {
  GroupBall ball = groupBall(G, 3);
  Eigen::Vector3d base(0, 0, 1);
  std::vector<Eigen::Vector3d> pts;
  Eigen::VectorXd hs(n);
  int placed = 0;
  // wider fundamental domains (higher genus) pair with deeper face spreads;
  // keep the marked points nearer the base there so the hull certifies at
  // desk-scale ball radii
  double rMax = G.genus >= 3 ? 0.55 : 1.2;
  while (placed < n) {
    Eigen::Vector3d y = hypPolar(s.unif(0.02, rMax), s.unif(0, 2 * M_PI));
    if (!dirichletContains(G, ball, base, y)) continue;
    bool clash = false;
    for (const auto& p : pts) clash = clash || hypDistance(p, y) < 0.15;
    if (clash) continue;
    pts.push_back(y);
    double h = s.logUnif(0.2, G.K == -1 ? 1.4 : 1.5) * heightScale;
    hs(placed) = std::max(2e-3, h);
    placed++;
  }
  return makeConfiguration(G, pts, hs);
}

/// Builds a random valid hull instance, shrinking heights on the genuine
/// de Sitter rejections.
inline FuchsianPolyhedron sampleHull(Sampler& s, const FuchsianGroup& G, int n) {
  double scale = G.K == 1 ? 0.15 : 1.0;
  for (int attempt = 0; attempt < 24; attempt++) {
    MarkedConfiguration cfg = sampleConfig(s, G, n, scale);
    try {
      return buildHullPolyhedron(cfg);
    } catch (const Error& e) {
      if (e.code == "non-spacelike-face") {
        scale *= 0.7;
        continue;
      }
      if (e.code == "hull-unstable" || e.code == "bad-config") continue;
      throw;
    }
  }
  throw Error("sample-failed", "no valid instance found");
}

/// Independent oracle: cone angles summed from ambient corner tangents
/// along the face cycles, never touching edge lengths.
inline Eigen::VectorXd ambientConeAngles(const FuchsianPolyhedron& P) {
  Space sp = P.space;
  Eigen::VectorXd angles = Eigen::VectorXd::Zero(P.n());
  for (const auto& face : P.faces) {
    int m = static_cast<int>(face.cycle.size());
    for (int k = 0; k < m; k++) {
      Eigen::Vector4d x = P.vertexCoords(face.cycle[k]);
      Eigen::Vector4d prev = P.vertexCoords(face.cycle[(k + m - 1) % m]);
      Eigen::Vector4d next = P.vertexCoords(face.cycle[(k + 1) % m]);
      auto tangent = [&](const Eigen::Vector4d& y) {
        Eigen::Vector4d t;
        if (sp == Space::Minkowski3)
          t = y - x;
        else
          t = y - (formProduct(sp, y, x) / formProduct(sp, x, x)) * x;
        return Eigen::Vector4d(t / std::sqrt(formProduct(sp, t, t)));
      };
      Eigen::Vector4d t1 = tangent(prev), t2 = tangent(next);
      angles(face.cycle[k].marked) += clampedAcos(formProduct(sp, t1, t2));
    }
  }
  return angles;
}

} // namespace fuchsian::testing
