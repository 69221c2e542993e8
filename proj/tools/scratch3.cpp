#include <cstdio>
#include <vector>

#include "fuchsian/polyhedron.hpp"

using namespace fuchsian;

Eigen::Vector3d foldDebug(const FuchsianGroup& G, std::vector<GroupElement>& steps,
                          Eigen::Vector3d y, const char* tag) {
  Eigen::Vector3d base(0, 0, 1);
  Word w;
  Eigen::Matrix3d acc = Eigen::Matrix3d::Identity();
  Eigen::Vector3d cur = y;
  double d = hypDistance(cur, base);
  for (int guard = 0; guard < 64; guard++) {
    const GroupElement* best = nullptr;
    double bestD = d - 1e-12;
    for (const auto& e : steps) {
      Eigen::Vector3d cand = e.m * cur;
      cand(2) = std::sqrt(1 + cand(0) * cand(0) + cand(1) * cand(1));
      double dc = hypDistance(cand, base);
      if (dc < bestD) {
        bestD = dc;
        best = &e;
      }
    }
    if (!best) break;
    Eigen::Vector3d direct = best->m * cur;
    direct(2) = std::sqrt(1 + direct(0) * direct(0) + direct(1) * direct(1));
    w = best->word.concat(w);
    acc = G.evalWord(w);
    cur = acc * y;
    cur(2) = std::sqrt(1 + cur(0) * cur(0) + cur(1) * cur(1));
    d = hypDistance(cur, base);
    std::fprintf(stderr, "  [%s] step %s claimed=%.9f direct=%.9f recomputed=%.9f word=%s\n", tag,
                 best->word.str().c_str(), bestD, hypDistance(direct, base), d, w.str().c_str());
  }
  std::fprintf(stderr, "  [%s] final d=%.12f word=%s\n", tag, d, w.str().c_str());
  return cur;
}

int main() {
  ZVCCoordinates z;
  z.genus = 3;
  z.values.resize(12);
  z.values << 3.996132615091212, 3.9747415871813212, 3.9679688043137622, 3.9836906246123012,
      0.53749739935918361, 0.52419406550494463, 0.52239320148706525, 0.53946274156582175,
      0.51311915913913619, 0.52971873361488075, 0.53315929252902927, 0.52687701443339063;
  FuchsianGroup G = groupFromZVC(z, 0);
  Eigen::Vector3d yr(1.0049331088092384, -0.23368542219890515, 0);
  Eigen::Vector3d y(yr(0), yr(1), std::sqrt(1 + yr(0) * yr(0) + yr(1) * yr(1)));
  auto W = [&](std::initializer_list<int> ls) {
    Word w;
    for (int l : ls) w.letters.push_back(static_cast<int8_t>(l));
    return w;
  };
  Eigen::Vector3d base(0, 0, 1);
  auto centroidOf = [&](std::initializer_list<std::initializer_list<int>> words) {
    Eigen::Vector3d m = Eigen::Vector3d::Zero();
    for (auto ls : words) m += G.evalWord(W(ls)) * y;
    m /= static_cast<double>(words.size());
    return Eigen::Vector3d(m / std::sqrt(-mink3(m, m)));
  };
  Eigen::Vector3d c1 = centroidOf({{4}, {}, {5}});        // face (b2, e, a3)
  Eigen::Vector3d c3 = centroidOf({{-4}, {-4, 5}, {}});   // face (B2, B2a3, e)
  Eigen::Matrix3d B2 = G.evalWord(W({-4}));
  std::printf("d(c1)=%.15f d(c3)=%.15f  |B2*c1-c3|=%.3e\n", hypDistance(c1, base),
              hypDistance(c3, base), (B2 * c1 - c3).cwiseAbs().maxCoeff());
  // distances of the B2-related copies
  Eigen::Vector3d b2c3 = G.evalWord(W({4})) * c3;
  b2c3(2) = std::sqrt(1 + b2c3(0) * b2c3(0) + b2c3(1) * b2c3(1));
  std::printf("d(b2*c3)=%.15f\n", hypDistance(b2c3, base));

  // replicate dirichletSteps
  double reachLen = 0;
  for (const auto& g : G.generators) reachLen = std::max(reachLen, hypDistance(g * base, base));
  GroupBall ball3 = groupBall(G, 3);
  std::vector<GroupElement> steps;
  for (const auto& e : ball3.elements) {
    if (e.word.letters.empty()) continue;
    if (hypDistance(e.m * base, base) <= 2.0 * reachLen + 1e-9) steps.push_back(e);
  }
  std::printf("step set: %zu elements (gen reach %.3f)\n", steps.size(), reachLen);
  foldDebug(G, steps, c1, "c1");
  foldDebug(G, steps, c3, "c3");
  // reconstruct a raw copy that the build folded with word A3.B2
  Eigen::Matrix3d J = Eigen::Vector3d(1, 1, -1).asDiagonal();
  Eigen::Matrix3d fw = G.evalWord(W({-5, -4}));
  Eigen::Vector3d rawC = (J * fw.transpose() * J) * c3;
  rawC(2) = std::sqrt(1 + rawC(0) * rawC(0) + rawC(1) * rawC(1));
  foldDebug(G, steps, rawC, "raw3");
  return 0;
}
