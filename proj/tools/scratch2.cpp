#include <cstdio>

#include "fuchsian/cone_metric.hpp"

using namespace fuchsian;

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
  MarkedConfiguration cfg;
  cfg.group = G;
  cfg.space = Space::Minkowski3;
  cfg.points = {y};
  cfg.heights.resize(1);
  cfg.heights << 0.33117250863209358;
  try {
    FuchsianPolyhedron P = buildHullPolyhedron(cfg, 2, 4);
    std::fprintf(stderr, "built %zu faces\n", P.faces.size());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failed: %s\n", e.what());
  }
  return 0;
}
