#include <cstdio>
#include <random>

#include "fuchsian/cone_metric.hpp"
#include "../tests/support.hpp"

using namespace fuchsian;
using fuchsian::testing::Sampler;

int main() {
  Sampler s(2022);
  for (int outer = 0; outer < 40; outer++) {
    ZVCCoordinates z = regularZVC(3);
    for (int i = 0; i < z.values.size(); i++) z.values(i) += s.unif(-0.02, 0.02);
    FuchsianGroup G;
    try {
      G = groupFromZVC(z, 0);
    } catch (const std::exception&) {
      continue;
    }
    MarkedConfiguration cfg;
    try {
      cfg = fuchsian::testing::sampleConfig(s, G, 1);
    } catch (const std::exception&) {
      continue;
    }
    try {
      FuchsianPolyhedron P = buildHullPolyhedron(cfg, 2, 4);
      std::fprintf(stderr, "outer %d: built %zu faces\n", outer, P.faces.size());
    } catch (const std::exception& e) {
      std::fprintf(stderr, "outer %d FAILED: %s\n", outer, e.what());
    }
  }
  std::fprintf(stderr, "all built\n");
  return 0;
}
