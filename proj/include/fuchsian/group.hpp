#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fuchsian/lorentz.hpp"
#include "fuchsian/polygon.hpp"

namespace fuchsian {

/// Reduced word over the 2g generators; letter +k means generator k-1,
/// letter -k its inverse (k = 1..2g).
struct Word {
  std::vector<int8_t> letters;

  int length() const { return static_cast<int>(letters.size()); }
  Word inverse() const;
  Word concat(const Word& rhs) const; // free reduction applied
  std::string str() const;            // e.g. "a1.B2" with capitals for inverses
  bool operator<(const Word& rhs) const;
  bool operator==(const Word& rhs) const = default;
};

struct GroupElement {
  Word word;
  Eigen::Matrix3d m; // action on the hyperboloid model of O_K
};

/// Genus-g surface-group representation into the isometries of M_K
/// fixing c_K, built from side pairings of a canonical polygon.
struct GroupBall;

struct FuchsianGroup {
  int K = 0;
  int genus = 2;
  std::vector<Eigen::Matrix3d> generators; // 2g, order A1,B1,A2,B2,...
  double relationResidual = 0;
  ZVCCoordinates zvc;
  CanonicalPolygon polygon;
  // ball cache shared across copies; invalidated when the generators change
  struct BallCache {
    double fingerprint = 0;
    std::map<int, std::shared_ptr<const GroupBall>> balls;
  };
  std::shared_ptr<BallCache> cache = std::make_shared<BallCache>();

  Eigen::Matrix3d evalWord(const Word& w) const;
  Isometry ambient(const Eigen::Matrix3d& m) const { return extendIsometry(m, K); }
  Isometry ambientWord(const Word& w) const { return ambient(evalWord(w)); }

  /// Largest residual over generators of the (2,1)-form preservation.
  double formResidual() const;
};

/// Deduplicated set of group elements of word length <= radius; closed
/// under inverses, contains the identity, sorted by (length, word).
struct GroupBall {
  int radius = 0;
  std::vector<GroupElement> elements;

  const GroupElement& identity() const { return elements.front(); }
};

/// Generators are the side-pairing translations of the polygon, extended
/// to M_K; throws "holonomy" when the relator residual exceeds 1e-6.
FuchsianGroup groupFromPolygon(const CanonicalPolygon& poly, int K,
                               bool holonomyGate = true);

FuchsianGroup groupFromZVC(const ZVCCoordinates& z, int K);

GroupBall groupBall(const FuchsianGroup& G, int radius);

/// Orbit g.x over a ball of reduced words, deduplicated.
std::vector<SpaceformPoint> orbitBall(const FuchsianGroup& G, const SpaceformPoint& x, int radius);

/// Dirichlet-domain membership about `base` (hyperboloid model), certified
/// against the given ball; ties count as inside (identity word is the
/// lexicographic minimum).
bool dirichletContains(const FuchsianGroup& G, const GroupBall& ball,
                       const Eigen::Vector3d& base, const Eigen::Vector3d& x);

/// Probe-keyed index of a ball's elements: resolves a (possibly long)
/// word's element to its shortest stored form, recovering the precision
/// lost in long word evaluations.
class ElementLookup {
 public:
  explicit ElementLookup(const GroupBall& ball);
  /// nullptr when the element lies outside the indexed ball
  const GroupElement* find(const Eigen::Matrix3d& m) const;

 private:
  const GroupBall& ball_;
  std::multimap<uint64_t, int> map_;
};

/// No nontrivial reduced word of length <= radius evaluates to the
/// identity within 1e-6; returns the offending word if one exists.
bool freenessCertificate(const FuchsianGroup& G, int radius, Word* offender = nullptr);

} // namespace fuchsian
