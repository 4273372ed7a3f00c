#pragma once
#include <cstdint>

#include "dentgame/slicing.hpp"

namespace dentgame {

struct TacticConfig {
  ConeSystem sys;
  EtaSchedule schedule;
  int depth = 0;  // level K used by limit_tactic
  int max_slices = 10000;
};

struct TacticBall {
  Fun center;     // slice functional at the requested level (not unit)
  double radius;  // min(guard radius at x, slice r_budget)
  int level;
  Fun witness;    // unit functional: center rescaled to the dual sphere
};

enum class SelectionMode { CenterNormalized, ExtremePerturbation };

// Unit functional selected from the ball: the normalized center, or a seeded
// perturbation within the ball normalized to the sphere.  Throws
// EmptySelection on a degenerate (near-zero) center.
Fun select_from_ball(const TacticBall& ball, SelectionMode mode,
                     std::uint64_t seed, const PolyhedralNorm& N);

// Parameter of a unit functional t = s*(-tau, 1) in the plane; throws
// BadOrientation when the second coordinate is not positive.
double tau_2d(const Fun& t);

// Drives the partition store on an internal system with epsilon/2 so that
// normalized selections stay within epsilon of f.
class TacticEngine {
 public:
  explicit TacticEngine(TacticConfig cfg);

  Fun eta_tactic(const Vec& x);                   // normalized level-0 functional
  TacticBall tactic_ball(const Vec& x, int k);    // nested guard ball at level k
  Fun limit_tactic(const Vec& x);                 // witness at level cfg.depth
  std::vector<int> locate(const Vec& x, int k) { return store_.locate(x, k); }
  int band_of(const Vec& x) const;                // internal-system band index

  const TacticConfig cfg;
  const ConeSystem& internal_sys() const { return store_.sys; }
  PartitionStore& store() { return store_; }
  const PartitionStore& store() const { return store_; }

 private:
  PartitionStore store_;
};

}  // namespace dentgame
