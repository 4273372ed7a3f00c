#pragma once
#include <map>
#include <vector>

#include "dentgame/cone.hpp"

namespace dentgame {

struct EtaSchedule {
  std::vector<double> eta;  // eta[0] > eta[1] > ... > eta[K] > 0

  int depth() const { return static_cast<int>(eta.size()) - 1; }
  void validate() const;  // throws ConfigError
};

// One slice of the lazy partition.  The slice set is
//   C = residual(D at creation) ∩ {f_slice < c_slice},
// its closure is stored in reduced form together with its vertices.
struct SliceNode {
  Fun f_slice;
  double c_slice = 0.0;
  int band = 0;
  int level = 0;
  int rank = 0;
  double M = 0.0;         // max norm over the slice closure
  double diam = 0.0;      // diameter of the slice closure
  double r_budget = 0.0;  // radius budget carried to tactic balls
  double min_R = 0.0;     // min over closure vertices of the parent guard radius
  bool identity = false;  // slice equals the set it was cut from

  Polyhedron closure;      // reduced closed slice
  std::vector<Vec> verts;  // vertices of `closure`

  // lazy refinement state
  std::vector<SliceNode> children;
  bool refine_init = false;
  Polyhedron child_residual;  // full residual for the next child cut
  Polyhedron child_work;      // reduced remaining closed region
  std::vector<Vec> child_work_verts;
};

// Guard radius R(x) = (c - f_slice(x)) / (4M) of Lemma-2.1 shape.  Throws
// PointOutsideSlice when f_slice(x) >= c_slice (up to 1e-12).  Returns +inf
// when M ~ 0 (singleton at the origin); callers cap by r_budget.
double guard_radius(const SliceNode& node, const Vec& x,
                    const PolyhedralNorm& N);

// True iff min of g over D ∩ {f_slice >= c_slice} exceeds g(x) (the guard
// law).  Empty residual slab counts as true; an unbounded minimum as false.
bool verify_guard(const Polyhedron& D, const SliceNode& node, const Vec& x,
                  const Fun& g);

struct SmallSlice {
  Fun g;
  double d = 0.0;
  Polyhedron closure;  // reduced closure of C = D ∩ {g < d}
  std::vector<Vec> verts;
  double diam = 0.0;
  double M_S = 0.0;    // max norm over the closure of the sliced set S
  double min_R = 0.0;  // min over closure verts of (c - f_hat(u)) / (4 M_S)
  bool identity = false;
};

// Produces a cut (g, d) with C = D ∩ {g < d} nonempty, contained in
// S = D ∩ {f_hat < c}, of diameter < eta, and with
// dual_norm(g - f_hat) < min(r_bud, min_R).  Deterministic: generic
// perturbation directions in fixed order, tau and delta shrunk by halving.
SmallSlice small_slice(const Polyhedron& D, const Fun& f_hat, double c,
                       double eta, double r_bud, const PolyhedralNorm& N);

struct LambdaFit {
  double lambda = 0.0;
  double residual = 0.0;  // dual_norm(f - lambda*h)
};

// 1-D ternary search for argmin_{lambda>=0} dual_norm(f - lambda*h); throws
// BlendFailed when the residual exceeds sys.epsilon.
LambdaFit lambda_fit(const ConeSystem& sys, const Fun& h);

struct BoundedSlice {
  Fun f_hat;
  double c = 0.0;
  double bound = 0.0;  // norm bound on S = D ∩ {f_hat < c}
  Fun h;               // separator used for the blend
  double lambda = 0.0;
  double tau = 0.0;
};

// Blend construction: separate x0 from Lambda_{p+1}, fit lambda, then blend
// h_tau = (1-tau)*lambda*h + tau*f with tau halved from 0.5 until strict
// separation; c is the midpoint of [f_hat(x0), inf over Lambda_{p+1}].
BoundedSlice bounded_slice(const ConeSystem& sys, const Polyhedron& D, int p,
                           const Vec& x0);

struct BandPartition {
  Polyhedron base;  // Lambda_p itself, before any level-0 cut
  int p = 0;
  Polyhedron residual;  // Lambda_p minus all level-0 slices cut so far
  std::vector<SliceNode> nodes;
  // blend shared by all capture rounds in this band: a fixed tilt keeps the
  // peeled floor aligned with later rounds' level sets, so each round only
  // peels the gap between the floor and its own query point
  Fun f_hat;
  double inf_next = 0.0;  // inf of f_hat over Lambda_{p+1}
  bool has_blend = false;
};

// Append-only memoized partition.  locate() extends the stored structure
// using the query point itself as the next construction center; nodes, once
// created, are immutable apart from their lazily grown child lists.
// Single-writer: not safe for concurrent mutation.
class PartitionStore {
 public:
  PartitionStore(ConeSystem sys, EtaSchedule sched, int max_slices);

  // Rank path of the level-0..level slices containing x; throws CutBoundary
  // for points within 1e-9 of a cut or band boundary, and
  // PeelingBudgetExhausted past max_slices.
  std::vector<int> locate(const Vec& x, int level);

  const SliceNode& node_at(int band, const std::vector<int>& path) const;
  // Residual polyhedron the slice at `path` was cut from.
  Polyhedron residual_of(int band, const std::vector<int>& path) const;

  const std::map<int, BandPartition>& bands() const { return bands_; }
  long long slices_created() const { return created_; }

  const ConeSystem sys;
  const EtaSchedule sched;
  const int max_slices;

 private:
  BandPartition& band_for(int p);
  int find_or_extend_level0(BandPartition& band, const Vec& x);
  int find_or_extend_child(SliceNode& parent, const Vec& x);
  void bump_budget();

  std::map<int, BandPartition> bands_;
  long long created_ = 0;
  long long round_created_ = 0;  // appends within the current locate call
};

}  // namespace dentgame
