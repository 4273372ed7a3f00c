#include <cstdio>
#include <cstdlib>
#include "dentgame/slicing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dentgame {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fixed sequence of generic perturbation directions.  The first plane
// direction is exactly (-1, 0); the golden-angle stride keeps later
// candidates in generic position.
std::vector<Fun> generic_dirs(int d) {
  std::vector<Fun> dirs;
  if (d == 1) {
    dirs.push_back(Fun({-1.0}));
    dirs.push_back(Fun({1.0}));
    return dirs;
  }
  const double stride = 2.399963229728653;  // golden angle
  if (d == 2) {
    for (int j = 0; j < 16; ++j) {
      double th = M_PI + j * stride;
      dirs.push_back(Fun({std::cos(th), std::sin(th)}));
    }
    return dirs;
  }
  for (int j = 0; j < 24; ++j) {
    double a = M_PI + j * stride;
    double b = 0.5 + j * 0.37431;
    dirs.push_back(
        Fun({std::cos(a) * std::sin(b), std::sin(a) * std::sin(b), std::cos(b)}));
  }
  return dirs;
}

// Arrange the vertices of a convex 2-D set into traversal order.
void order_convex(std::vector<Vec>& pts) {
  if (pts.size() < 3) return;
  double cx = 0.0, cy = 0.0;
  for (const Vec& v : pts) {
    cx += v[0];
    cy += v[1];
  }
  cx /= (double)pts.size();
  cy /= (double)pts.size();
  std::sort(pts.begin(), pts.end(), [&](const Vec& a, const Vec& b) {
    return std::atan2(a[1] - cy, a[0] - cx) < std::atan2(b[1] - cy, b[0] - cx);
  });
}

// Clip an ordered convex polygon by {g >= d} in place.
void clip_poly(std::vector<Vec>& poly, const Fun& g, double d) {
  const size_t n = poly.size();
  if (n == 0) return;
  std::vector<Vec> out;
  out.reserve(n + 1);
  for (size_t i = 0; i < n; ++i) {
    const Vec& a = poly[i];
    const Vec& b = poly[(i + 1) % n];
    double fa = evaluate(g, a) - d;
    double fb = evaluate(g, b) - d;
    if (fa >= 0.0) out.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))
      out.push_back(a + (fa / (fa - fb)) * (b - a));
  }
  poly = std::move(out);
}

// Rebuild the constraint form of an ordered convex polygon (its edges).
Polyhedron poly_to_polyhedron(const std::vector<Vec>& poly) {
  Polyhedron Q(2);
  const size_t n = poly.size();
  double area2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec& a = poly[i];
    const Vec& b = poly[(i + 1) % n];
    area2 += a[0] * b[1] - b[0] * a[1];
  }
  const double orient = area2 >= 0.0 ? 1.0 : -1.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec& a = poly[i];
    const Vec& b = poly[(i + 1) % n];
    double ex = b[0] - a[0], ey = b[1] - a[1];
    if (std::abs(ex) + std::abs(ey) <= 1e-12) continue;
    Fun g({-orient * ey, orient * ex});  // inward normal
    Q.add({g, g[0] * a[0] + g[1] * a[1]});
  }
  // bounding box of the vertex set: implied by the polygon, and it keeps the
  // constraint form bounded when a sliver's short end edge fell under the
  // degeneracy threshold above
  if (n > 0) {
    double lo[2] = {kInf, kInf}, hi[2] = {-kInf, -kInf};
    for (const Vec& v : poly)
      for (int j = 0; j < 2; ++j) {
        lo[j] = std::min(lo[j], v[j]);
        hi[j] = std::max(hi[j], v[j]);
      }
    for (int j = 0; j < 2; ++j) {
      Fun e(j == 0 ? std::vector<double>{1, 0} : std::vector<double>{0, 1});
      Q.add({e, lo[j]});
      Q.add({(-1.0) * e, -hi[j]});
    }
  }
  return Q;
}

// Core of small_slice against a precomputed reduced closure of
// S = D ∩ {f_hat < c}.  D is the full residual, used only to certify
// containment of the candidate cut in S.
// target (optional): a query point whose capture drives the choice among
// admissible cuts.  eps_slack/band_p (optional): band data allowing the
// containment certificate to be established symbolically instead of by LP.
SmallSlice small_slice_impl(const Polyhedron& D, const Polyhedron& Sbar,
                            const std::vector<Vec>& SV, const Fun& f_hat,
                            double c, double eta, double r_bud,
                            const PolyhedralNorm& N,
                            const Vec* target = nullptr,
                            double eps_slack = -1.0, double band_p = 0.0,
                            double* delta_hint = nullptr,
                            double eta_cut = 0.0) {
  // eta is the admissibility bound; fresh cuts may aim tighter (eta_cut), so
  // deeper refinement levels find the region already small enough and reuse
  // it unshrunk
  if (eta_cut <= 0.0 || eta_cut > eta) eta_cut = eta;
  if (SV.empty()) throw SliceNotFound("small_slice: empty slice closure");
  if (eta <= 0.0) throw SliceNotFound("small_slice: nonpositive eta");
  double fmin = kInf, fmax = -kInf;
  for (const Vec& v : SV) {
    double fv = evaluate(f_hat, v);
    fmin = std::min(fmin, fv);
    fmax = std::max(fmax, fv);
  }
  // deep refinement levels live at tiny scales below the parent cut, so all
  // cut-level comparisons use a tolerance relative to the cut value, a few
  // orders above double-precision noise
  const double ctol = 1e-13 * (1.0 + std::abs(c));
  if (fmin >= c - ctol)
    throw SliceNotFound("small_slice: slice has no interior below the cut");
  const double M_S = max_norm_of(SV, N);
  const double diam_S = diameter_of(SV, N);
  auto min_guard = [&](const std::vector<Vec>& verts) {
    double r = kInf;
    for (const Vec& v : verts)
      r = std::min(r, (c - evaluate(f_hat, v)) / (4.0 * std::max(M_S, 1e-300)));
    return r;
  };
  if (diam_S < eta) {
    // the whole remaining region already fits; take it unperturbed
    SmallSlice out;
    out.g = f_hat;
    out.d = c;
    out.closure = Sbar;
    out.verts = SV;
    out.diam = diam_S;
    out.M_S = M_S;
    out.min_R = min_guard(SV);
    out.identity = true;
    return out;
  }
  if (r_bud <= 0.0) throw SliceNotFound("small_slice: no radius budget");
  const double Rmax = (c - fmin) / (4.0 * M_S);
  // fast path for 2-D: keep the slice closure as a polygon in traversal
  // order, so candidate caps are evaluated by a linear-time clip with no
  // allocation instead of a full vertex re-enumeration
  std::vector<Vec> cyc;
  if (f_hat.dim() == 2 && SV.size() >= 3) {
    cyc = SV;
    double cx = 0.0, cy = 0.0;
    for (const Vec& v : cyc) {
      cx += v[0];
      cy += v[1];
    }
    cx /= (double)cyc.size();
    cy /= (double)cyc.size();
    std::sort(cyc.begin(), cyc.end(), [&](const Vec& a, const Vec& b) {
      return std::atan2(a[1] - cy, a[0] - cx) < std::atan2(b[1] - cy, b[0] - cx);
    });
  }
  std::vector<Vec> cvbuf;
  auto cap_vertices = [&](const Fun& g, double dcut) {
    cvbuf.clear();
    if (!cyc.empty()) {
      const size_t n = cyc.size();
      for (size_t i = 0; i < n; ++i) {
        const Vec& a = cyc[i];
        const Vec& b = cyc[(i + 1) % n];
        double fa = evaluate(g, a) - dcut;
        double fb = evaluate(g, b) - dcut;
        if (fa <= 0.0) cvbuf.push_back(a);
        if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))
          cvbuf.push_back(a + (fa / (fa - fb)) * (b - a));
      }
    } else {
      try {
        reduce_bounded(intersect(Sbar, {(-1.0) * g, -dcut}), &cvbuf);
      } catch (const EmptySetError&) {
        cvbuf.clear();
      }
    }
  };
  // candidate cap: functional, cut level, and the certificates that make it
  // admissible; the closure polyhedron is only materialized for the winner
  struct Cand {
    Fun g;
    double d = 0.0;
    double diam = 0.0;
    double minR = 0.0;
  };
  // feasibility of a (g, gmin + delta) cap; fills the output on success
  auto try_cut = [&](const Fun& g, double pert, double gmin, double delta,
                     Cand& out) {
    const double dcut = gmin + delta;
    cap_vertices(g, dcut);
    if (cvbuf.empty()) return false;
    const double diam_C = diameter_of(cvbuf, N);
    if (diam_C >= eta_cut) return false;
    const double minR = min_guard(cvbuf);
    // strictly inside the guard infimum, keeping a tenth in reserve: the
    // difference is the radius budget this cap passes on when refined later
    if (pert >= 0.9 * std::min(r_bud, minR)) return false;
    // certify D ∩ {g <= dcut} ⊂ S̄.  The part below level c is S̄ ∩ {g <=
    // dcut}, whose vertices are cvbuf: check max f̂ there directly.  Any
    // residual point below the cut but above level c satisfies
    // pert·‖y‖ ≥ c − dcut, while membership in the band keeps
    // ‖y‖ ≤ (dcut − band_p)/(eps_slack − pert); when those contradict, no
    // such point exists.  Without band data, certify by LP instead.
    if (eps_slack > 0.0) {
      for (const Vec& v : cvbuf)
        if (evaluate(f_hat, v) >= c - ctol) return false;
      if (pert > 0.0) {
        if (eps_slack - pert <= 1e-12 || c - dcut <= 1e-12) return false;
        double far = (c - dcut) / pert;
        double near = (dcut - band_p) / (eps_slack - pert);
        if (far <= near * (1.0 + 1e-9) + 1e-9) return false;
      }
    } else {
      LpResult mx = lp_min((-1.0) * f_hat, intersect(D, {(-1.0) * g, -dcut}));
      if (mx.status != LpStatus::Optimal) return false;
      if (-mx.value >= c - ctol) return false;
    }
    out.g = g;
    out.d = dcut;
    out.diam = diam_C;
    out.minR = minR;
    return true;
  };
  // among all generic directions, take the deepest bisection-feasible cut;
  // with a target point, prefer the cut making most progress toward
  // capturing it (smallest g(target) − d, negative once captured)
  Cand best;
  double best_depth = -1.0, best_prog = kInf;
  bool have_best = false;
  for (const Fun& dir : generic_dirs(f_hat.dim())) {
    const double dn_dir = dual_norm(dir, N);
    if (dn_dir <= 1e-12) continue;
    double tau = 0.85 * std::min(r_bud, Rmax) / dn_dir;
    for (int ti = 0; ti < 10; ++ti, tau *= 0.6) {
      Fun g = f_hat + tau * dir;
      // g must expose a unique vertex of the closure
      double gmin = kInf, gsecond = kInf, gmax = -kInf;
      for (const Vec& v : SV) {
        double gv = evaluate(g, v);
        gmax = std::max(gmax, gv);
        if (gv < gmin) {
          gsecond = gmin;
          gmin = gv;
        } else {
          gsecond = std::min(gsecond, gv);
        }
      }
      if (SV.size() > 1 && gsecond - gmin <= 1e-13 * (1.0 + std::abs(gmin)))
        continue;
      const double pert = dual_norm(g - f_hat, N);
      if (pert >= r_bud) continue;
      if (gmax <= gmin) continue;
      // largest feasible depth: seed from the last winning depth (caps of
      // consecutive peels have similar size), bracket by halving/doubling,
      // then bisect
      const double full = gmax - gmin;
      double lo = 0.0, hi = full;
      Cand cand;
      bool found = false;
      double delta =
          (delta_hint && *delta_hint > 0.0 && *delta_hint < full)
              ? *delta_hint
              : full;
      for (int di = 0; di < 60 && !found; ++di, delta *= 0.5) {
        if (try_cut(g, pert, gmin, delta, cand)) {
          lo = delta;
          found = true;
        } else {
          hi = delta;
        }
      }
      if (!found) continue;
      while (lo * 2.0 < hi) {
        double up = lo * 2.0;
        Cand probe;
        if (try_cut(g, pert, gmin, up, probe)) {
          lo = up;
          cand = std::move(probe);
        } else {
          hi = up;
          break;
        }
      }
      for (int bi = 0; bi < 12; ++bi) {
        double mid = 0.5 * (lo + hi);
        Cand probe;
        if (try_cut(g, pert, gmin, mid, probe)) {
          lo = mid;
          cand = std::move(probe);
        } else {
          hi = mid;
        }
      }
      // a cut that captures the target outright wins; otherwise prefer the
      // deepest cut, which consumes the slice fastest
      double prog = target ? evaluate(cand.g, *target) - cand.d : kInf;
      bool capturing = target && prog < -ctol;
      bool better;
      if (capturing) {
        better = !have_best || best_prog >= -ctol || prog < best_prog;
        if (better) best_prog = prog;
      } else {
        better = !have_best ||
                 (best_prog >= -ctol && lo > best_depth);
        if (better) best_prog = prog;
      }
      if (getenv("DG_DEBUG2"))
        fprintf(stderr,
                "  cand dir=(%.3g,%.3g) tau=%.3g pert=%.3g dmax=%.6g "
                "prog=%.6g%s\n",
                dir[0], dir.dim() > 1 ? dir[1] : 0.0, tau, pert, lo, prog,
                better ? " *" : "");
      if (better) {
        best = std::move(cand);
        best_depth = lo;
        have_best = true;
        if (delta_hint) *delta_hint = lo;
      }
      break;  // first feasible perturbation scale for this direction
    }
  }
  if (have_best) {
    // keep the cut boundary clear of the target point: a cut through the
    // target makes it unlocatable without capturing it
    if (target) {
      double gmin = kInf;
      for (const Vec& v : SV) gmin = std::min(gmin, evaluate(best.g, v));
      double gx = evaluate(best.g, *target);
      double prog = gx - best.d;
      // required clearance, a healthy fraction of the cut depth: the
      // target's margin under this cut scales everything built inside the
      // cap at later levels
      double clear = std::max(1e-12 * (1.0 + std::abs(best.d)),
                              0.25 * (best.d - gmin));
      if (prog > -ctol && prog < clear) {
        double pert = dual_norm(best.g - f_hat, N);
        Cand nudged;
        // pull the cut short of the target (it stays peelable next round);
        // failing that, push the cut past it
        double delta = gx - clear - gmin;
        bool fixed = delta > 0.0 && try_cut(best.g, pert, gmin, delta, nudged);
        if (!fixed) {
          delta = gx + clear - gmin;
          fixed = try_cut(best.g, pert, gmin, delta, nudged);
        }
        if (fixed) best = std::move(nudged);
#ifdef DG_DEBUG3
        if (!fixed)
          std::fprintf(stderr,
                       "nudge failed: prog=%.3g d=%.17g gmin=%.17g clear=%.3g\n",
                       prog, best.d, gmin, clear);
#endif
      }
    }
    SmallSlice out;
    out.g = best.g;
    out.d = best.d;
    if (!cyc.empty()) {
      // rebuild the winner from the ordered polygon: the general halfspace
      // reduction works at absolute tolerances and mangles the microscopic
      // caps of deep refinement levels
      cap_vertices(best.g, best.d);
      if (cvbuf.size() < 2)
        throw SliceNotFound("small_slice: admissible cut lost its interior");
      out.verts = cvbuf;
      out.closure = poly_to_polyhedron(out.verts);
    } else {
      try {
        out.closure = reduce_bounded(intersect(Sbar, {(-1.0) * best.g, -best.d}),
                                     &out.verts);
      } catch (const EmptySetError&) {
        throw SliceNotFound("small_slice: admissible cut lost its interior");
      }
    }
    out.diam = diameter_of(out.verts, N);
    out.M_S = M_S;
    out.min_R = min_guard(out.verts);
    out.identity = false;
    return out;
  }
  throw SliceNotFound("small_slice: no admissible cut found");
}

}  // namespace

void EtaSchedule::validate() const {
  if (eta.empty()) throw ConfigError("schedule: empty eta list");
  for (size_t i = 0; i < eta.size(); ++i) {
    if (!(eta[i] > 0.0)) throw ConfigError("schedule: eta must be positive");
    if (i > 0 && !(eta[i] < eta[i - 1]))
      throw ConfigError("schedule: eta must be strictly decreasing");
  }
}

double guard_radius(const SliceNode& node, const Vec& x,
                    const PolyhedralNorm& N) {
  (void)N;
  double s = node.c_slice - evaluate(node.f_slice, x);
  if (s <= 1e-12) throw PointOutsideSlice("guard_radius: x not in the open slice");
  if (node.M <= 1e-12) return kInf;  // singleton at the origin
  return s / (4.0 * node.M);
}

bool verify_guard(const Polyhedron& D, const SliceNode& node, const Vec& x,
                  const Fun& g) {
  Polyhedron slab = intersect(D, {node.f_slice, node.c_slice});
  LpResult r = lp_min(g, slab);
  if (r.status == LpStatus::Empty) return true;
  if (r.status == LpStatus::Unbounded) return false;
  return r.value > evaluate(g, x);
}

SmallSlice small_slice(const Polyhedron& D, const Fun& f_hat, double c,
                       double eta, double r_bud, const PolyhedralNorm& N) {
  Polyhedron Sbar_full = intersect(D, {(-1.0) * f_hat, -c});
  std::vector<Vec> SV;
  Polyhedron Sbar;
  try {
    Sbar = reduce_bounded(Sbar_full, &SV);
  } catch (const EmptySetError&) {
    throw SliceNotFound("small_slice: slice is empty");
  }
  return small_slice_impl(D, Sbar, SV, f_hat, c, eta, r_bud, N);
}

LambdaFit lambda_fit(const ConeSystem& sys, const Fun& h) {
  auto phi = [&](double l) { return dual_norm(sys.f - l * h, sys.N); };
  double lo = 0.0, hi = 4.0;
  for (int i = 0; i < 300 && hi - lo > 1e-12; ++i) {
    double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
    if (phi(a) <= phi(b))
      hi = b;
    else
      lo = a;
  }
  LambdaFit fit;
  fit.lambda = 0.5 * (lo + hi);
  fit.residual = phi(fit.lambda);
  if (phi(0.0) <= fit.residual) {
    fit.lambda = 0.0;
    fit.residual = phi(0.0);
  }
  if (fit.residual > sys.epsilon + 1e-9)
    throw BlendFailed("lambda_fit: residual exceeds epsilon");
  return fit;
}

BoundedSlice bounded_slice(const ConeSystem& sys, const Polyhedron& D, int p,
                           const Vec& x0) {
  if (!contains(D, x0, 1e-9))
    throw PointOutsideSlice("bounded_slice: x0 not in the residual");
  Polyhedron next = lambda_p(sys, p + 1);
  if (contains(next, x0, 1e-9))
    throw SeparationFailed("bounded_slice: x0 lies in the next cone band");
  Separation sep;
  try {
    sep = separate_point(x0, next, sys.N);
  } catch (const NotSeparable& e) {
    throw SeparationFailed(std::string("bounded_slice: ") + e.what());
  }
  LambdaFit fit = lambda_fit(sys, sep.h);
  // feasible blends form an interval touching tau=0; bisect from 1 downward
  // for the largest one (closer to f means a larger radius budget and a
  // smaller bounded slice)
  Fun fh;
  double infv = 0.0;
  auto blend_ok = [&](double t, Fun& g, double& iv) {
    g = ((1.0 - t) * fit.lambda) * sep.h + t * sys.f;
    if (dual_norm(sys.f - g, sys.N) >= sys.epsilon - 1e-12) return false;
    LpResult r = lp_min(g, next);
    if (r.status != LpStatus::Optimal) return false;
    if (evaluate(g, x0) + 1e-9 > r.value) return false;
    iv = r.value;
    return true;
  };
  // halve tau from 0.5 down to the first blend that separates strictly; a
  // larger tau (blend closer to f) keeps the bounded slice narrow, which is
  // what controls the peeling effort inside it
  double tau = 0.0;
  bool ok = false;
  for (double t = 0.5; t > 1e-18; t *= 0.5) {
    if (blend_ok(t, fh, infv)) {
      tau = t;
      ok = true;
      break;
    }
  }
  if (!ok) throw BlendFailed("bounded_slice: no blend separates strictly");
  BoundedSlice out;
  out.f_hat = fh;
  out.c = 0.5 * (evaluate(fh, x0) + infv);
  out.h = sep.h;
  out.lambda = fit.lambda;
  out.tau = tau;
  double dn = dual_norm(sys.f - fh, sys.N);
  if (dn >= sys.epsilon - 1e-12)
    throw BlendFailed("bounded_slice: blend too far from f to bound the slice");
  out.bound = (out.c - p) / (sys.epsilon - dn);
  return out;
}

PartitionStore::PartitionStore(ConeSystem s, EtaSchedule sc, int ms)
    : sys(std::move(s)), sched(std::move(sc)), max_slices(ms) {
  sys.validate();
  sched.validate();
  if (max_slices <= 0) throw ConfigError("max_slices must be positive");
}

void PartitionStore::bump_budget() {
  ++created_;
  if (++round_created_ > max_slices)
    throw PeelingBudgetExhausted(
        "partition: max_slices exceeded within a single locate call");
}

BandPartition& PartitionStore::band_for(int p) {
  auto it = bands_.find(p);
  if (it == bands_.end()) {
    BandPartition band;
    band.p = p;
    band.base = lambda_p(sys, p);
    band.residual = band.base;
    it = bands_.emplace(p, std::move(band)).first;
  }
  return it->second;
}

namespace {

// first slice in rank order whose open cut captures x; -1 when none
int scan_nodes(const std::vector<SliceNode>& nodes, const Vec& x) {
  for (size_t i = 0; i < nodes.size(); ++i) {
    // the boundary tolerance strictly dominates the openness threshold in
    // guard_radius, so a located point always has a positive guard radius
    double s = evaluate(nodes[i].f_slice, x) - nodes[i].c_slice;
    if (std::abs(s) <= 1e-13 * (1.0 + std::abs(nodes[i].c_slice)))
      throw CutBoundary("locate: x on a slice cut boundary");
    if (s < 0) return (int)i;
  }
  return -1;
}

}  // namespace

int PartitionStore::find_or_extend_level0(BandPartition& band, const Vec& x) {
  int found = scan_nodes(band.nodes, x);
  if (found >= 0) return found;
  // capture round: bound the band around x with the shared blend (building
  // it on first use), then peel until captured
  if (!band.has_blend) {
    // anchor the shared blend at a point well inside the band below x: a
    // query that entered near the band's top would force a blend with a
    // collapsed budget, and the blend's budget sets the width of every
    // slab peeled in this band from now on
    Vec anchor = x;
    double mx = margin(sys, x);
    double target = band.p + 0.25;
    if (mx > target && !sys.N.primal.empty()) {
      Vec v = sys.N.primal.front();
      double bestf = evaluate(sys.f, v);
      for (const Vec& u : sys.N.primal) {
        double fu = evaluate(sys.f, u);
        if (fu > bestf) {
          bestf = fu;
          v = u;
        }
      }
      if (bestf > sys.epsilon + 1e-12) {
        // margin is concave along -v and decreasing at rate >= bestf -
        // epsilon > 0, so a bisection pins the target level
        double lo = 0.0, hi = (mx - target) / (bestf - sys.epsilon);
        for (int i = 0; i < 80 && hi - lo > 1e-12; ++i) {
          double mid = 0.5 * (lo + hi);
          if (margin(sys, x - mid * v) > target)
            lo = mid;
          else
            hi = mid;
        }
        Vec cand = x - lo * v;
        if (contains(band.residual, cand, 1e-9)) anchor = cand;
      }
    }
    BoundedSlice bs = bounded_slice(sys, band.residual, band.p, anchor);
    band.f_hat = bs.f_hat;
    band.inf_next = 2.0 * bs.c - evaluate(bs.f_hat, anchor);
    band.has_blend = true;
  }
  // fall back to a one-off blend when the shared one does not separate this
  // query; the shared floor alignment is kept for later rounds
  Fun fh_oneoff;
  const Fun* fh_sel = &band.f_hat;
  double inf_next = band.inf_next;
  if (evaluate(band.f_hat, x) >= band.inf_next - 1e-9) {
    BoundedSlice bs = bounded_slice(sys, band.residual, band.p, x);
    fh_oneoff = bs.f_hat;
    fh_sel = &fh_oneoff;
    inf_next = 2.0 * bs.c - evaluate(bs.f_hat, x);
  }
  const Fun& fh = *fh_sel;
  const double c = 0.5 * (evaluate(fh, x) + inf_next);
  std::vector<Vec> SV;
  Polyhedron Sbar;
  bool fast = sys.d == 2;
  if (fast) {
    // the residual accumulates one cut per stored node; rebuild the slice
    // closure by clipping the small band-level polygon with those cuts
    // instead of re-enumerating vertices of the full constraint system
    Sbar = reduce_bounded(intersect(band.base, {(-1.0) * fh, -c}), &SV);
    order_convex(SV);
    for (const SliceNode& nd : band.nodes) {
      clip_poly(SV, nd.f_slice, nd.c_slice);
      if (SV.empty())
        throw SliceNotFound("locate: slice already fully covered");
    }
    if (SV.size() >= 3)
      Sbar = poly_to_polyhedron(SV);
    else
      fast = false;
  }
  if (!fast)
    Sbar = reduce_bounded(intersect(band.residual, {(-1.0) * fh, -c}), &SV);
  const double r_bud = sys.epsilon - dual_norm(sys.f - fh, sys.N);
  double dhint = 0.0;
  for (;;) {
    SmallSlice ss =
        small_slice_impl(band.residual, Sbar, SV, fh, c,
                         sched.eta[0], r_bud, sys.N, &x, r_bud, band.p,
                         &dhint);
    bump_budget();
    SliceNode node;
    node.f_slice = ss.g;
    node.c_slice = ss.d;
    node.band = band.p;
    node.level = 0;
    node.rank = (int)band.nodes.size();
    node.closure = ss.closure;
    node.verts = ss.verts;
    node.M = max_norm_of(ss.verts, sys.N);
    node.diam = ss.diam;
    node.min_R = ss.min_R;
    node.identity = ss.identity;
    node.r_budget = sys.epsilon - dual_norm(sys.f - ss.g, sys.N);
    if (node.r_budget <= 0.0)
      throw SliceNotFound("locate: level-0 radius budget collapsed");
    band.residual.add({ss.g, ss.d, Sense::AtLeast});
    band.nodes.push_back(std::move(node));
    double s = evaluate(ss.g, x) - ss.d;
    if (getenv("DG_DEBUG")) {
      double area2 = 0.0;
      for (size_t i = 0; i + 2 < ss.verts.size(); ++i) {
        double ax = ss.verts[i + 1][0] - ss.verts[0][0];
        double ay = ss.verts[i + 1][1] - ss.verts[0][1];
        double bx = ss.verts[i + 2][0] - ss.verts[0][0];
        double by = ss.verts[i + 2][1] - ss.verts[0][1];
        area2 += std::abs(ax * by - ay * bx);
      }
      double pert = dual_norm(ss.g - fh, sys.N);
      fprintf(stderr,
              "L0 peel %zu: d=%.9g s=%.9g diam=%.4g pert=%.3g area=%.4g minR=%.3g id=%d\n",
              band.nodes.size(), ss.d, s, ss.diam, pert, 0.5 * area2,
              ss.min_R, (int)ss.identity);
    }
    if (std::abs(s) <= 2e-12 * (1.0 + std::abs(ss.d)))
      throw CutBoundary("locate: x on a fresh cut boundary");
    if (s < 0) return (int)band.nodes.size() - 1;
    if (sys.d == 2 && SV.size() >= 3) {
      // drop the freshly peeled cap with a linear-time polygon clip
      clip_poly(SV, ss.g, ss.d);
      if (SV.size() < 3)
        throw SliceNotFound("locate: remaining band slice degenerate");
      Sbar = poly_to_polyhedron(SV);
    } else {
      Sbar = reduce_bounded(intersect(Sbar, {ss.g, ss.d}), &SV);
    }
  }
}

int PartitionStore::find_or_extend_child(SliceNode& parent, const Vec& x) {
  int found = scan_nodes(parent.children, x);
  if (found >= 0) return found;
  double dhint = 0.0;
  for (;;) {
    SmallSlice ss = small_slice_impl(
        parent.child_residual, parent.child_work, parent.child_work_verts,
        parent.f_slice, parent.c_slice, sched.eta[parent.level + 1],
        parent.r_budget, sys.N, &x,
        sys.epsilon - dual_norm(sys.f - parent.f_slice, sys.N),
        (double)parent.band, &dhint,
        0.95 * sched.eta[std::min(parent.level + 2, sched.depth())]);
    bump_budget();
    SliceNode ch;
    ch.f_slice = ss.g;
    ch.c_slice = ss.d;
    ch.band = parent.band;
    ch.level = parent.level + 1;
    ch.rank = (int)parent.children.size();
    ch.closure = ss.closure;
    ch.verts = ss.verts;
    ch.M = max_norm_of(ss.verts, sys.N);
    ch.diam = ss.diam;
    ch.min_R = ss.min_R;
    ch.identity = ss.identity;
    if (ss.identity) {
      // no shrink: same functional, same budget (centers coincide, so the
      // ball nesting stays tight)
      ch.r_budget = parent.r_budget;
    } else {
      ch.r_budget = std::min(parent.r_budget, ss.min_R) -
                    dual_norm(ss.g - parent.f_slice, sys.N);
    }
    if (ch.r_budget <= 0.0)
      throw SliceNotFound("locate: child radius budget collapsed");
    parent.child_residual.add({ss.g, ss.d, Sense::AtLeast});
    parent.children.push_back(std::move(ch));
    double s = evaluate(ss.g, x) - ss.d;
    if (std::abs(s) <= 2e-12 * (1.0 + std::abs(ss.d)))
      throw CutBoundary("locate: x on a fresh cut boundary");
    if (s < 0) return (int)parent.children.size() - 1;
    if (sys.d == 2 && parent.child_work_verts.size() >= 3) {
      // drop the freshly peeled cap with a linear-time polygon clip; a full
      // halfspace re-reduction over all accumulated cuts is cubic and
      // dominates the peel loop
      clip_poly(parent.child_work_verts, ss.g, ss.d);
      if (parent.child_work_verts.size() < 3)
        throw SliceNotFound("locate: remaining region degenerate");
      parent.child_work = poly_to_polyhedron(parent.child_work_verts);
    } else {
      parent.child_work =
          reduce_bounded(intersect(parent.child_work, {ss.g, ss.d}),
                         &parent.child_work_verts);
    }
  }
}

std::vector<int> PartitionStore::locate(const Vec& x, int level) {
  round_created_ = 0;
  if (x.dim() != sys.d) throw DimensionMismatch("locate: bad point dimension");
  if (level < 0 || level > sched.depth())
    throw ConfigError("locate: level outside the schedule");
  double m = margin(sys, x);
  if (std::abs(m - std::round(m)) <= 1e-9)
    throw CutBoundary("locate: x within 1e-9 of a band boundary");
  int p = (int)std::floor(m);
  BandPartition& band = band_for(p);
  std::vector<int> path;
  path.push_back(find_or_extend_level0(band, x));
  SliceNode* node = &band.nodes[path[0]];
  for (int k = 1; k <= level; ++k) {
    if (!node->refine_init) {
      std::vector<int> parent_path(path.begin(), path.end());
      node->child_residual = residual_of(p, parent_path);
      node->child_work = node->closure;
      node->child_work_verts = node->verts;
      if (sys.d == 2) order_convex(node->child_work_verts);
      node->refine_init = true;
    }
    int idx = find_or_extend_child(*node, x);
    path.push_back(idx);
    node = &node->children[idx];
  }
  return path;
}

const SliceNode& PartitionStore::node_at(int band,
                                         const std::vector<int>& path) const {
  const BandPartition& bp = bands_.at(band);
  const SliceNode* node = &bp.nodes.at(path.at(0));
  for (size_t k = 1; k < path.size(); ++k) node = &node->children.at(path[k]);
  return *node;
}

Polyhedron PartitionStore::residual_of(int band,
                                       const std::vector<int>& path) const {
  const BandPartition& bp = bands_.at(band);
  Polyhedron D = lambda_p(sys, band);
  for (int i = 0; i < path.at(0); ++i)
    D.add({bp.nodes[i].f_slice, bp.nodes[i].c_slice});
  const SliceNode* node = &bp.nodes.at(path.at(0));
  for (size_t k = 1; k < path.size(); ++k) {
    for (int i = 0; i < path[k]; ++i)
      D.add({node->children[i].f_slice, node->children[i].c_slice});
    node = &node->children.at(path[k]);
  }
  return D;
}

}  // namespace dentgame
