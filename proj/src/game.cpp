#include "dentgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dentgame {

namespace {

double unit_draw(std::mt19937_64& rng) {
  return (double)(rng() >> 11) * 0x1.0p-53;
}

// Feasible displacements at x: margin floor, step bound, and legality
// against the current tactic value.
Polyhedron feasible_steps(const Adversary& adv, const Fun& t, const Vec& x,
                          const ConeSystem& sys) {
  Polyhedron F(sys.d);
  for (const Fun& v : sys.N.dual) {
    Fun row = sys.f - sys.epsilon * v;
    F.add({row, adv.m - evaluate(row, x)});   // margin(x + dx) >= m
    F.add({(-1.0) * v, -adv.rho});            // ||dx|| <= rho
  }
  F.add({(-1.0) * t, 0.0});                   // t(dx) <= 0
  return F;
}

// Exact legality repair: project the displacement onto {t(dx) = 0} when the
// LP left it a hair on the wrong side.
Vec repair_legality(const Fun& t, const Vec& x, Vec y) {
  double s = evaluate(t, y - x);
  if (s <= 0.0) return y;
  double tt = 0.0;
  for (int i = 0; i < t.dim(); ++i) tt += t[i] * t[i];
  if (tt <= 0.0) return y;
  for (int i = 0; i < t.dim(); ++i) y[i] -= s * t[i] / tt;
  return y;
}

Vec step_random(const Adversary& adv, const Fun& t, const Vec& x,
                const ConeSystem& sys, std::mt19937_64& rng) {
  for (int tries = 0; tries < 200; ++tries) {
    Vec dx = Vec::zero(sys.d);
    for (int i = 0; i < sys.d; ++i)
      dx[i] = adv.rho * (2.0 * unit_draw(rng) - 1.0);
    if (norm(dx, sys.N) > adv.rho) continue;
    if (evaluate(t, dx) > 0.0) continue;
    Vec y = x + dx;
    if (margin(sys, y) < adv.m - 1e-12) continue;
    return y;
  }
  return x;  // stuck
}

Vec step_max_escape(const Adversary& adv, const Fun& t, const Vec& x,
                    const ConeSystem& sys) {
  Polyhedron F = feasible_steps(adv, t, x, sys);
  double best = -std::numeric_limits<double>::infinity();
  Vec best_dx = Vec::zero(sys.d);
  for (const Fun& w : sys.N.dual) {
    LpResult r = lp_min((-1.0) * w, F);  // maximize w(dx)
    if (r.status != LpStatus::Optimal) continue;
    double val = -r.value;
    if (val > best + 1e-12) {
      best = val;
      best_dx = r.argmin;
    }
  }
  if (best <= 1e-12) return x;
  return repair_legality(t, x, x + best_dx);
}

Vec step_band_descent(const Adversary& adv, const Fun& t, const Vec& x,
                      const ConeSystem& sys) {
  Polyhedron F = feasible_steps(adv, t, x, sys);
  std::vector<Vec> V;
  try {
    V = vertices(F);
  } catch (const Error&) {
    return x;
  }
  // margin is concave, so its minimum over F sits at a vertex
  Vec best_dx = Vec::zero(sys.d);
  double best = margin(sys, x);
  for (const Vec& dx : V) {
    double mg = margin(sys, x + dx);
    if (mg < best - 1e-12 ||
        (std::abs(mg - best) <= 1e-12 && dx.c < best_dx.c)) {
      best = mg;
      best_dx = dx;
    }
  }
  return repair_legality(t, x, x + best_dx);
}

Vec step_constant_drift(const Adversary& adv, const Fun& t, const Vec& x,
                        const ConeSystem& sys, std::mt19937_64& rng) {
  // fixed direction drawn once from the seed (rng is freshly seeded per game,
  // and this adversary consumes it only here)
  std::mt19937_64 dir_rng(adv.seed ^ 0x9e3779b97f4a7c15ull);
  Vec u = Vec::zero(sys.d);
  double nu = 0.0;
  for (int tries = 0; tries < 64 && nu <= 1e-12; ++tries) {
    for (int i = 0; i < sys.d; ++i) u[i] = 2.0 * unit_draw(dir_rng) - 1.0;
    nu = norm(u, sys.N);
  }
  (void)rng;
  if (nu <= 1e-12) return x;
  u = (1.0 / nu) * u;
  if (evaluate(t, u) > 0.0) return x;  // drift blocked
  // margin is concave along the ray, so the feasible step set is an interval
  double lo = 0.0, hi = adv.rho;
  if (margin(sys, x + hi * u) >= adv.m - 1e-12) lo = hi;
  for (int i = 0; i < 60 && lo < hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (margin(sys, x + mid * u) >= adv.m - 1e-12)
      lo = mid;
    else
      hi = mid;
  }
  if (lo <= 1e-12) return x;
  return x + lo * u;
}

}  // namespace

bool legal_move(const Fun& t, const Vec& x, const Vec& y) {
  return evaluate(t, y - x) <= 1e-12;
}

Vec adversary_step(const Adversary& adv, const Fun& t, const Vec& x,
                   const ConeSystem& sys, std::mt19937_64& rng) {
  switch (adv.kind) {
    case AdversaryKind::RandomFeasible:
      return step_random(adv, t, x, sys, rng);
    case AdversaryKind::MaxEscape:
      return step_max_escape(adv, t, x, sys);
    case AdversaryKind::BandDescent:
      return step_band_descent(adv, t, x, sys);
    case AdversaryKind::ConstantDrift:
      return step_constant_drift(adv, t, x, sys, rng);
  }
  return x;
}

namespace {

MoveRecord make_record(int n, const Vec& x, const Fun& t, int band,
                       std::vector<int> path, std::string note) {
  MoveRecord r;
  r.n = n;
  r.x = x;
  r.t = t;
  r.band = band;
  r.rank_path = std::move(path);
  if (t.dim() == 2 && t[1] > 1e-12) r.tau = tau_2d(t);
  r.note = std::move(note);
  return r;
}

}  // namespace

Transcript play(TacticEngine& engine, const Adversary& adv, const Vec& x0,
                int max_steps, SelectionMode mode,
                std::uint64_t selection_seed) {
  const ConeSystem& sys = engine.cfg.sys;
  if (margin(sys, x0) < adv.m - 1e-12)
    throw IllegalMove("play: x0 violates the margin floor");
  Transcript tr;
  tr.eps = sys.epsilon;
  std::mt19937_64 rng(adv.seed);
  Vec x = x0;
  int stationary = 0;
  int n = 0;
  // deepest level whose slice construction succeeds at z; the partition is
  // built on demand and deep levels can be unreachable near band tops, so a
  // shallower guard ball is used for such steps rather than aborting the game
  auto locate_deepest = [&engine](const Vec& z) {
    for (int k = engine.cfg.depth;; --k) {
      try {
        return std::make_pair(engine.locate(z, k), k);
      } catch (const CutBoundary&) {
        throw;
      } catch (const SliceNotFound&) {
        if (k == 0) throw;
      } catch (const PeelingBudgetExhausted&) {
        if (k == 0) throw;
      }
    }
  };
  for (; n < max_steps; ++n) {
    auto [path, lvl] = locate_deepest(x);
    int band = engine.band_of(x);
    TacticBall ball = engine.tactic_ball(x, lvl);
    Fun t = mode == SelectionMode::CenterNormalized
                ? ball.witness
                : select_from_ball(ball, mode, selection_seed + (std::uint64_t)n,
                                   sys.N);
    std::string note;
    Vec y = adversary_step(adv, t, x, sys, rng);
    if (!legal_move(t, x, y)) throw IllegalMove("play: adversary reply illegal");
    if (margin(sys, y) < adv.m - 1e-9)
      throw IllegalMove("play: adversary reply violates the margin floor");
    // keep replies off cut boundaries: shrink the step deterministically
    // (the margin floor survives shrinking because the margin is concave)
    for (int j = 1; j <= 40; ++j) {
      try {
        locate_deepest(y);
        break;
      } catch (const CutBoundary&) {
        if (j == 40) throw;
        double s = 1.0 - (double)j * (double)j * 1e-9;
        y = x + s * (y - x);
        note = "boundary_shrink";
      } catch (const Error&) {
        // even level 0 is out of reach there: retreat hard toward x, which
        // has already been located
        if (j == 40) throw;
        double s = 1.0 - (double)j / 40.0;
        y = x + s * (y - x);
        note = "reach_shrink";
      }
    }
    tr.moves.push_back(make_record(n, x, t, band, std::move(path), note));
    if (norm(y - x, sys.N) <= 1e-15) {
      ++stationary;
    } else {
      stationary = 0;
    }
    x = y;
    if (stationary >= 30) {
      ++n;
      break;
    }
  }
  // terminal position
  std::vector<int> path = locate_deepest(x).first;
  tr.moves.push_back(
      make_record(n, x, Fun(), engine.band_of(x), std::move(path), "terminal"));
  tr.termination = stationary >= 30 ? "stationary" : "max_steps";
  return tr;
}

Transcript baseline_constant_tactic(const ConeSystem& sys, const Adversary& adv,
                                    const Vec& x0, int max_steps) {
  if (margin(sys, x0) < adv.m - 1e-12)
    throw IllegalMove("baseline: x0 violates the margin floor");
  Transcript tr;
  tr.eps = sys.epsilon;
  std::mt19937_64 rng(adv.seed);
  Vec x = x0;
  int n = 0;
  for (; n < max_steps; ++n) {
    Vec y = adversary_step(adv, sys.f, x, sys, rng);
    if (!legal_move(sys.f, x, y))
      throw IllegalMove("baseline: adversary reply illegal");
    if (margin(sys, y) < adv.m - 1e-9)
      throw IllegalMove("baseline: adversary reply violates the margin floor");
    tr.moves.push_back(make_record(n, x, sys.f, band_index(sys, x), {}, ""));
    x = y;
  }
  tr.moves.push_back(make_record(n, x, Fun(), band_index(sys, x), {}, "terminal"));
  tr.termination = "max_steps";
  return tr;
}

Diagnostics diagnostics(const Transcript& tr, double eta,
                        const PolyhedralNorm& N) {
  Diagnostics d;
  const auto& mv = tr.moves;
  const int n = (int)mv.size();
  if (n == 0) return d;
  // cauchy_step: first tail whose diameter drops below eta
  std::vector<double> tail_diam(n, 0.0);
  for (int i = n - 2; i >= 0; --i) {
    double best = tail_diam[i + 1];
    for (int j = i + 1; j < n; ++j)
      best = std::max(best, norm(mv[i].x - mv[j].x, N));
    tail_diam[i] = best;
  }
  for (int i = 0; i < n; ++i)
    if (tail_diam[i] < eta) {
      d.cauchy_step = i;
      break;
    }
  // rank monotonicity: band nonincreasing; within a band, rank path
  // lexicographically nonincreasing
  for (int i = 0; i + 1 < n; ++i) {
    const MoveRecord& a = mv[i];
    const MoveRecord& b = mv[i + 1];
    if (b.band < a.band) continue;
    if (b.band > a.band ||
        std::lexicographical_compare(a.rank_path.begin(), a.rank_path.end(),
                                     b.rank_path.begin(), b.rank_path.end())) {
      d.rank_monotone = false;
      break;
    }
  }
  int tail = std::max(2, n / 10);
  double span = 0.0;
  for (int i = n - tail; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      span = std::max(span, norm(mv[i].x - mv[j].x, N));
  d.tail_span = span;
  return d;
}

}  // namespace dentgame
