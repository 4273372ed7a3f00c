#include "dentgame/tactic.hpp"

#include <cmath>
#include <random>

namespace dentgame {

namespace {

Fun normalize(const Fun& g, const PolyhedralNorm& N) {
  double dn = dual_norm(g, N);
  if (dn <= 1e-12) throw EmptySelection("selection: degenerate functional");
  return (1.0 / dn) * g;
}

}  // namespace

Fun select_from_ball(const TacticBall& ball, SelectionMode mode,
                     std::uint64_t seed, const PolyhedralNorm& N) {
  if (mode == SelectionMode::CenterNormalized) return normalize(ball.center, N);
  // seeded perturbation inside the ball, then rescaled to the sphere
  std::mt19937_64 rng(seed);
  auto unit = [&rng]() { return (double)(rng() >> 11) * 0x1.0p-53; };
  Fun u = Fun::zero(ball.center.dim());
  double dn = 0.0;
  for (int tries = 0; tries < 64 && dn <= 1e-12; ++tries) {
    for (int i = 0; i < u.dim(); ++i) u[i] = 2.0 * unit() - 1.0;
    dn = dual_norm(u, N);
  }
  if (dn <= 1e-12) throw EmptySelection("selection: degenerate perturbation");
  Fun g = ball.center + (0.999 * ball.radius / dn) * u;
  return normalize(g, N);
}

double tau_2d(const Fun& t) {
  if (t.dim() != 2) throw BadOrientation("tau_2d: functional is not planar");
  if (t[1] <= 1e-12)
    throw BadOrientation("tau_2d: second coordinate must be positive");
  return -t[0] / t[1];
}

TacticEngine::TacticEngine(TacticConfig c)
    : cfg(std::move(c)),
      store_(cfg.sys.with_epsilon(cfg.sys.epsilon / 2.0), cfg.schedule,
             cfg.max_slices) {
  cfg.sys.validate();
  if (cfg.depth < 0 || cfg.depth > cfg.schedule.depth())
    throw ConfigError("tactic: depth K outside the eta schedule");
}

int TacticEngine::band_of(const Vec& x) const {
  return band_index(store_.sys, x);
}

Fun TacticEngine::eta_tactic(const Vec& x) {
  std::vector<int> path = store_.locate(x, 0);
  const SliceNode& node = store_.node_at(band_of(x), path);
  return normalize(node.f_slice, store_.sys.N);
}

TacticBall TacticEngine::tactic_ball(const Vec& x, int k) {
  std::vector<int> path = store_.locate(x, k);
  const SliceNode& node = store_.node_at(band_of(x), path);
  TacticBall ball;
  ball.center = node.f_slice;
  ball.radius =
      std::min(guard_radius(node, x, store_.sys.N), node.r_budget);
  ball.level = k;
  ball.witness = normalize(node.f_slice, store_.sys.N);
  if (!(ball.radius > 0.0))
    throw EmptySelection("tactic_ball: collapsed radius");
  return ball;
}

Fun TacticEngine::limit_tactic(const Vec& x) {
  return tactic_ball(x, cfg.depth).witness;
}

}  // namespace dentgame
