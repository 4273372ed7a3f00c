#pragma once
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "dentgame/tactic.hpp"

namespace dentgame {

enum class AdversaryKind { RandomFeasible, MaxEscape, BandDescent, ConstantDrift };

struct Adversary {
  AdversaryKind kind = AdversaryKind::RandomFeasible;
  std::uint64_t seed = 0;
  double rho = 1.0;  // step bound in the system norm
  double m = 0.0;    // margin floor: f(x) - eps*||x|| >= m throughout
};

// Legality of the adversary's reply: evaluate(t, y - x) <= 1e-12.
bool legal_move(const Fun& t, const Vec& x, const Vec& y);

// One adversary move against tactic value t at position x.  Deterministic
// given the rng state; never proposes an illegal or margin-violating point
// (it returns y == x when stuck).
Vec adversary_step(const Adversary& adv, const Fun& t, const Vec& x,
                   const ConeSystem& sys, std::mt19937_64& rng);

struct MoveRecord {
  int n = 0;
  Vec x;
  Fun t;  // empty on the terminal record
  int band = 0;
  std::vector<int> rank_path;
  std::optional<double> tau;  // d == 2 only
  std::string note;
};

struct Transcript {
  std::vector<MoveRecord> moves;  // last record is the terminal position
  std::string termination;        // "max_steps" | "stationary"
  double eps = 0.0;               // game-system epsilon (for tooling)
};

// Referee'd run: tactic from `engine`, adversary moves checked with
// legal_move and the margin floor.  Throws IllegalMove on referee failure.
Transcript play(TacticEngine& engine, const Adversary& adv, const Vec& x0,
                int max_steps,
                SelectionMode mode = SelectionMode::CenterNormalized,
                std::uint64_t selection_seed = 0);

// Negative control: the constant tactic t = f, no partition store.
Transcript baseline_constant_tactic(const ConeSystem& sys, const Adversary& adv,
                                    const Vec& x0, int max_steps);

struct Diagnostics {
  std::optional<int> cauchy_step;  // first n0 with tail diameter < eta
  bool rank_monotone = true;       // (band desc, rank path lex nonincreasing)
  double tail_span = 0.0;          // diameter of the last 10% of positions
};

Diagnostics diagnostics(const Transcript& tr, double eta,
                        const PolyhedralNorm& N);

}  // namespace dentgame
