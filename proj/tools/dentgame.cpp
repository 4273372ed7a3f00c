#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dentgame/config.hpp"

using namespace dentgame;

namespace {

void write_out(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << data;
}

Vec parse_point(const std::string& s, int d) {
  std::vector<double> coords;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) coords.push_back(std::stod(tok));
  if ((int)coords.size() != d)
    throw ConfigError("point '" + s + "' has wrong dimension");
  return Vec(coords);
}

json query_point(TacticEngine& engine, const Vec& x) {
  TacticBall ball = engine.tactic_ball(x, engine.cfg.depth);
  std::vector<int> path = engine.locate(x, engine.cfg.depth);
  json j{{"x", x.c},
         {"band", engine.band_of(x)},
         {"rank_path", path},
         {"center", ball.center.a},
         {"radius", ball.radius},
         {"selection", ball.witness.a}};
  if (engine.cfg.sys.d == 2) j["tau"] = tau_2d(ball.witness);
  return j;
}

int run_verify(const ExperimentConfig& cfg) {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };
  const ConeSystem& sys = cfg.sys;
  // norm layer
  bool norm_ok = true;
  try {
    sys.N.validate();
  } catch (const Error&) {
    norm_ok = false;
  }
  check("norm consistency", norm_ok);
  std::mt19937_64 rng(12345);
  auto draw = [&]() { return (double)(rng() >> 11) * 0x1.0p-53 * 10.0 - 5.0; };
  bool holder = true;
  for (int i = 0; i < 200; ++i) {
    Vec x = Vec::zero(sys.d);
    Fun g = Fun::zero(sys.d);
    for (int k = 0; k < sys.d; ++k) {
      x[k] = draw();
      g[k] = draw();
    }
    if (evaluate(g, x) > dual_norm(g, sys.N) * norm(x, sys.N) + 1e-9)
      holder = false;
  }
  check("Holder inequality (sampled)", holder);
  // cone layer
  bool cone_ok = true;
  Polyhedron L1 = lambda_p(sys, 1);
  for (int i = 0; i < 200; ++i) {
    Vec x = Vec::zero(sys.d);
    for (int k = 0; k < sys.d; ++k) x[k] = draw();
    bool inside = margin(sys, x) >= 1.0 - 1e-9;
    if (inside != contains(L1, x, 1e-9)) cone_ok = false;
  }
  check("cone band membership (sampled)", cone_ok);
  // tactic layer on the configured start point
  try {
    TacticEngine engine(tactic_config(cfg));
    TacticBall prev = engine.tactic_ball(cfg.x0, 0);
    bool nested = true;
    for (int k = 1; k <= cfg.depth; ++k) {
      TacticBall ball = engine.tactic_ball(cfg.x0, k);
      double drift = dual_norm(ball.center - prev.center, sys.N);
      if (drift + ball.radius > prev.radius + 1e-12) nested = false;
      prev = ball;
    }
    check("tactic ball nesting at x0", nested);
    Fun t = engine.limit_tactic(cfg.x0);
    check("selection in B(f, eps)",
          dual_norm(t - sys.f, sys.N) < sys.epsilon + 1e-9);
    check("selection on the dual sphere",
          std::abs(dual_norm(t, sys.N) - 1.0) <= 1e-9);
  } catch (const PeelingBudgetExhausted&) {
    throw;
  } catch (const Error& e) {
    std::cout << "FAIL tactic layer: " << e.what() << "\n";
    ++failures;
  }
  // one short refereed game
  try {
    TacticEngine engine(tactic_config(cfg));
    Transcript tr = play(engine, cfg.adversary, cfg.x0,
                         std::min(cfg.max_steps, 50));
    Diagnostics d = diagnostics(tr, cfg.schedule.eta.back(), sys.N);
    check("short game referee", true);
    check("short game rank monotonicity", d.rank_monotone);
  } catch (const PeelingBudgetExhausted&) {
    throw;
  } catch (const Error& e) {
    std::cout << "FAIL short game: " << e.what() << "\n";
    ++failures;
  }
  std::cout << (failures == 0 ? "verify: all checks passed"
                              : "verify: checks failed")
            << "\n";
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"point-slice game toolkit"};
  app.require_subcommand(1);

  std::string cfg_path;
  std::string out_transcript, out_summary, out_csv, out_path;
  std::vector<std::string> points;
  int band = 0, level = 0;
  double window = 10.0;

  CLI::App* q = app.add_subcommand("query", "slice/tactic data for points");
  q->add_option("-c,--config", cfg_path)->required();
  q->add_option("-x,--point", points, "comma-separated coordinates");

  CLI::App* pl = app.add_subcommand("play", "run a refereed game");
  pl->add_option("-c,--config", cfg_path)->required();
  pl->add_option("--transcript", out_transcript);
  pl->add_option("--summary", out_summary);
  pl->add_option("--csv", out_csv);

  CLI::App* pt = app.add_subcommand("partition", "materialize and dump slices");
  pt->add_option("-c,--config", cfg_path)->required();
  pt->add_option("--band", band)->required();
  pt->add_option("--window", window);
  pt->add_option("--level", level);
  pt->add_option("-o,--out", out_path);

  CLI::App* vf = app.add_subcommand("verify", "invariant checks");
  vf->add_option("-c,--config", cfg_path)->required();

  CLI::App* bl = app.add_subcommand("baseline", "constant-tactic control run");
  bl->add_option("-c,--config", cfg_path)->required();
  bl->add_option("--transcript", out_transcript);
  bl->add_option("--summary", out_summary);

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = load_config(cfg_path);
    if (q->parsed()) {
      TacticEngine engine(tactic_config(cfg));
      if (points.empty()) points.push_back([&] {
        std::string s;
        for (int i = 0; i < cfg.x0.dim(); ++i)
          s += (i ? "," : "") + fmt_double(cfg.x0[i]);
        return s;
      }());
      for (const std::string& p : points)
        std::cout << query_point(engine, parse_point(p, cfg.sys.d)).dump()
                  << "\n";
    } else if (pl->parsed()) {
      TacticEngine engine(tactic_config(cfg));
      Transcript tr = play(engine, cfg.adversary, cfg.x0, cfg.max_steps);
      Diagnostics d = diagnostics(tr, cfg.schedule.eta.back(), cfg.sys.N);
      write_out(out_transcript, transcript_to_jsonl(tr));
      if (!out_summary.empty())
        write_out(out_summary, transcript_summary(tr, d).dump(2) + "\n");
      if (!out_csv.empty())
        write_out(out_csv, transcript_to_csv(tr, cfg.sys.N));
    } else if (pt->parsed()) {
      TacticEngine engine(tactic_config(cfg));
      // deterministic grid of in-band probes to materialize the partition
      const ConeSystem& isys = engine.internal_sys();
      double step = cfg.schedule.eta.back() / 2.0;
      for (double a = -window; a <= window + 1e-12; a += step)
        for (double b = -window; b <= window + 1e-12; b += step) {
          Vec x = cfg.sys.d == 1 ? Vec({a}) : cfg.sys.d == 2
                      ? Vec({a, b})
                      : Vec({a, b, 0.0});
          if (norm(x, cfg.sys.N) > window) continue;
          if (band_index(isys, x) != band) continue;
          try {
            engine.locate(x, level);
          } catch (const CutBoundary&) {
          }
          if (cfg.sys.d == 1) break;
        }
      write_out(out_path, partition_to_csv(engine.store()));
    } else if (vf->parsed()) {
      return run_verify(cfg);
    } else if (bl->parsed()) {
      Transcript tr = baseline_constant_tactic(cfg.sys, cfg.adversary, cfg.x0,
                                               cfg.max_steps);
      Diagnostics d = diagnostics(tr, cfg.schedule.eta.back(), cfg.sys.N);
      write_out(out_transcript, transcript_to_jsonl(tr));
      if (!out_summary.empty())
        write_out(out_summary, transcript_summary(tr, d).dump(2) + "\n");
    }
  } catch (const PeelingBudgetExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
