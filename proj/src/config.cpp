#include "dentgame/config.hpp"

#include <fstream>

namespace dentgame {

namespace {

const json& need(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(path + "/" + key + ": missing");
  return j.at(key);
}

double need_num(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_number()) throw ConfigError(path + "/" + key + ": expected number");
  return v.get<double>();
}

int need_int(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_number_integer())
    throw ConfigError(path + "/" + key + ": expected integer");
  return v.get<int>();
}

std::vector<double> need_vec(const json& j, const char* key,
                             const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_array()) throw ConfigError(path + "/" + key + ": expected array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number())
      throw ConfigError(path + "/" + key + ": expected numeric array");
    out.push_back(e.get<double>());
  }
  return out;
}

PolyhedralNorm parse_norm(const json& j, int d, const std::string& path) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "l1") return PolyhedralNorm::l1(d);
    if (s == "linf") return PolyhedralNorm::linf(d);
    throw ConfigError(path + ": unknown norm preset '" + s + "'");
  }
  if (!j.is_object()) throw ConfigError(path + ": expected preset or object");
  PolyhedralNorm N;
  for (const auto& v : need(j, "primal", path)) N.primal.push_back(vec_from_json(v));
  for (const auto& g : need(j, "dual", path)) N.dual.push_back(fun_from_json(g));
  return N;
}

AdversaryKind parse_kind(const std::string& s, const std::string& path) {
  if (s == "random_feasible") return AdversaryKind::RandomFeasible;
  if (s == "max_escape") return AdversaryKind::MaxEscape;
  if (s == "band_descent") return AdversaryKind::BandDescent;
  if (s == "constant_drift") return AdversaryKind::ConstantDrift;
  throw ConfigError(path + "/kind: unknown adversary '" + s + "'");
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  const json& sys = need(j, "sys", "");
  cfg.sys.d = need_int(sys, "d", "/sys");
  if (cfg.sys.d < 1 || cfg.sys.d > 3)
    throw ConfigError("/sys/d: must be 1, 2 or 3");
  cfg.sys.N = parse_norm(need(sys, "norm", "/sys"), cfg.sys.d, "/sys/norm");
  cfg.sys.f = Fun(need_vec(sys, "f", "/sys"));
  cfg.sys.epsilon = need_num(sys, "epsilon", "/sys");
  cfg.sys.validate();

  const json& sched = need(j, "schedule", "");
  cfg.schedule.eta = need_vec(sched, "eta", "/schedule");
  cfg.depth = need_int(sched, "K", "/schedule");
  cfg.schedule.validate();
  if (cfg.depth < 0 || cfg.depth > cfg.schedule.depth())
    throw ConfigError("/schedule/K: outside the eta list");

  const json& adv = need(j, "adversary", "");
  const json& kindv = need(adv, "kind", "/adversary");
  if (!kindv.is_string()) throw ConfigError("/adversary/kind: expected string");
  cfg.adversary.kind = parse_kind(kindv.get<std::string>(), "/adversary");
  cfg.adversary.seed = (std::uint64_t)need_int(adv, "seed", "/adversary");
  cfg.adversary.rho = need_num(adv, "rho", "/adversary");
  cfg.adversary.m = need_num(adv, "m", "/adversary");
  if (!(cfg.adversary.rho > 0)) throw ConfigError("/adversary/rho: must be > 0");

  cfg.x0 = Vec(need_vec(j, "x0", ""));
  if (cfg.x0.dim() != cfg.sys.d)
    throw ConfigError("/x0: dimension mismatch with /sys/d");
  cfg.max_steps = need_int(j, "max_steps", "");
  if (cfg.max_steps < 1) throw ConfigError("/max_steps: must be >= 1");
  cfg.max_slices = need_int(j, "max_slices", "");
  if (cfg.max_slices < 1) throw ConfigError("/max_slices: must be >= 1");
  cfg.raw = j;
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return parse_config(j);
}

TacticConfig tactic_config(const ExperimentConfig& cfg) {
  TacticConfig tc;
  tc.sys = cfg.sys;
  tc.schedule = cfg.schedule;
  tc.depth = cfg.depth;
  tc.max_slices = cfg.max_slices;
  return tc;
}

}  // namespace dentgame
