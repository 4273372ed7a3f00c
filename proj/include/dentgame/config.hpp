#pragma once
#include <string>

#include "dentgame/io.hpp"

namespace dentgame {

struct ExperimentConfig {
  ConeSystem sys;
  EtaSchedule schedule;
  int depth = 0;  // K
  Adversary adversary;
  Vec x0;
  int max_steps = 500;
  int max_slices = 10000;
  json raw;  // normalized snapshot for artifact reproducibility
};

// Parses and validates the experiment schema; error messages carry
// JSON-pointer-style paths (throws ConfigError).
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);

TacticConfig tactic_config(const ExperimentConfig& cfg);

}  // namespace dentgame
