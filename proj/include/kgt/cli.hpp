#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "kgt/nlkg.hpp"

namespace kgt::cli {

struct RunConfig {
  ModelParams model;
  double gamma = 1e-3;
  int steps = 3;
  std::uint64_t seed = 0;
  // "explicit" when V was given as an array, otherwise drawn from v_seed
  std::string v_source = "seed";
  std::uint64_t v_seed = 0;
};

// Defaults: sigma=3, r=1.5, N_max=4, D_max=8, gamma=1e-3, steps=3, seed=0,
// V drawn from the seed.
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::string& path);
// Resolved configuration as a JSON object (V always explicit).
std::string config_json(const RunConfig& cfg);

int dispatch(int argc, char** argv);

}  // namespace kgt::cli
