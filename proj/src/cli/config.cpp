#include <json.hpp>

#include <fstream>
#include <sstream>

#include "kgt/cli.hpp"
#include "kgt/errors.hpp"
#include "report.hpp"

namespace kgt::cli {

namespace {

using nlohmann::json;

int line_of(std::string_view text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

template <class T>
T field(const json& j, const char* name, T fallback) {
  auto it = j.find(name);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("field '") + name + "' has the wrong type");
  }
}

const std::set<std::string>& known_fields() {
  static const std::set<std::string> k{"c", "V", "eps", "sigma", "r", "N_max", "D_max", "gamma", "steps", "seed"};
  return k;
}

}  // namespace

RunConfig parse_config_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("line " + std::to_string(line_of(text, e.byte > 0 ? e.byte - 1 : 0)) + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError("line 1: configuration must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known_fields().count(key)) throw ParseError("unknown field '" + key + "'");
  if (!j.contains("c")) throw ParseError("missing field 'c'");
  if (!j.contains("eps")) throw ParseError("missing field 'eps'");

  RunConfig cfg;
  ModelParams& p = cfg.model;
  p.c = field<double>(j, "c", 1.0);
  p.eps = field<double>(j, "eps", 0.0);
  p.sigma = field<double>(j, "sigma", 3.0);
  p.r = field<double>(j, "r", 1.5);
  p.n_max = field<int>(j, "N_max", 4);
  p.d_max = field<int>(j, "D_max", 8);
  cfg.gamma = field<double>(j, "gamma", 1e-3);
  cfg.steps = field<int>(j, "steps", 3);
  cfg.seed = field<std::uint64_t>(j, "seed", 0);
  p.meta().validate();

  auto v = j.find("V");
  if (v == j.end()) {
    cfg.v_source = "seed";
    cfg.v_seed = cfg.seed;
  } else if (v->is_array()) {
    cfg.v_source = "explicit";
    std::vector<double> vals;
    try {
      vals = v->get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ParseError("field 'V' must be an array of numbers");
    }
    if (vals.size() != static_cast<std::size_t>(2 * p.n_max + 1))
      throw ValidationError("V must have 2*N_max+1 = " + std::to_string(2 * p.n_max + 1) + " entries, got " +
                            std::to_string(vals.size()));
    p.V = ModeVector<double>(p.n_max);
    p.V.data() = vals;
  } else if (v->is_object()) {
    if (!v->contains("seed") || v->size() != 1) throw ParseError("field 'V' object must be {\"seed\": K}");
    cfg.v_source = "seed";
    cfg.v_seed = field<std::uint64_t>(*v, "seed", 0);
  } else {
    throw ParseError("field 'V' must be an array or {\"seed\": K}");
  }
  if (cfg.v_source == "seed") p.V = draw_potential(p.n_max, cfg.v_seed);

  p.validate();
  if (!(cfg.gamma > 0.0)) throw ValidationError("gamma must be positive");
  if (cfg.steps < 1) throw ValidationError("steps must be at least 1");
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_json(const RunConfig& cfg) { return config_object(cfg).dump(2); }

nlohmann::json config_object(const RunConfig& cfg) {
  const ModelParams& p = cfg.model;
  json j;
  j["c"] = p.c;
  j["V"] = p.V.data();
  j["V_source"] = cfg.v_source;
  if (cfg.v_source == "seed") j["V_seed"] = cfg.v_seed;
  j["eps"] = p.eps;
  j["sigma"] = p.sigma;
  j["r"] = p.r;
  j["N_max"] = p.n_max;
  j["D_max"] = p.d_max;
  j["gamma"] = cfg.gamma;
  j["steps"] = cfg.steps;
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace kgt::cli
