#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "kgt/cli.hpp"
#include "kgt/errors.hpp"

using namespace kgt;
using namespace kgt::cli;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "kgt");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = "kgt_test_" + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("config defaults") {
  RunConfig cfg = parse_config_text(R"({"c": 1.0, "eps": 1e-6})");
  CHECK(cfg.model.sigma == 3.0);
  CHECK(cfg.model.r == 1.5);
  CHECK(cfg.model.n_max == 4);
  CHECK(cfg.model.d_max == 8);
  CHECK(cfg.gamma == 1e-3);
  CHECK(cfg.steps == 3);
  CHECK(cfg.v_source == "seed");
  CHECK(cfg.model.V == draw_potential(4, 0));
}

TEST_CASE("config potential forms") {
  RunConfig a = parse_config_text(R"({"c": 2, "eps": 0, "N_max": 1, "V": [0.1, 0.2, 0.3]})");
  CHECK(a.v_source == "explicit");
  CHECK(a.model.V[1] == 0.3);
  RunConfig b = parse_config_text(R"({"c": 1, "eps": 0, "N_max": 2, "V": {"seed": 9}})");
  CHECK(b.model.V == draw_potential(2, 9));
  auto j = nlohmann::json::parse(config_json(b));
  CHECK(j["V"].size() == 5);
  CHECK(j["V_seed"] == 9);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config_text(R"({"eps": 1e-6})"), ParseError);
  CHECK_THROWS_AS(parse_config_text(R"({"c": 1, "eps": 0, "nmax": 3})"), ParseError);
  CHECK_THROWS_AS(parse_config_text(R"({"c": 1, "eps": 0, "N_max": 1, "V": [0.1]})"), ValidationError);
  CHECK_THROWS_AS(parse_config_text(R"({"c": 1, "eps": 0, "gamma": -1})"), ValidationError);
  CHECK_THROWS_AS(parse_config_text(R"({"c": "one", "eps": 0})"), ParseError);
  try {
    parse_config_text("{\"c\": 1,\n\"eps\": }");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("exit codes") {
  std::string cfg = write_temp("cfg.json", R"({"c": 1, "eps": 1e-6, "N_max": 2, "D_max": 6, "steps": 1})");
  std::string bad = write_temp("bad.json", R"({"c": 1})");
  CHECK(run({"build", "--config", cfg, "--out", "kgt_test_h.txt"}) == 0);
  CHECK(run({"norm", "--in", "kgt_test_h.txt", "--rho", "0.01"}) == 0);
  CHECK(run({"kam-run", "--config", cfg, "--out", "kgt_test_rep.json"}) == 0);
  std::ifstream in("kgt_test_rep.json");
  auto rep = nlohmann::json::parse(in);
  CHECK(rep["status"] == "ok");
  CHECK(rep["config"]["N_max"] == 2);
  CHECK(run({"build", "--config", bad}) == 1);
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({"build"}) == 2);
  for (const char* f : {"cfg.json", "bad.json", "h.txt", "rep.json"}) std::remove((std::string("kgt_test_") + f).c_str());
}
