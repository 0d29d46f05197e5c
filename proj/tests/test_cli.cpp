#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "windtree/cli.hpp"

using namespace windtree;
using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("windtree_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string out_path(const std::string& name) { return (scratch_dir() / name).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Json> records(const std::string& path) {
  std::vector<Json> out;
  std::istringstream in(slurp(path));
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(Json::parse(line));
  return out;
}

struct Run {
  int code;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream err;
  auto* old = std::cerr.rdbuf(err.rdbuf());
  const int code = run_cli(args);
  std::cerr.rdbuf(old);
  return {code, err.str()};
}

std::vector<std::string> csv_column(const std::string& text, std::size_t col) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    for (std::size_t k = 0; k <= col; ++k) std::getline(row, cell, ',');
    out.push_back(cell);
  }
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate: trapped orbit bounces between two obstacles") {
    const std::string out = out_path("trap.csv");
    const auto r = run({"simulate", "--preset", "wind-tree", "--start", "1/2,0,1,0", "--budget-collisions", "6",
                        "--engine", "exact", "--out", out});
    REQUIRE(r.code == 0);
    const std::string text = slurp(out);
    CHECK(text.rfind("time,x,y,dx,dy,kind,site\n", 0) == 0);
    const auto xs = csv_column(text, 1);
    REQUIRE(xs.size() >= 6);
    for (std::size_t k = 1; k < xs.size(); ++k) CHECK(std::stod(xs[k]) == (k % 2 ? 0.75 : 0.25));

    const Json m = Json::parse(slurp(out + ".manifest.json"));
    CHECK(m["command"] == "simulate");
    CHECK(m["exit_code"] == 0);
    CHECK(m["config"]["generator"]["kind"] == "constant");
  }

  TEST_CASE("identical invocations write identical files") {
    const std::string a = out_path("rec_a.jsonl"), b = out_path("rec_b.jsonl");
    for (const auto& out : {a, b})
      REQUIRE(run({"recurrence", "--preset", "wind-tree", "--N", "2", "--M", "4,8", "--n", "300", "--seed", "5",
                   "--out", out})
                  .code == 0);
    CHECK(slurp(a) == slurp(b));
    const auto recs = records(a);
    REQUIRE(recs.size() == 2);
    for (const auto& rec : recs) {
      CHECK(rec["seed"] == 5);
      CHECK(rec["ci_low"].get<double>() <= rec["point"].get<double>());
      CHECK(rec["point"].get<double>() <= rec["ci_high"].get<double>());
      CHECK(rec["n"] == 300);
    }
  }

  TEST_CASE("configuration errors name the offending field") {
    const std::string cfg = out_path("bad.json");
    std::ofstream(cfg) << R"({"lattice": "square",
      "generator": {"kind": "constant", "obstacle": {"type": "rect", "a": "1/0", "b": "1/2"}}})";
    const auto r = run({"recurrence", "--config", cfg, "--N", "2", "--M", "4", "--n", "10", "--out",
                        out_path("bad.jsonl")});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("config.generator.obstacle.a") != std::string::npos);

    const auto missing = run({"recurrence", "--preset", "no-such-table", "--N", "2", "--M", "4", "--out",
                              out_path("none.jsonl")});
    CHECK(missing.code == kExitConfig);
    CHECK(missing.err.find("no-such-table") != std::string::npos);

    CHECK(run({"recurrence", "--preset", "wind-tree", "--N", "2", "--out", out_path("x.jsonl")}).code == kExitConfig);
    CHECK(run({"bogus"}).code == kExitConfig);
  }

  TEST_CASE("recurrence on the empty table never returns") {
    const std::string out = out_path("empty.jsonl");
    REQUIRE(run({"recurrence", "--preset", "empty", "--N", "2", "--M", "4,8", "--n", "200", "--out", out}).code == 0);
    for (const auto& rec : records(out)) {
      CHECK(rec["point"] == 0.0);
      CHECK(rec["returned"] == 0);
      CHECK(rec["escaped"] == 200);
    }
  }

  TEST_CASE("annulus: rejected obstacles and epsilon range") {
    CHECK(run({"annulus", "--e", "2/3,1/2", "--out", out_path("ann.json")}).code == kExitConfig);
    CHECK(run({"annulus", "--epsilon", "0", "--out", out_path("ann.json")}).code == kExitConfig);
    CHECK(run({"annulus", "--epsilon", "1", "--out", out_path("ann.json")}).code == kExitConfig);
    const auto r = run({"annulus", "--e", "1/2,1/2", "--N", "1", "--epsilon", "0.5", "--n", "400", "--out",
                        out_path("ann.json")});
    CHECK(r.code == 0);
    const Json rec = records(out_path("ann.json")).front();
    CHECK(rec["certified"] == true);
    CHECK(rec["N1"].get<std::int64_t>() >= 2);
    CHECK(rec["certificate"]["point"].get<double>() >= 0.5);
  }

  TEST_CASE("periodic orbit and square tiling check") {
    const std::string out = out_path("orbit.jsonl");
    REQUIRE(run({"periodic", "orbit", "--preset", "wind-tree", "--start", "1/2,0,1,0", "--out", out}).code == 0);
    const Json rec = records(out).front();
    CHECK(rec["status"] == "periodic");
    CHECK(rec["period_length"] == 1.0);

    const auto r = run({"periodic", "direction", "--config-inline",
                        R"({"lattice":"square","generator":{"kind":"constant","obstacle":{"type":"rect","a":"1/3","b":"1/2"}}})",
                        "--slope", "1/1", "--out", out});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("square tiled") != std::string::npos);
    CHECK(run({"periodic", "orbit", "--preset", "lorentz-triangular", "--start", "0,0,1,0", "--out", out}).code ==
          kExitConfig);
  }

  TEST_CASE("lorentz horizon output") {
    const std::string out = out_path("horizon.jsonl");
    REQUIRE(run({"lorentz", "horizon", "--preset", "lorentz-triangular", "--lines", "100", "--probe-len", "50,200",
                 "--out", out})
                .code == 0);
    const auto recs = records(out);
    REQUIRE(recs.size() == 3);
    CHECK(recs.back()["stable_max_gap"] == true);
    CHECK(run({"lorentz", "horizon", "--preset", "lorentz-triangular", "--engine", "exact", "--out", out}).code ==
          kExitConfig);
  }

  TEST_CASE("replay reproduces the output and environment options are recorded") {
    const std::string out = out_path("env.jsonl");
    ::setenv("WINDTREE_SEED", "77", 1);
    const auto r = run({"recurrence", "--preset", "random-wind-tree", "--N", "2", "--M", "6", "--n", "300",
                        "--threads", "2", "--out", out});
    ::unsetenv("WINDTREE_SEED");
    REQUIRE(r.code == 0);
    const Json m = Json::parse(slurp(out + ".manifest.json"));
    CHECK(m["seed"] == 77);
    CHECK(records(out).front()["seed"] == 77);

    const std::string again = out_path("env_replay.jsonl");
    REQUIRE(run({"replay", out + ".manifest.json", "--out", again, "--threads", "1"}).code == 0);
    CHECK(slurp(again) == slurp(out));
    CHECK(Json::parse(slurp(again + ".manifest.json"))["seed"] == 77);
  }
}
