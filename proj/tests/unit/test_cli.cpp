#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nodalcover/cli.hpp"
#include "nodalcover/error.hpp"

using namespace nodalcover;
using io::Json;

namespace {

struct Result {
  int code;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Scratch {
  std::filesystem::path dir;
  explicit Scratch(const std::string& name) : dir(std::filesystem::temp_directory_path() / ("nodalcover_cli_" + name)) {
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
  }
  std::string operator/(const std::string& file) const { return (dir / file).string(); }
};

}  // namespace

TEST_CASE("config defaults, overrides and validation") {
  RunConfig cfg;
  apply_config(cfg, Json{{"solver", {{"m", 9}, {"seed", 11}}}, {"margins", {{"count", 1e-6}}}, {"kind", "cotangent"}});
  CHECK(cfg.m == 9);
  CHECK(cfg.seed == 11);
  CHECK(cfg.margin == 1e-6);
  CHECK(cfg.tol == 1e-10);
  CHECK(cfg.kind == "cotangent");
  validate(cfg);
  RunConfig back;
  apply_config(back, to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));

  RunConfig bad;
  bad.margin = 0;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = RunConfig{};
  bad.kind = "hodge";
  CHECK_THROWS_AS(validate(bad), Error);
  CHECK_THROWS_AS(apply_config(bad, Json{{"solver", {{"m", "many"}}}}), Error);
}

TEST_CASE("cycle example end to end") {
  Scratch s("cycle");
  REQUIRE(run({"surface", "make", "--kind", "cycle", "--params", "12", "-o", s / "c12.json"}).code == kExitOk);
  auto info = run({"surface", "info", "--input", s / "c12.json"});
  REQUIRE(info.code == kExitOk);
  CHECK(info.json()["vertices"] == 12);
  CHECK(info.json()["h1"]["rank"] == 1);
  CHECK(info.json()["meta"]["schema_version"] == io::kSchemaVersion);

  auto plan = run({"nodal", "plan", "--input", s / "c12.json", "--eigen", "1", "--domain", "0", "--degree", "2", "-o", s / "plan.json"});
  REQUIRE(plan.code == kExitOk);
  auto pj = io::read_json_file(s / "plan.json");
  CHECK(pj["cover"]["base"] == "c12.json");
  CHECK(pj["base_open"] == 1);

  auto verdict = run({"stab", "verdict", "--cover", s / "plan.json", "--target", "lambda1"});
  REQUIRE(verdict.code == kExitOk);
  auto v = verdict.json();
  CHECK(v["verdict"] == "strictly-unstable");
  CHECK(v["base"]["open"] == 1);
  CHECK(v["cover"]["open"] == 3);

  auto lifting = run({"stab", "numberg", "--cover", s / "plan.json", "--eigen", "1"});
  REQUIRE(lifting.code == kExitOk);
  CHECK(lifting.json()["test_space_dimension"] == 3);

  auto built = run({"cover", "build", "--cover", s / "plan.json"});
  CHECK(built.json()["complex"]["vertices"] == 24);
  CHECK(built.json()["connected"] == true);

  auto comps = run({"cover", "components", "--cover", s / "plan.json", "--vertices", "0,1,2,3"});
  CHECK(comps.code == kExitOk);
  CHECK(comps.json()["count"] == 2);
  CHECK(comps.json()["orbit_count"] == 2);
}

TEST_CASE("outputs are byte-identical across runs") {
  Scratch s("determinism");
  run({"surface", "make", "--kind", "grid_torus", "--params", "6,6", "-o", s / "t.json"});
  for (auto args : std::vector<std::vector<std::string>>{
           {"spec", "compute", "--input", s / "t.json", "--m", "8"},
           {"nodal", "analyze", "--input", s / "t.json", "--eigen", "1"},
           {"stab", "respec", "--random", "6", "--jobs", "3", "--format", "csv"}}) {
    auto a = run(args), b = run(args);
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
  }
  auto a = run({"spec", "compute", "--input", s / "t.json", "--seed", "1"});
  auto b = run({"spec", "compute", "--input", s / "t.json", "--seed", "2"});
  CHECK(a.json()["meta"]["config_hash"] != b.json()["meta"]["config_hash"]);
}

TEST_CASE("config file and explicit flags") {
  Scratch s("config");
  run({"surface", "make", "--kind", "cycle", "--params", "10", "-o", s / "c.json"});
  io::write_text_file(s / "cfg.json", R"({"solver": {"m": 3}})");
  auto from_file = run({"--config", s / "cfg.json", "spec", "compute", "--input", s / "c.json"});
  CHECK(from_file.json()["spectrum"]["values"].size() == 3);
  auto flag_wins = run({"--config", s / "cfg.json", "spec", "compute", "--input", s / "c.json", "--m", "5"});
  CHECK(flag_wins.json()["spectrum"]["values"].size() == 5);
  io::write_text_file(s / "bad.json", R"({"margins": {"count": -1}})");
  CHECK(run({"--config", s / "bad.json", "spec", "compute", "--input", s / "c.json"}).code == kExitUsage);
}

TEST_CASE("csv artifacts carry a metadata header") {
  Scratch s("csv");
  run({"surface", "make", "--kind", "cycle", "--params", "3", "-o", s / "c3.json"});
  auto tower = run({"stab", "tower", "--input", s / "c3.json", "--cut", "0", "--height", "4", "--index", "1", "--roof", "1",
                    "--format", "csv"});
  CHECK(tower.code == kExitOk);
  CHECK(tower.out.rfind("# schema_version=1 seed=7 config_hash=", 0) == 0);
  CHECK(tower.out.find("level,degree,vertices,value\n") != std::string::npos);
  auto count = run({"stab", "count", "--index", "3", "--free", "2", "--format", "csv"});
  CHECK(count.code == kExitOk);
  CHECK(count.out.find("name,claimed,observed,holds,tight") != std::string::npos);
  CHECK(run({"surface", "info", "--input", s / "c3.json", "--format", "csv"}).code == kExitUsage);
}

TEST_CASE("group commands") {
  auto e = run({"group", "enum", "--index", "3", "--free", "2"});
  REQUIRE(e.code == kExitOk);
  CHECK(e.json()["count"] == 13);
  CHECK(run({"group", "enum", "--index", "2", "--surface", "2"}).json()["count"] == 15);
  CHECK(run({"group", "enum", "--index", "2", "--surface", "2", "--free", "2"}).code == kExitUsage);
  auto mu = run({"group", "mu", "--orders", "2,2,3"});
  CHECK(mu.json()["mu"] == 2);
  CHECK(mu.json()["min_generators_coset"] == 2);

  Scratch s("group");
  io::write_text_file(s / "action.json", R"({"degree": 4, "perms": [[1, 0, 3, 2], [2, 3, 0, 1]]})");
  io::write_text_file(s / "words.json", R"([[1]])");
  auto orb = run({"group", "orbits", "--action", s / "action.json", "--words", s / "words.json"});
  CHECK(orb.code == kExitOk);
  CHECK(orb.json()["count"] == 2);
  CHECK(orb.json()["bound"]["holds"] == true);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"bogus"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"surface", "info", "--input", "/nonexistent.json"}).code == kExitUsage);
  CHECK(run({"surface", "make", "--kind", "sphere", "--params", "1"}).code == kExitUsage);

  Scratch s("exit");
  run({"surface", "make", "--kind", "cycle", "--params", "12", "-o", s / "c12.json"});
  run({"nodal", "plan", "--input", s / "c12.json", "--eigen", "1", "-o", s / "plan.json"});
  // A margin this wide leaves the cover's eigenvalue near 0.068 inside the ambiguity band.
  auto amb = run({"stab", "verdict", "--cover", s / "plan.json", "--interval", "0,0.05", "--margin", "0.01"});
  CHECK(amb.code == kExitAmbiguous);
}

TEST_CASE("run executes job files in parallel") {
  Scratch s("jobs");
  run({"surface", "make", "--kind", "cycle", "--params", "8", "-o", s / "c8.json"});
  std::vector<std::string> args{"run", "--jobs", "2"};
  for (int m = 2; m <= 5; ++m) {
    std::string job = s / ("job" + std::to_string(m) + ".json");
    io::write_text_file(job, Json{{"args", {"spec", "compute", "--input", s / "c8.json", "--m", std::to_string(m)}},
                                  {"output", s / ("out" + std::to_string(m) + ".json")}}
                                 .dump());
    args.push_back(job);
  }
  io::write_text_file(s / "broken.json", R"({"args": ["bogus"]})");
  args.push_back(s / "broken.json");
  auto r = run(args);
  CHECK(r.code == kExitUsage);
  auto j = r.json();
  REQUIRE(j["jobs"].size() == 5);
  for (int i = 0; i < 4; ++i) CHECK(j["jobs"][i]["exit"] == 0);
  CHECK(j["jobs"][4]["exit"] == kExitUsage);
  for (int m = 2; m <= 5; ++m) {
    auto out = Json::parse(slurp(s / ("out" + std::to_string(m) + ".json")));
    CHECK(out["spectrum"]["values"].size() == static_cast<std::size_t>(m));
  }
}
