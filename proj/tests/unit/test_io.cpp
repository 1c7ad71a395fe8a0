#include <filesystem>

#include "../support/instances.hpp"
#include "doctest.h"
#include "nodalcover/error.hpp"
#include "nodalcover/io.hpp"

using namespace nodalcover;
using namespace testing_support;
using io::Json;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("nodalcover_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

bool same_complex(const SurfaceComplex& a, const SurfaceComplex& b) {
  if (a.vertex_count != b.vertex_count || a.edge_count() != b.edge_count() || a.faces != b.faces) return false;
  for (int e = 0; e < a.edge_count(); ++e)
    if (a.edges[e].u != b.edges[e].u || a.edges[e].v != b.edges[e].v || a.edges[e].weight != b.edges[e].weight) return false;
  return a.mass == b.mass && a.infinity_edges == b.infinity_edges && a.orientation == b.orientation;
}

}  // namespace

TEST_CASE("complexes round trip through json") {
  for (auto [kind, params] : std::vector<std::pair<PresetKind, std::vector<int>>>{
           {PresetKind::kCycle, {7}}, {PresetKind::kGridTorus, {4, 3}}, {PresetKind::kGenusPolygon, {2, 3}},
           {PresetKind::kAnnulus, {6, 3, 1}}, {PresetKind::kMoebius, {6, 3}}, {PresetKind::kPath, {5}}}) {
    auto c = build_preset(kind, params);
    Json j = io::to_json(c);
    auto back = io::complex_from_json(j);
    CHECK(same_complex(c, back));
    CHECK(io::to_json(back).dump() == j.dump());
    CHECK(same_complex(io::complex_from_json(Json{{"complex", j}}), c));
  }
}

TEST_CASE("malformed complexes are rejected") {
  auto j = io::to_json(build_preset(PresetKind::kCycle, std::vector<int>{5}));
  auto bad = j;
  bad["edges"][0][1] = 99;
  CHECK_THROWS_AS(io::complex_from_json(bad), Error);
  bad = j;
  bad.erase("edges");
  CHECK_THROWS_AS(io::complex_from_json(bad), Error);
  bad = j;
  bad["mass"] = Json::array({1.0});
  CHECK_THROWS_AS(io::complex_from_json(bad), Error);
  auto missing_mass = j;
  missing_mass.erase("mass");
  CHECK(io::complex_from_json(missing_mass).mass == std::vector<double>(5, 1.0));
}

TEST_CASE("covers load with relative and embedded bases") {
  auto dir = scratch_dir("cover");
  auto base = build_preset(PresetKind::kGridTorus, std::vector<int>{3, 3});
  auto spec = cyclic_spec_from_cochain(base, canonical_spanning_tree(base), torus_x_cocycle(3, 3), 3);

  std::filesystem::create_directories(dir / "sub");
  io::write_text_file(dir / "base.json", io::to_json(base).dump());
  io::write_text_file(dir / "sub" / "cover.json", io::to_json(spec, "../base.json").dump());
  auto a = io::load_cover(dir / "sub" / "cover.json");
  CHECK(a.spec.voltages == spec.voltages);
  CHECK(a.spec.tree == spec.tree);
  CHECK(a.cover.total.vertex_count == 27);

  io::write_text_file(dir / "embedded.json", Json{{"cover", io::to_json(spec, io::to_json(base))}}.dump());
  auto b = io::load_cover(dir / "embedded.json");
  CHECK(same_complex(a.cover.total, b.cover.total));

  auto no_tree = io::to_json(spec, io::to_json(base));
  no_tree.erase("tree");
  CHECK(io::cover_spec_from_json(no_tree, base).voltages == spec.voltages);

  auto bad = io::to_json(spec, io::to_json(base));
  bad["voltages"]["x"] = Json::array({0, 1, 2});
  CHECK_THROWS_AS(io::cover_spec_from_json(bad, base), Error);
  bad = io::to_json(spec, io::to_json(base));
  bad["voltages"][bad["voltages"].begin().key()] = Json::array({0, 0, 2});
  CHECK_THROWS_AS(io::cover_spec_from_json(bad, base), Error);
  CHECK_THROWS_AS(io::load_cover(dir / "missing.json"), Error);
}

TEST_CASE("group objects round trip") {
  auto p = surface_group(2);
  auto q = io::presentation_from_json(io::to_json(p));
  CHECK(q.rank == p.rank);
  CHECK(q.relators == p.relators);
  auto actions = enumerate_index_n(free_group(2), 3);
  for (const auto& a : actions) {
    auto b = io::action_from_json(io::to_json(a));
    CHECK(b.perms == a.perms);
  }
  std::vector<Word> words{{1, -2}, {2, 2, 1}};
  CHECK(io::words_from_json(io::words_to_json(words)) == words);
  CHECK_THROWS_AS(io::action_from_json(Json{{"degree", 2}, {"perms", {{0, 0}}}}), Error);
}

TEST_CASE("spectrum and operator exports") {
  auto c = build_preset(PresetKind::kCycle, std::vector<int>{6});
  auto op = assemble(c);
  auto s = dense_eigenpairs(op, SolverOptions{.count = 6});
  auto csv = io::spectrum_csv(s);
  CHECK(csv.rfind("index,eigenvalue,cluster,residual\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  auto j = io::to_json(s, true);
  CHECK(j["values"].size() == 6);
  CHECK(j["vectors"].size() == 6);
  CHECK(io::to_json(s).contains("vectors") == false);

  auto triplets = io::operator_triplets(op);
  CHECK(triplets.find("# stiffness\n6 6 18\n") == 0);
  CHECK(triplets.find("# mass\n6 6 6\n") != std::string::npos);
}

TEST_CASE("hashing is stable") {
  CHECK(io::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(io::hex64(io::fnv1a("a")) == "af63dc4c8601ec8c");
}
