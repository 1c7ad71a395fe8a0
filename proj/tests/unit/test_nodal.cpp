#include <cmath>
#include <numbers>

#include "../support/instances.hpp"
#include "doctest.h"
#include "nodalcover/error.hpp"
#include "nodalcover/nodal.hpp"

using namespace nodalcover;
using namespace testing_support;

namespace {

Spectrum low_spectrum(const SurfaceComplex& c, int m) {
  SolverOptions o;
  o.count = m;
  return lowest_eigenpairs(assemble(c), o);
}

Eigen::VectorXd first_mode(const SurfaceComplex& c, Spectrum& s) {
  int id = s.find_cluster(s.values[1]);
  return canonical_cluster_vector(s, id);
}

/// Some face meets `part` in two or more separate runs of corners.
bool meets_face_in_separate_corners(const SurfaceComplex& c, const std::vector<int>& part) {
  std::vector<bool> in(static_cast<std::size_t>(c.vertex_count), false);
  for (int v : part) in[static_cast<std::size_t>(v)] = true;
  for (int face = 0; face < c.face_count(); ++face) {
    auto f = face_boundary(c, face).vertices;
    int runs = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (in[static_cast<std::size_t>(f[i])] && !in[static_cast<std::size_t>(f[(i + f.size() - 1) % f.size()])]) ++runs;
    if (runs >= 2) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("cycle with a half-step cosine has two arcs") {
  auto c = preset(PresetKind::kCycle, {12});
  Eigen::VectorXd phi(12);
  for (int j = 0; j < 12; ++j) phi(j) = std::cos(2.0 * std::numbers::pi * (j + 0.5) / 12.0);
  auto d = nodal_decomposition(c, phi);
  REQUIRE(d.count() == 2);
  CHECK(d.domains[0].vertices.size() == 6);
  CHECK(d.domains[1].vertices.size() == 6);
  CHECK(d.domains[0].sign == -d.domains[1].sign);
  CHECK(d.zero_set.empty());
  CHECK_FALSE(d.single_sign);
  for (auto& dom : d.domains) {
    CHECK(dom.topology.chi == 1);
    CHECK(dom.topology.mu == 0);
  }
}

TEST_CASE("decomposition errors and degenerate vectors") {
  auto c = preset(PresetKind::kCycle, {8});
  CHECK_THROWS_AS(nodal_decomposition(c, Eigen::VectorXd::Zero(8)), Error);
  Eigen::VectorXd sparse = Eigen::VectorXd::Zero(8);
  sparse(0) = 1.0;
  sparse(4) = -1.0;
  try {
    nodal_decomposition(c, sparse);
    FAIL("expected zero-set error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kZeroSetTooLarge);
  }
  auto flat = nodal_decomposition(c, Eigen::VectorXd::Constant(8, 0.3));
  CHECK(flat.count() == 1);
  CHECK(flat.single_sign);
  CHECK_THROWS_AS(nodal_count_bound_data(c, flat), Error);
  CHECK_THROWS_AS(nodal_decomposition(c, Eigen::VectorXd::Ones(7)), Error);
}

TEST_CASE("zero vertices separate domains") {
  auto c = preset(PresetKind::kCycle, {8});
  Eigen::VectorXd phi(8);
  phi << 0.0, 1.0, 2.0, 1.0, 0.0, -1.0, -2.0, -1.0;
  auto d = nodal_decomposition(c, phi);
  CHECK(d.zero_set == std::vector<int>{0, 4});
  CHECK(d.count() == 2);
  CHECK(d.domain_of_vertex[0] == -1);
  CHECK(d.domain_of_vertex[2] != d.domain_of_vertex[6]);
}

TEST_CASE("canonical representative of the cycle's first cluster") {
  auto c = preset(PresetKind::kCycle, {12});
  auto s = low_spectrum(c, 3);
  auto phi = first_mode(c, s);
  // Optimum is a half-step phase: min |phi| = cos(5 pi / 12) / sqrt(6).
  CHECK(phi.cwiseAbs().minCoeff() == doctest::Approx(std::cos(5.0 * std::numbers::pi / 12.0) / std::sqrt(6.0)).epsilon(1e-6));
  auto d = nodal_decomposition(c, phi);
  REQUIRE(d.count() == 2);
  CHECK(d.domains[0].vertices.size() == 6);
  CHECK(canonical_cluster_vector(s, 1, 3).isApprox(canonical_cluster_vector(s, 1, 3)));
}

TEST_CASE("torus first eigenvector splits into two annular bands") {
  auto c = preset(PresetKind::kGridTorus, {12, 12});
  auto s = low_spectrum(c, 5);
  REQUIRE(s.cluster_members(1).size() == 4);
  auto d = nodal_decomposition(c, first_mode(c, s));
  REQUIRE(d.count() == 2);
  for (auto& dom : d.domains) {
    CHECK(dom.vertices.size() == 72);
    CHECK(dom.topology.orientable);
    CHECK(dom.topology.genus == 0);
    CHECK(dom.topology.doors == 2);
    CHECK(dom.topology.exits == 0);
    CHECK(dom.topology.mu == 1);
  }
  auto b = nodal_count_bound_data(c, d);
  CHECK(b.closed);
  CHECK(b.surface_generators == 2);
  CHECK(b.coset_generator_bound == 1.0);
  CHECK(b.best_chi == 0);
  CHECK(b.lower_holds);
  CHECK(b.upper_holds);
}

TEST_CASE("mu from the signature") {
  CHECK(mu_formula(0, 2, 0, true) == 1);
  CHECK(mu_formula(0, 1, 1, true) == 0);
  CHECK(mu_formula(1, 1, 1, false) == 1);
  CHECK(mu_formula(0, 1, 0, true) == 0);
  CHECK(mu_formula(2, 3, 2, true) == 7);
  CHECK_THROWS_AS(mu_formula(0, 0, 1, true), Error);
  CHECK_THROWS_AS(mu_formula(0, 1, 0, false), Error);
  // mu = -chi + [no exits] for every admissible signature.
  for (int g = 0; g < 4; ++g)
    for (int k = 1; k < 5; ++k)
      for (int l = 0; l < 4; ++l)
        for (bool o : {true, false}) {
          if (!o && g == 0) continue;
          int chi = 2 - (o ? 2 * g : g) - k - l;
          CHECK(mu_formula(g, k, l, o) == -chi + (l == 0 ? 1 : 0));
        }
}

TEST_CASE("mu of classified domains agrees with the formula") {
  std::mt19937_64 rng(41);
  auto c = preset(PresetKind::kGenusPolygon, {2, 3});
  for (int trial = 0; trial < 40; ++trial) {
    auto sub = random_connected_subset(c, rng, c.vertex_count - 1);
    auto t = classify_subsurface(c, sub);
    if (t.doors < 1) continue;
    CHECK(mu_formula(t.genus, t.doors, t.exits, t.orientable) == t.mu);
  }
}

TEST_CASE("torus band complement carries the cocycle dual to the band") {
  auto c = preset(PresetKind::kGridTorus, {12, 12});
  auto s = low_spectrum(c, 5);
  auto d = nodal_decomposition(c, first_mode(c, s));
  REQUIRE(d.count() == 2);
  auto set = intersection_cocycles(c, d, 0);
  REQUIRE(set.components.size() == 1);
  REQUIRE(set.cocycles.size() == 1);
  CHECK(set.components[0].cocycle_count == d.domains[1].topology.mu);
  // Values on the two fundamental loops: zero along the band, +-1 across it.
  std::vector<std::int64_t> loop_x(288, 0), loop_y(288, 0);
  for (int x = 0; x < 12; ++x) loop_x[static_cast<std::size_t>(x)] = 1;
  for (int y = 0; y < 12; ++y) loop_y[static_cast<std::size_t>(144 + y * 12)] = 1;
  std::int64_t across = evaluate_cochain(set.cocycles[0].values, loop_x);
  std::int64_t along = evaluate_cochain(set.cocycles[0].values, loop_y);
  CHECK(std::min(std::abs(across), std::abs(along)) == 0);
  CHECK(std::max(std::abs(across), std::abs(along)) == 1);
  CHECK(is_closed_cochain(c, set.cocycles[0].values, Coefficients::kIntegers));
}

TEST_CASE("cocycle counts match mu of complement components on closed surfaces") {
  std::mt19937_64 rng(5);
  for (auto [kind, params] : std::vector<std::pair<PresetKind, std::vector<int>>>{
           {PresetKind::kGridTorus, {6, 5}}, {PresetKind::kGenusPolygon, {2, 3}}}) {
    auto c = preset(kind, params);
    for (int trial = 0; trial < 15; ++trial) {
      auto sub = random_connected_subset(c, rng, c.vertex_count / 2);
      Eigen::VectorXd phi = Eigen::VectorXd::Constant(c.vertex_count, -1.0);
      for (int v : sub) phi(v) = 1.0;
      auto d = nodal_decomposition(c, phi);
      int u = d.domain_of_vertex[static_cast<std::size_t>(sub[0])];
      auto set = intersection_cocycles(c, d, u);
      for (auto& comp : set.components) {
        if (meets_face_in_separate_corners(c, comp.vertices)) continue;
        auto t = classify_subsurface(c, comp.vertices);
        CHECK(comp.cocycle_count == t.mu);
      }
    }
  }
}

TEST_CASE("annulus band between two ends") {
  auto c = preset(PresetKind::kAnnulus, {8, 5, 2});
  Eigen::VectorXd phi = Eigen::VectorXd::Constant(c.vertex_count, -1.0);
  for (int v = 8; v < 32; ++v) phi(v) = 1.0;
  auto d = nodal_decomposition(c, phi);
  REQUIRE(d.count() == 3);
  int u = d.domain_of_vertex[8];
  CHECK(d.domains[static_cast<std::size_t>(u)].topology.mu == 1);
  auto set = intersection_cocycles(c, d, u);
  REQUIRE(set.components.size() == 2);
  for (auto& comp : set.components) {
    auto t = classify_subsurface(c, comp.vertices);
    CHECK(t.doors == 1);
    CHECK(t.exits == 1);
    CHECK(comp.cocycle_count == 0);
  }
  auto inner = intersection_cocycles(c, d, d.domain_of_vertex[0]);
  REQUIRE(inner.components.size() == 1);
  CHECK(inner.cocycles.empty());
}

TEST_CASE("genus two: complement of a disc domain") {
  auto c = preset(PresetKind::kGenusPolygon, {2, 3});
  // Center vertex and its first ring form a disc; the rest is a genus two surface with one door.
  Eigen::VectorXd phi = Eigen::VectorXd::Constant(c.vertex_count, -1.0);
  auto t = classify_subsurface(c, std::vector<int>{c.vertex_count - 1});
  REQUIRE(t.chi == 1);
  phi(c.vertex_count - 1) = 1.0;
  auto d = nodal_decomposition(c, phi);
  REQUIRE(d.count() == 2);
  int u = d.domain_of_vertex[static_cast<std::size_t>(c.vertex_count - 1)];
  auto set = intersection_cocycles(c, d, u);
  REQUIRE(set.components.size() == 1);
  CHECK(set.cocycles.size() == 4);
  // Complement of the complement-side domain: the disc has no cocycle.
  auto other = intersection_cocycles(c, d, 1 - u);
  CHECK(other.cocycles.empty());
  CHECK_THROWS_AS(unstable_cover_plan(c, d, 1 - u, 2), Error);
}

TEST_CASE("plans for the cycle and the torus") {
  auto cyc = preset(PresetKind::kCycle, {12});
  Eigen::VectorXd phi(12);
  for (int j = 0; j < 12; ++j) phi(j) = std::cos(2.0 * std::numbers::pi * (j + 0.5) / 12.0);
  auto d = nodal_decomposition(cyc, phi);
  auto plan = unstable_cover_plan(cyc, d, 0, 2);
  CHECK(plan.predicted_increase == 1);
  auto cov = build_cover(cyc, plan.spec);
  CHECK(cov.connected);
  CHECK(cov.total.vertex_count == 24);
  CHECK(preimage_components(cov, d.domains[0].vertices).size() == 2);

  auto torus = preset(PresetKind::kGridTorus, {12, 12});
  auto s = low_spectrum(torus, 5);
  auto dt = nodal_decomposition(torus, first_mode(torus, s));
  auto tp = unstable_cover_plan(torus, dt, 0, 3);
  CHECK(tp.predicted_increase == 2);
  auto tc = build_cover(torus, tp.spec);
  CHECK(tc.connected);
  CHECK(tc.total.vertex_count == 432);
  CHECK(preimage_components(tc, dt.domains[0].vertices).size() == 3);
  // The cover is a 36 x 12 torus: five eigenvalues below the base lambda_1.
  SolverOptions o;
  o.count = 12;
  auto cs = lowest_eigenpairs(assemble(tc.total), o);
  CHECK(count_below(cs, s.values[1], CountMode::kOpen, 1e-8) == 5);
  CHECK_THROWS_AS(unstable_cover_plan(torus, dt, 0, 1), Error);
}

TEST_CASE("non-orientable complexes use mod-2 cocycles") {
  auto c = preset(PresetKind::kMoebius, {12, 3});
  Eigen::VectorXd phi = Eigen::VectorXd::Constant(c.vertex_count, -1.0);
  for (int v = 0; v < c.vertex_count; ++v)
    if (v / 3 < 6) phi(v) = 1.0;
  auto d = nodal_decomposition(c, phi);
  REQUIRE(d.count() == 2);
  auto set = intersection_cocycles(c, d, 0);
  for (auto& w : set.cocycles) CHECK(w.coefficients == Coefficients::kMod2);
  if (!set.cocycles.empty()) CHECK_THROWS_AS(unstable_cover_plan(c, d, 0, 3), Error);
}
