#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "nodalcover/cover.hpp"
#include "nodalcover/surface.hpp"

namespace testing_support {

using namespace nodalcover;

inline SurfaceComplex preset(PresetKind kind, std::vector<int> params) { return build_preset(kind, params); }

/// Grid torus cocycle dual to the horizontal loop: horizontal edges leaving column x = X-1.
inline std::vector<std::int64_t> torus_x_cocycle(int nx, int ny) {
  std::vector<std::int64_t> w(static_cast<std::size_t>(2 * nx * ny), 0);
  for (int y = 0; y < ny; ++y) w[static_cast<std::size_t>(y * nx + nx - 1)] = 1;
  return w;
}

inline std::vector<std::int64_t> torus_y_cocycle(int nx, int ny) {
  std::vector<std::int64_t> w(static_cast<std::size_t>(2 * nx * ny), 0);
  for (int x = 0; x < nx; ++x) w[static_cast<std::size_t>(nx * ny + (ny - 1) * nx + x)] = 1;
  return w;
}

/// Same 1-skeleton without faces.
inline SurfaceComplex skeleton(SurfaceComplex c) {
  c.faces.clear();
  c.infinity_edges.clear();
  c.orientation = Orientability::kGraphOnly;
  return c;
}

inline Perm random_perm(int n, std::mt19937_64& rng) {
  Perm p = identity_perm(n);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

/// Random connected vertex subset grown from a random seed.
inline std::vector<int> random_connected_subset(const SurfaceComplex& c, std::mt19937_64& rng, int max_size) {
  auto adj = vertex_adjacency(c);
  std::set<int> sub{static_cast<int>(rng() % static_cast<unsigned>(c.vertex_count))};
  int target = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_size));
  while (static_cast<int>(sub.size()) < target) {
    std::vector<int> frontier;
    for (int v : sub)
      for (auto [w, e] : adj[static_cast<std::size_t>(v)])
        if (!sub.count(w)) frontier.push_back(w);
    if (frontier.empty()) break;
    sub.insert(frontier[rng() % frontier.size()]);
  }
  return {sub.begin(), sub.end()};
}

/// Random cover spec of degree n over c whose face voltages are trivial:
/// arbitrary permutations on graphs, homomorphisms through H1 otherwise.
inline CoverSpec random_spec(const SurfaceComplex& c, int n, std::mt19937_64& rng) {
  auto tree = canonical_spanning_tree(c);
  if (!c.has_faces()) {
    CoverSpec spec{n, tree, {}};
    for (int e = 0; e < c.edge_count(); ++e)
      if (!tree[static_cast<std::size_t>(e)]) spec.voltages[e] = random_perm(n, rng);
    return spec;
  }
  // Through H1 onto the cyclic group generated by one random permutation.
  auto basis = cohomology_basis(c);
  Perm g = random_perm(n, rng);
  int order = 1;
  for (int k = 1; k <= 1000; ++k) {
    Perm q = identity_perm(n);
    for (int j = 0; j < k; ++j) q = compose(q, g);
    if (is_identity(q)) {
      order = k;
      break;
    }
  }
  std::vector<std::int64_t> omega(c.edges.size(), 0);
  for (const auto& b : basis) {
    std::int64_t coeff = static_cast<std::int64_t>(rng() % static_cast<unsigned>(order + 1));
    for (std::size_t e = 0; e < b.size(); ++e) omega[e] += coeff * b[e];
  }
  auto cyclic = cyclic_spec_from_cochain(c, tree, omega, order);
  CoverSpec spec{n, tree, {}};
  for (const auto& [e, p] : cyclic.voltages) {
    Perm q = identity_perm(n);
    for (int j = 0; j < p[0]; ++j) q = compose(q, g);
    spec.voltages[e] = q;
  }
  return spec;
}

}  // namespace testing_support
