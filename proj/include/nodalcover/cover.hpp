#pragma once

#include <map>
#include <span>
#include <vector>

#include "nodalcover/group.hpp"
#include "nodalcover/surface.hpp"

namespace nodalcover {

/// Permutation voltages on the edges of a base complex. Tree edges carry the
/// identity; edges missing from `voltages` do too.
struct CoverSpec {
  int degree = 1;
  std::vector<bool> tree;  // per base edge
  std::map<int, Perm> voltages;
};

CoverSpec trivial_spec(const SurfaceComplex& base, int degree);
/// Throws kInvalidInput unless `tree` is a spanning tree and every voltage is a
/// permutation on a non-tree edge.
void validate(const SurfaceComplex& base, const CoverSpec& spec);
Perm voltage(const CoverSpec& spec, int edge);

/// Generator numbers (1-based) of the non-tree edges in edge-id order, 0 for tree edges.
std::vector<int> generator_numbers(const std::vector<bool>& tree);

struct Cover {
  SurfaceComplex total;
  int degree = 1;
  int base_vertices = 0;
  int base_edges = 0;
  int base_faces = 0;
  /// Monodromy on the fiber over base vertex 0, one generator per non-tree edge.
  CosetAction monodromy;
  bool connected = true;

  // Sheet-major layout: cover vertex = sheet * |V| + v, likewise for edges and faces.
  int vertex(int v, int sheet) const { return sheet * base_vertices + v; }
  int project_vertex(int x) const { return x % base_vertices; }
  int sheet_of_vertex(int x) const { return x / base_vertices; }
  int project_edge(int e) const { return e % base_edges; }
};

/// Builds the cover; throws kFaceVoltageNontrivial naming the first face whose
/// boundary voltage is not the identity.
Cover build_cover(const SurfaceComplex& base, const CoverSpec& spec);

/// Components of the preimage of a connected base subset, as cover vertex lists.
std::vector<std::vector<int>> preimage_components(const Cover& cov, std::span<const int> sub);

/// Words generating the image of the fundamental group of `sub` in the group
/// of the base tree: one word per non-tree edge of a breadth-first tree of
/// `sub` rooted at `basepoint`.
std::vector<Word> subdomain_group(const SurfaceComplex& base, const std::vector<bool>& base_tree,
                                  std::span<const int> sub, int basepoint);

/// Cyclic degree-n voltages sigma^w(e) from an integer cochain, gauged to vanish on the tree.
CoverSpec cyclic_spec_from_cochain(const SurfaceComplex& base, const std::vector<bool>& tree,
                                   std::span<const std::int64_t> cochain, int degree);
/// Voltages in the regular representation of Z/m1 x ... x Z/mk, one cochain per factor.
CoverSpec abelian_spec_from_cochains(const SurfaceComplex& base, const std::vector<bool>& tree,
                                     const std::vector<std::vector<std::int64_t>>& cochains,
                                     const std::vector<int>& orders);

/// Lifts of base edges on one sheet.
std::vector<int> lift_edges(const Cover& cov, std::span<const int> edges, int sheet);

struct Tower {
  SurfaceComplex base;
  std::vector<CoverSpec> specs;
  std::vector<Cover> levels;  // levels[k] covers level k (level 0 is the base)
  /// Vertex projections from level k to the base; entry 0 is the identity.
  std::vector<std::vector<int>> to_base;

  int height() const { return static_cast<int>(levels.size()); }
  const SurfaceComplex& level(int k) const { return k == 0 ? base : levels.at(static_cast<std::size_t>(k - 1)).total; }
  long long composite_degree(int k) const;
};

Tower build_tower(const SurfaceComplex& base, const std::vector<CoverSpec>& specs);

/// Successive double covers cut along `cut`, a set of base edges whose
/// indicator is a closed cochain; each level is cut along the sheet-0 lift of
/// the previous cut.
Tower doubling_tower(const SurfaceComplex& base, std::vector<int> cut, int height);

/// Largest weighted distance (edge length 1/weight) between two points of the
/// fiber over `x0` in level k.
double fiber_diameter(const Tower& t, int k, int x0);

}  // namespace nodalcover
