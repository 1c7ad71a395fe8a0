#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nodalcover/integer_matrix.hpp"

namespace nodalcover {

struct Edge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
};

enum class Orientability { kOrientable, kNonOrientable, kGraphOnly };

/// Weighted 2-dimensional cell complex used as a discrete surface.
///
/// Faces are cyclic lists of edge ids whose union is a closed walk. Edges in
/// `infinity_edges` model boundary circles at infinity and may lie in at most
/// one face.
struct SurfaceComplex {
  int vertex_count = 0;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> faces;
  std::vector<double> mass;
  std::vector<int> infinity_edges;
  /// Optional embedding, required only by the cotangent discretization.
  std::vector<std::array<double, 3>> coords;
  Orientability orientation = Orientability::kGraphOnly;

  int edge_count() const { return static_cast<int>(edges.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }
  bool has_faces() const { return !faces.empty(); }
};

enum class PresetKind { kCycle, kGridTorus, kGenusPolygon, kAnnulus, kMoebius, kPath };

std::optional<PresetKind> parse_preset_kind(const std::string& name);
std::string to_string(PresetKind kind);

/// Deterministic test surfaces.
///
///   cycle(n)                  n >= 3, graph only, chi = 0
///   path(n)                   n >= 2, graph only, chi = 1
///   grid_torus(X, Y)          X, Y >= 3, square faces, chi = 0
///   genus_g_polygon(g, r)     g >= 1, r >= 3, triangulated identified 4g-gon, chi = 2 - 2g
///   annulus(s, w[, marks])    s >= 3, w >= 2, triangulated; marks 0 none, 1 outer circle at
///                             infinity, 2 both circles at infinity
///   moebius(L, w)             L >= 3, w >= 2, open band of square faces, chi = 0
SurfaceComplex build_preset(PresetKind kind, std::span<const int> params);

/// Checks structural invariants; throws Error(kInvalidInput) on violation and
/// recomputes the orientation flag.
void validate(SurfaceComplex& c);

int euler_characteristic(const SurfaceComplex& c);

/// An edge traversed forward (+1, u to v) or backward (-1).
struct OrientedEdge {
  int edge = 0;
  int sign = 1;
};

/// Boundary walk of a face, in the order the edges are listed.
struct FaceBoundary {
  std::vector<OrientedEdge> steps;
  std::vector<int> vertices;  // vertices[i] is the start of steps[i]
};

FaceBoundary face_boundary(const SurfaceComplex& c, int face);

/// Orientability by coherent face orientation via breadth-first search.
Orientability detect_orientation(const SurfaceComplex& c);

/// Number of faces containing each edge.
std::vector<int> edge_face_counts(const SurfaceComplex& c);

/// Adjacency lists of (neighbor, edge id), in edge-id order.
std::vector<std::vector<std::pair<int, int>>> vertex_adjacency(const SurfaceComplex& c);

/// Connected components of the subgraph induced on `subset`, each sorted and
/// ordered by smallest vertex.
std::vector<std::vector<int>> induced_components(const SurfaceComplex& c, std::span<const int> subset);
std::vector<std::vector<int>> connected_components(const SurfaceComplex& c);

/// Canonical spanning tree: breadth-first from vertex 0, neighbors in edge-id
/// order. Returns per-edge membership flags. Throws for disconnected complexes.
std::vector<bool> canonical_spanning_tree(const SurfaceComplex& c);

struct DomainTopology {
  bool orientable = true;
  int genus = 0;
  int doors = 0;  // k
  int exits = 0;  // l
  int chi = 0;
  int mu = 0;
};

/// Topology of the regular neighbourhood of the subcomplex induced on `sub`.
DomainTopology classify_subsurface(const SurfaceComplex& c, std::span<const int> sub);

struct AbelianInvariants {
  int rank = 0;
  std::vector<BigInt> torsion;  // k_1 | k_2 | ..., each >= 2

  bool is_trivial() const { return rank == 0 && torsion.empty(); }
  /// Order of a finite group; throws for rank > 0.
  BigInt order() const;
};

enum class Coefficients { kIntegers, kMod2 };

AbelianInvariants homology_h1(const SurfaceComplex& c, Coefficients coeffs = Coefficients::kIntegers);

/// Invariants of H1(c) / image of H1(sub).
AbelianInvariants quotient_by_subdomain(const SurfaceComplex& c, std::span<const int> sub);

/// Integer boundary matrices: d1 is V x E, d2 is E x F.
IntMatrix boundary_matrix_1(const SurfaceComplex& c);
IntMatrix boundary_matrix_2(const SurfaceComplex& c);

/// Integer 1-chains of the fundamental cycles of a spanning forest of the
/// subgraph induced on `sub`, one per non-forest edge.
std::vector<std::vector<std::int64_t>> induced_cycle_basis(const SurfaceComplex& c,
                                                           std::span<const int> sub);

/// Closed 1-cochains supported on `edge_support`, modulo coboundaries of
/// functions supported on `vertex_support`; returns a basis of the free part as
/// vectors indexed by edge id. Every edge incident to a vertex of
/// `vertex_support` must belong to `edge_support`.
std::vector<std::vector<std::int64_t>> relative_cocycle_basis(const SurfaceComplex& c,
                                                              std::span<const int> edge_support,
                                                              std::span<const int> vertex_support,
                                                              Coefficients coeffs);

/// Basis of the free part of H^1(c) as integer cocycles.
std::vector<std::vector<std::int64_t>> cohomology_basis(const SurfaceComplex& c,
                                                        Coefficients coeffs = Coefficients::kIntegers);

/// Sum of a cochain over an integer 1-chain.
std::int64_t evaluate_cochain(std::span<const std::int64_t> cochain, std::span<const std::int64_t> chain);

/// Whether the cochain vanishes on every face boundary (mod 2 if requested).
bool is_closed_cochain(const SurfaceComplex& c, std::span<const std::int64_t> cochain,
                       Coefficients coeffs = Coefficients::kIntegers);

}  // namespace nodalcover
