#include "nodalcover/surface.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <numeric>
#include <queue>

#include "nodalcover/error.hpp"

namespace nodalcover {
namespace {

class ComplexBuilder {
 public:
  explicit ComplexBuilder(int vertices) {
    c_.vertex_count = vertices;
    c_.mass.assign(static_cast<std::size_t>(vertices), 1.0);
  }

  int edge(int a, int b) {
    auto key = std::minmax(a, b);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int id = c_.edge_count();
    c_.edges.push_back({a, b, 1.0});
    index_.emplace(key, id);
    return id;
  }

  void polygon(const std::vector<int>& cycle) {
    std::vector<int> face;
    face.reserve(cycle.size());
    for (std::size_t i = 0; i < cycle.size(); ++i) face.push_back(edge(cycle[i], cycle[(i + 1) % cycle.size()]));
    c_.faces.push_back(std::move(face));
  }

  int find(int a, int b) const { return index_.at(std::minmax(a, b)); }

  SurfaceComplex& complex() { return c_; }

 private:
  SurfaceComplex c_;
  std::map<std::pair<int, int>, int> index_;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::kInvalidParams, msg);
}

int param(std::span<const int> params, std::size_t i, int fallback) {
  return i < params.size() ? params[i] : fallback;
}

SurfaceComplex make_cycle(std::span<const int> params) {
  require(params.size() == 1, "cycle expects one parameter (length)");
  const int n = params[0];
  require(n >= 3, "cycle length must be at least 3");
  ComplexBuilder b(n);
  for (int i = 0; i < n; ++i) b.edge(i, (i + 1) % n);
  auto& c = b.complex();
  for (int i = 0; i < n; ++i) {
    double t = 2.0 * std::numbers::pi * i / n;
    c.coords.push_back({std::cos(t), std::sin(t), 0.0});
  }
  c.orientation = Orientability::kGraphOnly;
  return std::move(c);
}

SurfaceComplex make_path(std::span<const int> params) {
  require(params.size() == 1, "path expects one parameter (vertex count)");
  const int n = params[0];
  require(n >= 2, "path needs at least 2 vertices");
  ComplexBuilder b(n);
  for (int i = 0; i + 1 < n; ++i) b.edge(i, i + 1);
  auto& c = b.complex();
  for (int i = 0; i < n; ++i) c.coords.push_back({static_cast<double>(i), 0.0, 0.0});
  c.orientation = Orientability::kGraphOnly;
  return std::move(c);
}

SurfaceComplex make_grid_torus(std::span<const int> params) {
  require(params.size() == 2, "grid_torus expects two parameters (X, Y)");
  const int nx = params[0];
  const int ny = params[1];
  require(nx >= 3 && ny >= 3, "grid_torus needs at least 3x3 vertices");
  auto id = [&](int x, int y) { return ((y + ny) % ny) * nx + (x + nx) % nx; };
  ComplexBuilder b(nx * ny);
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) b.edge(id(x, y), id(x + 1, y));
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) b.edge(id(x, y), id(x, y + 1));
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) b.polygon({id(x, y), id(x + 1, y), id(x + 1, y + 1), id(x, y + 1)});
  auto& c = b.complex();
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      double th = 2.0 * std::numbers::pi * x / nx;
      double ph = 2.0 * std::numbers::pi * y / ny;
      double r = 3.0 + std::cos(ph);
      c.coords.push_back({r * std::cos(th), r * std::sin(th), std::sin(ph)});
    }
  }
  c.orientation = Orientability::kOrientable;
  return std::move(c);
}

// Concentric triangulation of a 4g-gon with sides a1 b1 a1^-1 b1^-1 ...; every
// side is cut into r segments and r rings separate the boundary from the center.
SurfaceComplex make_genus_polygon(std::span<const int> params) {
  require(params.size() == 2, "genus_g_polygon expects (g, refinement)");
  const int g = params[0];
  const int r = params[1];
  require(g >= 1, "genus must be at least 1");
  require(r >= 3, "refinement must be at least 3");
  const int sides = 4 * g;
  const int ring_size = sides * r;
  const int boundary_classes = 1 + 2 * g * (r - 1);
  const int rings = r;
  const int center = boundary_classes + (rings - 1) * ring_size;
  auto boundary_class = [&](int p) {
    p = ((p % ring_size) + ring_size) % ring_size;
    int s = p / r;
    int t = p % r;
    if (t == 0) return 0;
    if (s % 4 >= 2) {
      s -= 2;
      t = r - t;
    }
    int q = (s / 4) * 2 + (s % 4);
    return 1 + q * (r - 1) + (t - 1);
  };
  auto ring_vertex = [&](int rho, int p) {
    p = ((p % ring_size) + ring_size) % ring_size;
    if (rho == 0) return boundary_class(p);
    return boundary_classes + (rho - 1) * ring_size + p;
  };
  ComplexBuilder b(center + 1);
  for (int rho = 0; rho + 1 < rings; ++rho) {
    for (int p = 0; p < ring_size; ++p) {
      int o0 = ring_vertex(rho, p), o1 = ring_vertex(rho, p + 1);
      int i0 = ring_vertex(rho + 1, p), i1 = ring_vertex(rho + 1, p + 1);
      b.polygon({o0, o1, i1});
      b.polygon({o0, i1, i0});
    }
  }
  for (int p = 0; p < ring_size; ++p) b.polygon({ring_vertex(rings - 1, p), ring_vertex(rings - 1, p + 1), center});
  auto& c = b.complex();
  c.orientation = Orientability::kOrientable;
  return std::move(c);
}

SurfaceComplex make_annulus(std::span<const int> params) {
  require(params.size() == 2 || params.size() == 3, "annulus expects (segments, rings[, marks])");
  const int s = params[0];
  const int w = params[1];
  const int marks = param(params, 2, 0);
  require(s >= 3 && w >= 2, "annulus needs segments >= 3 and rings >= 2");
  require(marks >= 0 && marks <= 2, "annulus marks must be 0, 1 or 2");
  auto id = [&](int j, int k) { return j * s + ((k % s) + s) % s; };
  ComplexBuilder b(s * w);
  for (int j = 0; j < w; ++j)
    for (int k = 0; k < s; ++k) b.edge(id(j, k), id(j, k + 1));
  for (int j = 0; j + 1 < w; ++j)
    for (int k = 0; k < s; ++k) b.edge(id(j, k), id(j + 1, k));
  for (int j = 0; j + 1 < w; ++j) {
    for (int k = 0; k < s; ++k) {
      b.polygon({id(j, k), id(j, k + 1), id(j + 1, k + 1)});
      b.polygon({id(j, k), id(j + 1, k + 1), id(j + 1, k)});
    }
  }
  auto& c = b.complex();
  for (int j = 0; j < w; ++j) {
    for (int k = 0; k < s; ++k) {
      double t = 2.0 * std::numbers::pi * k / s;
      c.coords.push_back({(1.0 + j) * std::cos(t), (1.0 + j) * std::sin(t), 0.0});
    }
  }
  if (marks >= 1)
    for (int k = 0; k < s; ++k) c.infinity_edges.push_back(b.find(id(w - 1, k), id(w - 1, k + 1)));
  if (marks == 2)
    for (int k = 0; k < s; ++k) c.infinity_edges.push_back(b.find(id(0, k), id(0, k + 1)));
  std::sort(c.infinity_edges.begin(), c.infinity_edges.end());
  c.orientation = Orientability::kOrientable;
  return std::move(c);
}

SurfaceComplex make_moebius(std::span<const int> params) {
  require(params.size() == 2, "moebius expects (length, width)");
  const int len = params[0];
  const int w = params[1];
  require(len >= 3 && w >= 2, "moebius needs length >= 3 and width >= 2");
  auto id = [&](int i, int j) { return i * w + j; };
  // Column i+1 of the strip, with the half twist when wrapping around.
  auto next = [&](int i, int j) { return i + 1 < len ? id(i + 1, j) : id(0, w - 1 - j); };
  ComplexBuilder b(len * w);
  for (int i = 0; i < len; ++i)
    for (int j = 0; j + 1 < w; ++j) b.edge(id(i, j), id(i, j + 1));
  for (int i = 0; i < len; ++i)
    for (int j = 0; j < w; ++j) b.edge(id(i, j), next(i, j));
  for (int i = 0; i < len; ++i)
    for (int j = 0; j + 1 < w; ++j) b.polygon({id(i, j), next(i, j), next(i, j + 1), id(i, j + 1)});
  auto& c = b.complex();
  for (int i = 0; i < len; ++i) {
    for (int j = 0; j < w; ++j) {
      double th = 2.0 * std::numbers::pi * i / len;
      double t = static_cast<double>(j) / (w - 1) - 0.5;
      double rad = 2.0 + t * std::cos(th / 2.0);
      c.coords.push_back({rad * std::cos(th), rad * std::sin(th), t * std::sin(th / 2.0)});
    }
  }
  c.orientation = Orientability::kNonOrientable;
  return std::move(c);
}

int mu_value(int genus, int doors, int exits, bool orientable) {
  return (orientable ? 2 * genus : genus) + doors - 1 + std::max(exits - 1, 0);
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

std::vector<bool> membership(int n, std::span<const int> subset) {
  std::vector<bool> in(static_cast<std::size_t>(n), false);
  for (int v : subset) {
    if (v < 0 || v >= n) throw Error(ErrorCode::kInvalidInput, "vertex id out of range");
    in[static_cast<std::size_t>(v)] = true;
  }
  return in;
}

}  // namespace

std::optional<PresetKind> parse_preset_kind(const std::string& name) {
  if (name == "cycle") return PresetKind::kCycle;
  if (name == "grid_torus") return PresetKind::kGridTorus;
  if (name == "genus_g_polygon") return PresetKind::kGenusPolygon;
  if (name == "annulus") return PresetKind::kAnnulus;
  if (name == "moebius") return PresetKind::kMoebius;
  if (name == "path") return PresetKind::kPath;
  return std::nullopt;
}

std::string to_string(PresetKind kind) {
  switch (kind) {
    case PresetKind::kCycle: return "cycle";
    case PresetKind::kGridTorus: return "grid_torus";
    case PresetKind::kGenusPolygon: return "genus_g_polygon";
    case PresetKind::kAnnulus: return "annulus";
    case PresetKind::kMoebius: return "moebius";
    case PresetKind::kPath: return "path";
  }
  return "unknown";
}

SurfaceComplex build_preset(PresetKind kind, std::span<const int> params) {
  switch (kind) {
    case PresetKind::kCycle: return make_cycle(params);
    case PresetKind::kGridTorus: return make_grid_torus(params);
    case PresetKind::kGenusPolygon: return make_genus_polygon(params);
    case PresetKind::kAnnulus: return make_annulus(params);
    case PresetKind::kMoebius: return make_moebius(params);
    case PresetKind::kPath: return make_path(params);
  }
  throw Error(ErrorCode::kInvalidParams, "unknown preset");
}

FaceBoundary face_boundary(const SurfaceComplex& c, int face) {
  const auto& edges = c.faces.at(static_cast<std::size_t>(face));
  if (edges.empty()) throw Error(ErrorCode::kInvalidInput, "empty face " + std::to_string(face));
  const Edge& first = c.edges.at(static_cast<std::size_t>(edges.front()));
  for (int start : {first.u, first.v}) {
    FaceBoundary fb;
    int cur = start;
    bool ok = true;
    for (int e : edges) {
      const Edge& ed = c.edges.at(static_cast<std::size_t>(e));
      fb.vertices.push_back(cur);
      if (ed.u == cur) {
        fb.steps.push_back({e, +1});
        cur = ed.v;
      } else if (ed.v == cur) {
        fb.steps.push_back({e, -1});
        cur = ed.u;
      } else {
        ok = false;
        break;
      }
    }
    if (ok && cur == start) return fb;
  }
  throw Error(ErrorCode::kInvalidInput, "face " + std::to_string(face) + " is not a closed edge walk");
}

std::vector<int> edge_face_counts(const SurfaceComplex& c) {
  std::vector<int> counts(c.edges.size(), 0);
  for (const auto& f : c.faces)
    for (int e : f) ++counts.at(static_cast<std::size_t>(e));
  return counts;
}

Orientability detect_orientation(const SurfaceComplex& c) {
  if (c.faces.empty()) return Orientability::kGraphOnly;
  // (face, traversal sign) per edge
  std::vector<std::vector<std::pair<int, int>>> uses(c.edges.size());
  for (int f = 0; f < c.face_count(); ++f)
    for (const auto& step : face_boundary(c, f).steps) uses[static_cast<std::size_t>(step.edge)].push_back({f, step.sign});
  std::vector<int> orient(c.faces.size(), 0);
  for (int root = 0; root < c.face_count(); ++root) {
    if (orient[static_cast<std::size_t>(root)] != 0) continue;
    orient[static_cast<std::size_t>(root)] = 1;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      int f = queue.front();
      queue.pop_front();
      for (const auto& step : face_boundary(c, f).steps) {
        for (auto [g, sign] : uses[static_cast<std::size_t>(step.edge)]) {
          if (g == f) continue;
          int want = -orient[static_cast<std::size_t>(f)] * step.sign * sign;
          int& og = orient[static_cast<std::size_t>(g)];
          if (og == 0) {
            og = want;
            queue.push_back(g);
          } else if (og != want) {
            return Orientability::kNonOrientable;
          }
        }
      }
    }
  }
  return Orientability::kOrientable;
}

void validate(SurfaceComplex& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kInvalidInput, m); };
  if (c.vertex_count < 1) fail("complex needs at least one vertex");
  if (c.mass.size() != static_cast<std::size_t>(c.vertex_count)) fail("mass vector length must equal vertex count");
  for (double m : c.mass)
    if (!(m > 0.0) || !std::isfinite(m)) fail("vertex masses must be positive");
  for (const auto& e : c.edges) {
    if (e.u < 0 || e.u >= c.vertex_count || e.v < 0 || e.v >= c.vertex_count) fail("edge endpoint out of range");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) fail("edge weights must be positive");
  }
  for (const auto& f : c.faces)
    for (int e : f)
      if (e < 0 || e >= c.edge_count()) fail("face references unknown edge");
  for (int f = 0; f < c.face_count(); ++f) face_boundary(c, f);
  auto counts = edge_face_counts(c);
  for (int n : counts)
    if (n > 2) fail("edge lies in more than two faces");
  std::sort(c.infinity_edges.begin(), c.infinity_edges.end());
  c.infinity_edges.erase(std::unique(c.infinity_edges.begin(), c.infinity_edges.end()), c.infinity_edges.end());
  for (int e : c.infinity_edges) {
    if (e < 0 || e >= c.edge_count()) fail("infinity edge out of range");
    if (counts[static_cast<std::size_t>(e)] > 1) fail("infinity edge lies in more than one face");
  }
  if (!c.coords.empty() && c.coords.size() != static_cast<std::size_t>(c.vertex_count))
    fail("coordinate count must equal vertex count");
  c.orientation = detect_orientation(c);
}

int euler_characteristic(const SurfaceComplex& c) {
  return c.vertex_count - c.edge_count() + c.face_count();
}

std::vector<std::vector<std::pair<int, int>>> vertex_adjacency(const SurfaceComplex& c) {
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(c.vertex_count));
  for (int e = 0; e < c.edge_count(); ++e) {
    const auto& ed = c.edges[static_cast<std::size_t>(e)];
    adj[static_cast<std::size_t>(ed.u)].push_back({ed.v, e});
    if (ed.v != ed.u) adj[static_cast<std::size_t>(ed.v)].push_back({ed.u, e});
  }
  return adj;
}

std::vector<std::vector<int>> induced_components(const SurfaceComplex& c, std::span<const int> subset) {
  auto in = membership(c.vertex_count, subset);
  auto adj = vertex_adjacency(c);
  std::vector<int> comp(static_cast<std::size_t>(c.vertex_count), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < c.vertex_count; ++s) {
    if (!in[static_cast<std::size_t>(s)] || comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<int> members{s};
    comp[static_cast<std::size_t>(s)] = static_cast<int>(out.size());
    for (std::size_t head = 0; head < members.size(); ++head) {
      for (auto [w, e] : adj[static_cast<std::size_t>(members[head])]) {
        if (in[static_cast<std::size_t>(w)] && comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = static_cast<int>(out.size());
          members.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

std::vector<std::vector<int>> connected_components(const SurfaceComplex& c) {
  std::vector<int> all(static_cast<std::size_t>(c.vertex_count));
  std::iota(all.begin(), all.end(), 0);
  return induced_components(c, all);
}

std::vector<bool> canonical_spanning_tree(const SurfaceComplex& c) {
  auto adj = vertex_adjacency(c);
  std::vector<bool> tree(c.edges.size(), false);
  std::vector<bool> seen(static_cast<std::size_t>(c.vertex_count), false);
  std::deque<int> queue{0};
  seen[0] = true;
  int reached = 1;
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (auto [w, e] : adj[static_cast<std::size_t>(x)]) {
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      tree[static_cast<std::size_t>(e)] = true;
      ++reached;
      queue.push_back(w);
    }
  }
  if (reached != c.vertex_count) throw Error(ErrorCode::kDisconnectedComplex, "complex is not connected");
  return tree;
}

DomainTopology classify_subsurface(const SurfaceComplex& c, std::span<const int> sub) {
  if (sub.empty()) throw Error(ErrorCode::kInvalidInput, "empty vertex subset");
  auto comps = induced_components(c, sub);
  if (comps.size() != 1) throw Error(ErrorCode::kDisconnectedSubset, "subset induces " + std::to_string(comps.size()) + " components");
  auto in = membership(c.vertex_count, sub);
  auto inside = [&](int v) { return static_cast<bool>(in[static_cast<std::size_t>(v)]); };
  const auto& members = comps.front();

  int k_edges = 0;
  for (const auto& e : c.edges)
    if (inside(e.u) && inside(e.v)) ++k_edges;
  int k_faces = 0;
  std::vector<FaceBoundary> boundaries;
  boundaries.reserve(c.faces.size());
  for (int f = 0; f < c.face_count(); ++f) {
    boundaries.push_back(face_boundary(c, f));
    const auto& vs = boundaries.back().vertices;
    if (std::all_of(vs.begin(), vs.end(), inside)) ++k_faces;
  }

  DomainTopology top;
  top.chi = static_cast<int>(members.size()) - k_edges + k_faces;

  if (!c.has_faces()) {
    // Ribbon thickening of a graph in the plane.
    top.orientable = true;
    top.genus = 0;
    top.doors = 2 - top.chi;
    top.exits = 0;
    top.mu = mu_value(0, top.doors, 0, true);
    return top;
  }

  auto counts = edge_face_counts(c);
  std::vector<bool> at_infinity(c.edges.size(), false);
  for (int e : c.infinity_edges) at_infinity[static_cast<std::size_t>(e)] = true;

  // Nodes of the boundary graph of the regular neighbourhood: one per edge that
  // either crosses out of the subset or is a surface-boundary edge inside it.
  std::vector<int> node_of_edge(c.edges.size(), -1);
  std::vector<int> node_edge;
  for (int e = 0; e < c.edge_count(); ++e) {
    const auto& ed = c.edges[static_cast<std::size_t>(e)];
    bool iu = inside(ed.u), iv = inside(ed.v);
    if (!iu && !iv) continue;
    if (counts[static_cast<std::size_t>(e)] == 0)
      throw Error(ErrorCode::kNonSurface, "edge " + std::to_string(e) + " lies in no face");
    bool crossing = iu != iv;
    bool rim = iu && iv && counts[static_cast<std::size_t>(e)] == 1;
    if (crossing || rim) {
      node_of_edge[static_cast<std::size_t>(e)] = static_cast<int>(node_edge.size());
      node_edge.push_back(e);
    }
  }
  UnionFind uf(node_edge.size());
  std::vector<int> degree(node_edge.size(), 0);
  auto link = [&](int ea, int eb) {
    int a = node_of_edge[static_cast<std::size_t>(ea)];
    int b = node_of_edge[static_cast<std::size_t>(eb)];
    if (a < 0 || b < 0) throw Error(ErrorCode::kNonSurface, "inconsistent boundary walk");
    ++degree[static_cast<std::size_t>(a)];
    ++degree[static_cast<std::size_t>(b)];
    uf.unite(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  };

  for (const auto& fb : boundaries) {
    const auto& vs = fb.vertices;
    const std::size_t m = vs.size();
    std::size_t anchor = m;
    for (std::size_t i = 0; i < m; ++i)
      if (!inside(vs[i])) { anchor = i; break; }
    if (anchor == m) continue;  // face belongs to the subcomplex
    for (std::size_t step = 1; step <= m; ++step) {
      std::size_t i = (anchor + step) % m;
      std::size_t prev = (i + m - 1) % m;
      if (!inside(vs[i]) || inside(vs[prev])) continue;
      std::size_t j = i;
      while (inside(vs[(j + 1) % m])) j = (j + 1) % m;
      link(fb.steps[prev].edge, fb.steps[j].edge);
    }
  }
  auto adj = vertex_adjacency(c);
  for (int a : members) {
    std::vector<int> rim_edges;
    for (auto [w, e] : adj[static_cast<std::size_t>(a)])
      if (counts[static_cast<std::size_t>(e)] == 1 && w != a) rim_edges.push_back(e);
    if (rim_edges.empty()) continue;
    if (rim_edges.size() != 2)
      throw Error(ErrorCode::kNonSurface, "vertex " + std::to_string(a) + " has a non-manifold boundary");
    link(rim_edges[0], rim_edges[1]);
  }
  for (int d : degree)
    if (d != 2) throw Error(ErrorCode::kNonSurface, "boundary of the subcomplex is not a union of circles");

  std::map<std::size_t, bool> circle_at_infinity;
  for (std::size_t n = 0; n < node_edge.size(); ++n) {
    int e = node_edge[n];
    const auto& ed = c.edges[static_cast<std::size_t>(e)];
    bool pure_exit = inside(ed.u) && inside(ed.v) && at_infinity[static_cast<std::size_t>(e)];
    auto [it, fresh] = circle_at_infinity.emplace(uf.find(n), pure_exit);
    if (!fresh) it->second = it->second && pure_exit;
  }
  int circles = static_cast<int>(circle_at_infinity.size());
  top.exits = static_cast<int>(std::count_if(circle_at_infinity.begin(), circle_at_infinity.end(),
                                             [](const auto& kv) { return kv.second; }));
  top.doors = circles - top.exits;

  top.orientable = true;
  if (c.orientation == Orientability::kNonOrientable) {
    // Local orientation sign of each incident face relative to a reference face,
    // propagated around the star of every subset vertex.
    std::vector<std::vector<std::pair<int, int>>> star(static_cast<std::size_t>(c.vertex_count));
    for (int f = 0; f < c.face_count(); ++f)
      for (int v : boundaries[static_cast<std::size_t>(f)].vertices)
        if (inside(v)) star[static_cast<std::size_t>(v)].push_back({f, 0});
    auto traversal = [&](int f, int e) {
      for (const auto& s : boundaries[static_cast<std::size_t>(f)].steps)
        if (s.edge == e) return s.sign;
      return 0;
    };
    auto local_sign = [&](int v, int f) {
      for (auto [g, s] : star[static_cast<std::size_t>(v)])
        if (g == f) return s;
      return 0;
    };
    for (int v : members) {
      auto& st = star[static_cast<std::size_t>(v)];
      if (st.empty()) continue;
      st.front().second = 1;
      bool progress = true;
      while (progress) {
        progress = false;
        for (auto& [f, s] : st) {
          if (s == 0) continue;
          for (const auto& step : boundaries[static_cast<std::size_t>(f)].steps) {
            const auto& ed = c.edges[static_cast<std::size_t>(step.edge)];
            if (ed.u != v && ed.v != v) continue;
            for (auto& [g, t] : st) {
              if (t != 0 || g == f) continue;
              int sg = traversal(g, step.edge);
              if (sg == 0) continue;
              t = -s * step.sign * sg;
              progress = true;
            }
          }
        }
      }
    }
    std::vector<int> color(static_cast<std::size_t>(c.vertex_count), 0);
    std::vector<std::vector<int>> faces_of_edge(c.edges.size());
    for (int f = 0; f < c.face_count(); ++f)
      for (const auto& s : boundaries[static_cast<std::size_t>(f)].steps) faces_of_edge[static_cast<std::size_t>(s.edge)].push_back(f);
    color[static_cast<std::size_t>(members.front())] = 1;
    std::deque<int> queue{members.front()};
    while (!queue.empty() && top.orientable) {
      int a = queue.front();
      queue.pop_front();
      for (auto [b, e] : adj[static_cast<std::size_t>(a)]) {
        if (!inside(b) || b == a) continue;
        const auto& fs = faces_of_edge[static_cast<std::size_t>(e)];
        int tau = local_sign(a, fs.front()) * local_sign(b, fs.front());
        int want = color[static_cast<std::size_t>(a)] * tau;
        int& cb = color[static_cast<std::size_t>(b)];
        if (cb == 0) {
          cb = want;
          queue.push_back(b);
        } else if (cb != want) {
          top.orientable = false;
        }
      }
    }
  }

  int twice_or_once = 2 - circles - top.chi;
  if (top.orientable) {
    if (twice_or_once < 0 || twice_or_once % 2 != 0)
      throw Error(ErrorCode::kNonSurface, "inconsistent orientable topology");
    top.genus = twice_or_once / 2;
  } else {
    if (twice_or_once < 1) throw Error(ErrorCode::kNonSurface, "inconsistent non-orientable topology");
    top.genus = twice_or_once;
  }
  top.mu = mu_value(top.genus, top.doors, top.exits, top.orientable);
  return top;
}

BigInt AbelianInvariants::order() const {
  if (rank > 0) throw Error(ErrorCode::kInfiniteGroup, "group has free rank " + std::to_string(rank));
  BigInt out = 1;
  for (const auto& k : torsion) out *= k;
  return out;
}

IntMatrix boundary_matrix_1(const SurfaceComplex& c) {
  IntMatrix d(static_cast<std::size_t>(c.vertex_count), std::vector<std::int64_t>(c.edges.size(), 0));
  for (std::size_t e = 0; e < c.edges.size(); ++e) {
    const auto& ed = c.edges[e];
    d[static_cast<std::size_t>(ed.v)][e] += 1;
    d[static_cast<std::size_t>(ed.u)][e] -= 1;
  }
  return d;
}

IntMatrix boundary_matrix_2(const SurfaceComplex& c) {
  IntMatrix d(c.edges.size(), std::vector<std::int64_t>(c.faces.size(), 0));
  for (int f = 0; f < c.face_count(); ++f)
    for (const auto& s : face_boundary(c, f).steps) d[static_cast<std::size_t>(s.edge)][static_cast<std::size_t>(f)] += s.sign;
  return d;
}

AbelianInvariants homology_h1(const SurfaceComplex& c, Coefficients coeffs) {
  if (connected_components(c).size() != 1) throw Error(ErrorCode::kDisconnectedComplex, "homology requires a connected complex");
  const int rank_d1 = c.vertex_count - 1;
  AbelianInvariants out;
  if (coeffs == Coefficients::kMod2) {
    Gf2Matrix d2;
    for (const auto& row : boundary_matrix_2(c)) {
      std::vector<std::uint8_t> r(row.size());
      for (std::size_t j = 0; j < row.size(); ++j) r[j] = static_cast<std::uint8_t>(row[j] & 1);
      d2.push_back(std::move(r));
    }
    int rank_d2 = c.faces.empty() ? 0 : static_cast<int>(gf2_rank(d2, c.faces.size()));
    out.rank = c.edge_count() - rank_d1 - rank_d2;
    return out;
  }
  int rank_d2 = 0;
  if (!c.faces.empty()) {
    auto form = smith_normal_form(boundary_matrix_2(c));
    rank_d2 = static_cast<int>(form.rank);
    out.torsion = torsion_factors(form);
  }
  out.rank = c.edge_count() - rank_d1 - rank_d2;
  return out;
}

std::vector<std::vector<std::int64_t>> induced_cycle_basis(const SurfaceComplex& c, std::span<const int> sub) {
  auto in = membership(c.vertex_count, sub);
  auto adj = vertex_adjacency(c);
  std::vector<int> parent_edge(static_cast<std::size_t>(c.vertex_count), -1);
  std::vector<bool> seen(static_cast<std::size_t>(c.vertex_count), false);
  std::vector<bool> tree(c.edges.size(), false);
  for (int s = 0; s < c.vertex_count; ++s) {
    if (!in[static_cast<std::size_t>(s)] || seen[static_cast<std::size_t>(s)]) continue;
    seen[static_cast<std::size_t>(s)] = true;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      int x = queue.front();
      queue.pop_front();
      for (auto [w, e] : adj[static_cast<std::size_t>(x)]) {
        if (!in[static_cast<std::size_t>(w)] || seen[static_cast<std::size_t>(w)]) continue;
        seen[static_cast<std::size_t>(w)] = true;
        parent_edge[static_cast<std::size_t>(w)] = e;
        tree[static_cast<std::size_t>(e)] = true;
        queue.push_back(w);
      }
    }
  }
  // Chain of the tree path from x up to its root.
  auto add_path_to_root = [&](std::vector<std::int64_t>& chain, int x, int factor) {
    while (parent_edge[static_cast<std::size_t>(x)] >= 0) {
      int e = parent_edge[static_cast<std::size_t>(x)];
      const auto& ed = c.edges[static_cast<std::size_t>(e)];
      int up = ed.u == x ? ed.v : ed.u;
      chain[static_cast<std::size_t>(e)] += factor * (ed.u == x ? 1 : -1);
      x = up;
    }
  };
  std::vector<std::vector<std::int64_t>> basis;
  for (int e = 0; e < c.edge_count(); ++e) {
    const auto& ed = c.edges[static_cast<std::size_t>(e)];
    if (tree[static_cast<std::size_t>(e)] || !in[static_cast<std::size_t>(ed.u)] || !in[static_cast<std::size_t>(ed.v)]) continue;
    std::vector<std::int64_t> chain(c.edges.size(), 0);
    chain[static_cast<std::size_t>(e)] += 1;
    add_path_to_root(chain, ed.v, 1);
    add_path_to_root(chain, ed.u, -1);
    basis.push_back(std::move(chain));
  }
  return basis;
}

AbelianInvariants quotient_by_subdomain(const SurfaceComplex& c, std::span<const int> sub) {
  if (connected_components(c).size() != 1) throw Error(ErrorCode::kDisconnectedComplex, "quotient requires a connected complex");
  if (sub.empty()) throw Error(ErrorCode::kInvalidInput, "empty vertex subset");
  if (induced_components(c, sub).size() != 1) throw Error(ErrorCode::kDisconnectedSubset, "subdomain must be connected");
  IntMatrix rel = boundary_matrix_2(c);
  auto cycles = induced_cycle_basis(c, sub);
  for (std::size_t e = 0; e < rel.size(); ++e)
    for (const auto& z : cycles) rel[e].push_back(z[e]);
  AbelianInvariants out;
  std::size_t relation_rank = 0;
  if (!rel.empty() && !rel.front().empty()) {
    auto form = smith_normal_form(rel);
    relation_rank = form.rank;
    out.torsion = torsion_factors(form);
  }
  out.rank = c.edge_count() - (c.vertex_count - 1) - static_cast<int>(relation_rank);
  return out;
}

std::vector<std::vector<std::int64_t>> relative_cocycle_basis(const SurfaceComplex& c,
                                                              std::span<const int> edge_support,
                                                              std::span<const int> vertex_support,
                                                              Coefficients coeffs) {
  const std::size_t m = edge_support.size();
  std::vector<int> local(c.edges.size(), -1);
  for (std::size_t i = 0; i < m; ++i) local.at(static_cast<std::size_t>(edge_support[i])) = static_cast<int>(i);

  IntMatrix face_rows;
  for (int f = 0; f < c.face_count(); ++f) {
    std::vector<std::int64_t> row(m, 0);
    bool touches = false;
    for (const auto& s : face_boundary(c, f).steps) {
      int li = local[static_cast<std::size_t>(s.edge)];
      if (li < 0) continue;
      row[static_cast<std::size_t>(li)] += s.sign;
      touches = true;
    }
    if (touches) face_rows.push_back(std::move(row));
  }
  std::vector<std::vector<std::int64_t>> coboundaries;
  for (int v : vertex_support) {
    std::vector<std::int64_t> d(m, 0);
    for (int e = 0; e < c.edge_count(); ++e) {
      const auto& ed = c.edges[static_cast<std::size_t>(e)];
      if (ed.u != v && ed.v != v) continue;
      int li = local[static_cast<std::size_t>(e)];
      if (li < 0) throw Error(ErrorCode::kInvalidInput, "edge support must contain all edges at supported vertices");
      d[static_cast<std::size_t>(li)] += (ed.v == v ? 1 : 0) - (ed.u == v ? 1 : 0);
    }
    coboundaries.push_back(std::move(d));
  }

  auto expand = [&](const std::vector<std::int64_t>& local_vec) {
    std::vector<std::int64_t> full(c.edges.size(), 0);
    for (std::size_t i = 0; i < m; ++i) full[static_cast<std::size_t>(edge_support[i])] = local_vec[i];
    auto it = std::find_if(full.begin(), full.end(), [](std::int64_t x) { return x != 0; });
    if (it != full.end() && *it < 0)
      for (auto& x : full) x = -x;
    return full;
  };

  std::vector<std::vector<std::int64_t>> out;
  if (m == 0) return out;

  if (coeffs == Coefficients::kMod2) {
    Gf2Matrix rows;
    for (const auto& r : face_rows) {
      std::vector<std::uint8_t> b(m);
      for (std::size_t j = 0; j < m; ++j) b[j] = static_cast<std::uint8_t>(r[j] & 1);
      rows.push_back(std::move(b));
    }
    std::vector<std::vector<std::uint8_t>> kernel;
    if (rows.empty()) {
      for (std::size_t j = 0; j < m; ++j) {
        std::vector<std::uint8_t> v(m, 0);
        v[j] = 1;
        kernel.push_back(std::move(v));
      }
    } else {
      kernel = gf2_kernel(rows, m);
    }
    std::vector<std::vector<std::uint8_t>> exact;
    for (const auto& d : coboundaries) {
      std::vector<std::uint8_t> b(m);
      for (std::size_t j = 0; j < m; ++j) b[j] = static_cast<std::uint8_t>(d[j] & 1);
      exact.push_back(std::move(b));
    }
    for (const auto& v : gf2_extend_basis(exact, kernel)) {
      std::vector<std::int64_t> w(v.begin(), v.end());
      out.push_back(expand(w));
    }
    return out;
  }

  // Integer kernel of the face constraints: trailing columns of V in U F V = D.
  std::size_t face_rank = 0;
  BigMatrix v_mat, v_inv;
  if (face_rows.empty()) {
    v_mat.assign(m, std::vector<BigInt>(m, 0));
    for (std::size_t i = 0; i < m; ++i) v_mat[i][i] = 1;
    v_inv = v_mat;
  } else {
    auto form = smith_normal_form(face_rows, true);
    face_rank = form.rank;
    v_mat = std::move(form.right);
    v_inv = std::move(form.right_inverse);
  }
  const std::size_t r = m - face_rank;
  if (r == 0) return out;
  // Coordinates of each coboundary in the kernel basis.
  IntMatrix coords(r, std::vector<std::int64_t>(coboundaries.size(), 0));
  for (std::size_t col = 0; col < coboundaries.size(); ++col) {
    for (std::size_t i = 0; i < r; ++i) {
      BigInt acc = 0;
      const auto& row = v_inv[face_rank + i];
      for (std::size_t j = 0; j < m; ++j)
        if (coboundaries[col][j] != 0) acc += row[j] * coboundaries[col][j];
      coords[i][col] = to_int64(acc);
    }
  }
  std::size_t exact_rank = 0;
  BigMatrix left_inv;
  if (coboundaries.empty()) {
    left_inv.assign(r, std::vector<BigInt>(r, 0));
    for (std::size_t i = 0; i < r; ++i) left_inv[i][i] = 1;
  } else {
    auto form = smith_normal_form(coords, true);
    exact_rank = form.rank;
    left_inv = std::move(form.left_inverse);
  }
  for (std::size_t g = exact_rank; g < r; ++g) {
    std::vector<std::int64_t> local_vec(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
      BigInt acc = 0;
      for (std::size_t i = 0; i < r; ++i)
        if (left_inv[i][g] != 0) acc += v_mat[j][face_rank + i] * left_inv[i][g];
      local_vec[j] = to_int64(acc);
    }
    out.push_back(expand(local_vec));
  }
  return out;
}

std::vector<std::vector<std::int64_t>> cohomology_basis(const SurfaceComplex& c, Coefficients coeffs) {
  std::vector<int> edges(c.edges.size());
  std::iota(edges.begin(), edges.end(), 0);
  std::vector<int> vertices(static_cast<std::size_t>(c.vertex_count));
  std::iota(vertices.begin(), vertices.end(), 0);
  return relative_cocycle_basis(c, edges, vertices, coeffs);
}

std::int64_t evaluate_cochain(std::span<const std::int64_t> cochain, std::span<const std::int64_t> chain) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < cochain.size() && i < chain.size(); ++i) acc += cochain[i] * chain[i];
  return acc;
}

bool is_closed_cochain(const SurfaceComplex& c, std::span<const std::int64_t> cochain, Coefficients coeffs) {
  for (int f = 0; f < c.face_count(); ++f) {
    std::int64_t acc = 0;
    for (const auto& s : face_boundary(c, f).steps) acc += s.sign * cochain[static_cast<std::size_t>(s.edge)];
    if (coeffs == Coefficients::kMod2 ? (acc % 2 != 0) : (acc != 0)) return false;
  }
  return true;
}

}  // namespace nodalcover
