#include "nodalcover/cover.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>

#include "nodalcover/error.hpp"

namespace nodalcover {
namespace {

std::vector<std::int64_t> tree_potential(const SurfaceComplex& base, const std::vector<bool>& tree,
                                         std::span<const std::int64_t> cochain) {
  auto adj = vertex_adjacency(base);
  std::vector<std::int64_t> phi(static_cast<std::size_t>(base.vertex_count), 0);
  std::vector<bool> seen(static_cast<std::size_t>(base.vertex_count), false);
  std::deque<int> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (auto [w, e] : adj[static_cast<std::size_t>(x)]) {
      if (!tree[static_cast<std::size_t>(e)] || seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      const auto& ed = base.edges[static_cast<std::size_t>(e)];
      std::int64_t val = cochain[static_cast<std::size_t>(e)];
      phi[static_cast<std::size_t>(w)] = phi[static_cast<std::size_t>(x)] + (ed.u == x ? val : -val);
      queue.push_back(w);
    }
  }
  return phi;
}

// Gauge-fixed value of the cochain on each edge; zero on tree edges.
std::vector<std::int64_t> gauged(const SurfaceComplex& base, const std::vector<bool>& tree,
                                 std::span<const std::int64_t> cochain) {
  if (cochain.size() != base.edges.size()) throw Error(ErrorCode::kInvalidInput, "cochain length must equal edge count");
  auto phi = tree_potential(base, tree, cochain);
  std::vector<std::int64_t> out(base.edges.size(), 0);
  for (std::size_t e = 0; e < base.edges.size(); ++e) {
    const auto& ed = base.edges[e];
    out[e] = cochain[e] + phi[static_cast<std::size_t>(ed.u)] - phi[static_cast<std::size_t>(ed.v)];
  }
  return out;
}

}  // namespace

CoverSpec trivial_spec(const SurfaceComplex& base, int degree) {
  if (degree < 1) throw Error(ErrorCode::kInvalidParams, "degree must be positive");
  return {degree, canonical_spanning_tree(base), {}};
}

void validate(const SurfaceComplex& base, const CoverSpec& spec) {
  if (spec.degree < 1) throw Error(ErrorCode::kInvalidInput, "degree must be positive");
  if (spec.tree.size() != base.edges.size()) throw Error(ErrorCode::kInvalidInput, "tree flags must cover every edge");
  int count = static_cast<int>(std::count(spec.tree.begin(), spec.tree.end(), true));
  if (count != base.vertex_count - 1) throw Error(ErrorCode::kInvalidInput, "tree must have |V|-1 edges");
  std::vector<int> parent(static_cast<std::size_t>(base.vertex_count));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    return v;
  };
  for (std::size_t e = 0; e < base.edges.size(); ++e) {
    if (!spec.tree[e]) continue;
    int a = find(base.edges[e].u), b = find(base.edges[e].v);
    if (a == b) throw Error(ErrorCode::kInvalidInput, "tree contains a cycle");
    parent[static_cast<std::size_t>(a)] = b;
  }
  for (const auto& [e, p] : spec.voltages) {
    if (e < 0 || e >= base.edge_count()) throw Error(ErrorCode::kInvalidInput, "voltage on unknown edge " + std::to_string(e));
    if (!is_permutation(p, spec.degree)) throw Error(ErrorCode::kInvalidInput, "voltage on edge " + std::to_string(e) + " is not a permutation");
    if (spec.tree[static_cast<std::size_t>(e)] && !is_identity(p))
      throw Error(ErrorCode::kInvalidInput, "tree edge " + std::to_string(e) + " carries a voltage");
  }
}

Perm voltage(const CoverSpec& spec, int edge) {
  auto it = spec.voltages.find(edge);
  return it == spec.voltages.end() ? identity_perm(spec.degree) : it->second;
}

std::vector<int> generator_numbers(const std::vector<bool>& tree) {
  std::vector<int> out(tree.size(), 0);
  int g = 0;
  for (std::size_t e = 0; e < tree.size(); ++e)
    if (!tree[e]) out[e] = ++g;
  return out;
}

Cover build_cover(const SurfaceComplex& base, const CoverSpec& spec) {
  validate(base, spec);
  const int n = spec.degree;
  const int nv = base.vertex_count, ne = base.edge_count(), nf = base.face_count();
  std::vector<Perm> sigma(base.edges.size()), sigma_inv(base.edges.size());
  for (int e = 0; e < ne; ++e) {
    sigma[static_cast<std::size_t>(e)] = voltage(spec, e);
    sigma_inv[static_cast<std::size_t>(e)] = inverse(sigma[static_cast<std::size_t>(e)]);
  }

  Cover cov;
  cov.degree = n;
  cov.base_vertices = nv;
  cov.base_edges = ne;
  cov.base_faces = nf;
  auto& t = cov.total;
  t.vertex_count = nv * n;
  t.mass.reserve(static_cast<std::size_t>(nv * n));
  for (int s = 0; s < n; ++s) t.mass.insert(t.mass.end(), base.mass.begin(), base.mass.end());
  if (!base.coords.empty())
    for (int s = 0; s < n; ++s) t.coords.insert(t.coords.end(), base.coords.begin(), base.coords.end());
  t.edges.reserve(static_cast<std::size_t>(ne * n));
  for (int s = 0; s < n; ++s)
    for (int e = 0; e < ne; ++e) {
      const auto& ed = base.edges[static_cast<std::size_t>(e)];
      t.edges.push_back({s * nv + ed.u, sigma[static_cast<std::size_t>(e)][static_cast<std::size_t>(s)] * nv + ed.v, ed.weight});
    }
  for (int s = 0; s < n; ++s)
    for (int e : base.infinity_edges) t.infinity_edges.push_back(s * ne + e);

  std::vector<FaceBoundary> walks;
  for (int f = 0; f < nf; ++f) walks.push_back(face_boundary(base, f));
  t.faces.resize(static_cast<std::size_t>(nf * n));
  for (int f = 0; f < nf; ++f) {
    for (int s0 = 0; s0 < n; ++s0) {
      int s = s0;
      std::vector<int> lifted;
      for (const auto& step : walks[static_cast<std::size_t>(f)].steps) {
        if (step.sign > 0) {
          lifted.push_back(s * ne + step.edge);
          s = sigma[static_cast<std::size_t>(step.edge)][static_cast<std::size_t>(s)];
        } else {
          s = sigma_inv[static_cast<std::size_t>(step.edge)][static_cast<std::size_t>(s)];
          lifted.push_back(s * ne + step.edge);
        }
      }
      if (s != s0) throw Error(ErrorCode::kFaceVoltageNontrivial, "boundary voltage of face " + std::to_string(f) + " is not the identity");
      t.faces[static_cast<std::size_t>(s0 * nf + f)] = std::move(lifted);
    }
  }
  t.orientation = base.orientation;
  if (base.has_faces()) t.orientation = detect_orientation(t);

  cov.monodromy.degree = n;
  for (int e = 0; e < ne; ++e)
    if (!spec.tree[static_cast<std::size_t>(e)]) cov.monodromy.perms.push_back(sigma[static_cast<std::size_t>(e)]);
  cov.connected = is_transitive(cov.monodromy);
  return cov;
}

std::vector<std::vector<int>> preimage_components(const Cover& cov, std::span<const int> sub) {
  SurfaceComplex base_graph;
  base_graph.vertex_count = cov.base_vertices;
  for (int e = 0; e < cov.base_edges; ++e) {
    const auto& ed = cov.total.edges[static_cast<std::size_t>(e)];
    base_graph.edges.push_back({cov.project_vertex(ed.u), cov.project_vertex(ed.v), ed.weight});
  }
  if (sub.empty() || induced_components(base_graph, sub).size() != 1)
    throw Error(ErrorCode::kDisconnectedInput, "base subset must be nonempty and connected");
  std::vector<int> lifted;
  lifted.reserve(sub.size() * static_cast<std::size_t>(cov.degree));
  for (int s = 0; s < cov.degree; ++s)
    for (int v : sub) lifted.push_back(cov.vertex(v, s));
  return induced_components(cov.total, lifted);
}

std::vector<Word> subdomain_group(const SurfaceComplex& base, const std::vector<bool>& base_tree,
                                  std::span<const int> sub, int basepoint) {
  if (std::find(sub.begin(), sub.end(), basepoint) == sub.end())
    throw Error(ErrorCode::kBasepointOutside, "basepoint " + std::to_string(basepoint) + " is not in the subset");
  if (induced_components(base, sub).size() != 1) throw Error(ErrorCode::kDisconnectedSubset, "subset must be connected");
  if (base_tree.size() != base.edges.size()) throw Error(ErrorCode::kInvalidInput, "tree flags must cover every edge");
  auto gen = generator_numbers(base_tree);
  std::vector<bool> in(static_cast<std::size_t>(base.vertex_count), false);
  for (int v : sub) in[static_cast<std::size_t>(v)] = true;
  auto adj = vertex_adjacency(base);
  // Letters read along the tree path from the basepoint to each vertex.
  std::vector<Word> path(static_cast<std::size_t>(base.vertex_count));
  std::vector<bool> seen(static_cast<std::size_t>(base.vertex_count), false);
  std::vector<bool> local_tree(base.edges.size(), false);
  auto letter = [&](int e, int from) {
    int g = gen[static_cast<std::size_t>(e)];
    if (g == 0) return 0;
    return base.edges[static_cast<std::size_t>(e)].u == from ? g : -g;
  };
  seen[static_cast<std::size_t>(basepoint)] = true;
  std::deque<int> queue{basepoint};
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (auto [w, e] : adj[static_cast<std::size_t>(x)]) {
      if (!in[static_cast<std::size_t>(w)] || seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      local_tree[static_cast<std::size_t>(e)] = true;
      path[static_cast<std::size_t>(w)] = path[static_cast<std::size_t>(x)];
      if (int l = letter(e, x)) path[static_cast<std::size_t>(w)].push_back(l);
      queue.push_back(w);
    }
  }
  std::vector<Word> out;
  for (int e = 0; e < base.edge_count(); ++e) {
    const auto& ed = base.edges[static_cast<std::size_t>(e)];
    if (local_tree[static_cast<std::size_t>(e)] || !in[static_cast<std::size_t>(ed.u)] || !in[static_cast<std::size_t>(ed.v)]) continue;
    Word w = path[static_cast<std::size_t>(ed.u)];
    if (int l = letter(e, ed.u)) w.push_back(l);
    auto back = invert(path[static_cast<std::size_t>(ed.v)]);
    w.insert(w.end(), back.begin(), back.end());
    out.push_back(free_reduce(std::move(w)));
  }
  return out;
}

CoverSpec cyclic_spec_from_cochain(const SurfaceComplex& base, const std::vector<bool>& tree,
                                   std::span<const std::int64_t> cochain, int degree) {
  if (degree < 1) throw Error(ErrorCode::kInvalidParams, "degree must be positive");
  CoverSpec spec{degree, tree, {}};
  auto w = gauged(base, tree, cochain);
  for (int e = 0; e < base.edge_count(); ++e) {
    if (tree[static_cast<std::size_t>(e)]) continue;
    auto p = cycle_power(degree, w[static_cast<std::size_t>(e)]);
    if (!is_identity(p)) spec.voltages[e] = std::move(p);
  }
  return spec;
}

CoverSpec abelian_spec_from_cochains(const SurfaceComplex& base, const std::vector<bool>& tree,
                                     const std::vector<std::vector<std::int64_t>>& cochains,
                                     const std::vector<int>& orders) {
  if (cochains.size() != orders.size()) throw Error(ErrorCode::kInvalidParams, "one order per cochain required");
  auto regular = regular_abelian_action(orders);
  CoverSpec spec{regular.degree, tree, {}};
  std::vector<std::vector<std::int64_t>> w;
  for (const auto& c : cochains) w.push_back(gauged(base, tree, c));
  for (int e = 0; e < base.edge_count(); ++e) {
    if (tree[static_cast<std::size_t>(e)]) continue;
    Perm p = identity_perm(regular.degree);
    for (std::size_t i = 0; i < orders.size(); ++i) {
      std::int64_t k = ((w[i][static_cast<std::size_t>(e)] % orders[i]) + orders[i]) % orders[i];
      for (std::int64_t j = 0; j < k; ++j) p = compose(p, regular.perms[i]);
    }
    if (!is_identity(p)) spec.voltages[e] = std::move(p);
  }
  return spec;
}

std::vector<int> lift_edges(const Cover& cov, std::span<const int> edges, int sheet) {
  if (sheet < 0 || sheet >= cov.degree) throw Error(ErrorCode::kIndexOutOfRange, "sheet out of range");
  std::vector<int> out;
  for (int e : edges) out.push_back(sheet * cov.base_edges + e);
  return out;
}

long long Tower::composite_degree(int k) const {
  long long d = 1;
  for (int i = 0; i < k; ++i) d *= levels.at(static_cast<std::size_t>(i)).degree;
  return d;
}

Tower build_tower(const SurfaceComplex& base, const std::vector<CoverSpec>& specs) {
  Tower t;
  t.base = base;
  t.specs = specs;
  std::vector<int> id(static_cast<std::size_t>(base.vertex_count));
  std::iota(id.begin(), id.end(), 0);
  t.to_base.push_back(id);
  for (const auto& spec : specs) {
    const SurfaceComplex& below = t.level(t.height());
    Cover cov = build_cover(below, spec);
    std::vector<int> proj(static_cast<std::size_t>(cov.total.vertex_count));
    for (int x = 0; x < cov.total.vertex_count; ++x)
      proj[static_cast<std::size_t>(x)] = t.to_base.back()[static_cast<std::size_t>(cov.project_vertex(x))];
    t.levels.push_back(std::move(cov));
    t.to_base.push_back(std::move(proj));
  }
  return t;
}

Tower doubling_tower(const SurfaceComplex& base, std::vector<int> cut, int height) {
  if (height < 0) throw Error(ErrorCode::kInvalidParams, "height must be nonnegative");
  Tower t;
  t.base = base;
  std::vector<int> id(static_cast<std::size_t>(base.vertex_count));
  std::iota(id.begin(), id.end(), 0);
  t.to_base.push_back(id);
  for (int k = 0; k < height; ++k) {
    const SurfaceComplex& below = t.level(k);
    std::vector<std::int64_t> w(below.edges.size(), 0);
    for (int e : cut) w.at(static_cast<std::size_t>(e)) = 1;
    if (!is_closed_cochain(below, w, Coefficients::kIntegers)) throw Error(ErrorCode::kInvalidInput, "cut is not a closed cochain");
    auto spec = cyclic_spec_from_cochain(below, canonical_spanning_tree(below), w, 2);
    Cover cov = build_cover(below, spec);
    if (!cov.connected) throw Error(ErrorCode::kInvalidInput, "cut does not define a connected double cover");
    cut = lift_edges(cov, cut, 0);
    std::vector<int> proj(static_cast<std::size_t>(cov.total.vertex_count));
    for (int x = 0; x < cov.total.vertex_count; ++x)
      proj[static_cast<std::size_t>(x)] = t.to_base.back()[static_cast<std::size_t>(cov.project_vertex(x))];
    t.specs.push_back(std::move(spec));
    t.levels.push_back(std::move(cov));
    t.to_base.push_back(std::move(proj));
  }
  return t;
}

double fiber_diameter(const Tower& t, int k, int x0) {
  if (k < 0 || k > t.height()) throw Error(ErrorCode::kIndexOutOfRange, "level " + std::to_string(k) + " outside tower");
  if (x0 < 0 || x0 >= t.base.vertex_count) throw Error(ErrorCode::kIndexOutOfRange, "base vertex out of range");
  const auto& m = t.level(k);
  const auto& proj = t.to_base[static_cast<std::size_t>(k)];
  std::vector<int> fiber;
  for (int x = 0; x < m.vertex_count; ++x)
    if (proj[static_cast<std::size_t>(x)] == x0) fiber.push_back(x);
  auto adj = vertex_adjacency(m);
  const double inf = std::numeric_limits<double>::infinity();
  double diameter = 0.0;
  for (int src : fiber) {
    std::vector<double> dist(static_cast<std::size_t>(m.vertex_count), inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[static_cast<std::size_t>(src)] = 0.0;
    heap.push({0.0, src});
    while (!heap.empty()) {
      auto [d, x] = heap.top();
      heap.pop();
      if (d > dist[static_cast<std::size_t>(x)]) continue;
      for (auto [w, e] : adj[static_cast<std::size_t>(x)]) {
        double nd = d + 1.0 / m.edges[static_cast<std::size_t>(e)].weight;
        if (nd < dist[static_cast<std::size_t>(w)]) {
          dist[static_cast<std::size_t>(w)] = nd;
          heap.push({nd, w});
        }
      }
    }
    for (int y : fiber) diameter = std::max(diameter, dist[static_cast<std::size_t>(y)]);
  }
  return diameter;
}

}  // namespace nodalcover
