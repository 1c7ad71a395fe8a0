#include "nodalcover/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nodalcover/error.hpp"

namespace nodalcover {
namespace {

double min_abs(const Eigen::MatrixXd& basis, const Eigen::VectorXd& coeff) {
  return (basis * coeff).cwiseAbs().minCoeff();
}

void fix_sign(Eigen::VectorXd& v) {
  double big = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 1e-8 * big) {
      if (v(i) < 0) v = -v;
      return;
    }
}

}  // namespace

NodalDecomposition nodal_decomposition(const SurfaceComplex& c, const Eigen::VectorXd& phi, double eps) {
  if (phi.size() != c.vertex_count) throw Error(ErrorCode::kInvalidInput, "vector length must equal vertex count");
  if (!(eps > 0.0 && eps < 0.1)) throw Error(ErrorCode::kInvalidParams, "zero threshold must lie in (0, 0.1)");
  const double top = phi.cwiseAbs().maxCoeff();
  if (!(top > 0.0)) throw Error(ErrorCode::kAllZeroVector, "vector vanishes identically");
  NodalDecomposition d;
  d.values = phi;
  d.zero_threshold = eps * top;
  std::vector<int> sign(static_cast<std::size_t>(c.vertex_count), 0);
  for (int v = 0; v < c.vertex_count; ++v) {
    if (std::abs(phi(v)) <= d.zero_threshold)
      d.zero_set.push_back(v);
    else
      sign[static_cast<std::size_t>(v)] = phi(v) > 0 ? 1 : -1;
  }
  if (2 * d.zero_set.size() > static_cast<std::size_t>(c.vertex_count))
    throw Error(ErrorCode::kZeroSetTooLarge, std::to_string(d.zero_set.size()) + " of " + std::to_string(c.vertex_count) + " vertices are zero");
  auto adj = vertex_adjacency(c);
  d.domain_of_vertex.assign(static_cast<std::size_t>(c.vertex_count), -1);
  for (int s = 0; s < c.vertex_count; ++s) {
    if (sign[static_cast<std::size_t>(s)] == 0 || d.domain_of_vertex[static_cast<std::size_t>(s)] >= 0) continue;
    NodalDomain dom;
    dom.sign = sign[static_cast<std::size_t>(s)];
    const int id = d.count();
    dom.vertices.push_back(s);
    d.domain_of_vertex[static_cast<std::size_t>(s)] = id;
    for (std::size_t h = 0; h < dom.vertices.size(); ++h)
      for (auto [w, e] : adj[static_cast<std::size_t>(dom.vertices[h])]) {
        if (sign[static_cast<std::size_t>(w)] != dom.sign || d.domain_of_vertex[static_cast<std::size_t>(w)] >= 0) continue;
        d.domain_of_vertex[static_cast<std::size_t>(w)] = id;
        dom.vertices.push_back(w);
      }
    std::sort(dom.vertices.begin(), dom.vertices.end());
    dom.topology = classify_subsurface(c, dom.vertices);
    d.domains.push_back(std::move(dom));
  }
  d.single_sign = std::all_of(d.domains.begin(), d.domains.end(), [&](const NodalDomain& x) { return x.sign == d.domains.front().sign; });
  return d;
}

Eigen::VectorXd canonical_cluster_vector(const Spectrum& s, int cluster_id, std::uint64_t seed) {
  auto members = s.cluster_members(cluster_id);
  if (members.empty()) throw Error(ErrorCode::kClusterNotFound, "no cluster " + std::to_string(cluster_id));
  const Eigen::Index k = static_cast<Eigen::Index>(members.size());
  Eigen::MatrixXd basis(s.vectors.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) basis.col(j) = s.vectors.col(members[static_cast<std::size_t>(j)]);
  Eigen::VectorXd best_coeff = Eigen::VectorXd::Unit(k, 0);
  if (k > 1) {
    std::vector<Eigen::VectorXd> starts;
    for (Eigen::Index j = 0; j < k; ++j) starts.push_back(Eigen::VectorXd::Unit(k, j));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (int i = 0; i < 8 * k; ++i) {
      Eigen::VectorXd v(k);
      for (auto& x : v) x = normal(rng);
      starts.push_back(v.normalized());
    }
    double best = -1.0;
    for (auto coeff : starts) {
      double value = min_abs(basis, coeff);
      for (int sweep = 0; sweep < 30; ++sweep) {
        const double before = value;
        for (Eigen::Index i = 0; i < k; ++i)
          for (Eigen::Index j = i + 1; j < k; ++j) {
            auto rotate = [&](double th) {
              Eigen::VectorXd t = coeff;
              t(i) = std::cos(th) * coeff(i) - std::sin(th) * coeff(j);
              t(j) = std::sin(th) * coeff(i) + std::cos(th) * coeff(j);
              return t;
            };
            double center = 0.0, step = std::numbers::pi / 180.0, pick = 0.0;
            for (int round = 0; round < 3; ++round) {
              for (int t = -180; t <= 180; ++t) {
                if (round > 0 && std::abs(t) > 20) continue;
                double th = center + t * step;
                double val = min_abs(basis, rotate(th));
                if (val > value * (1.0 + 1e-12)) {
                  value = val;
                  pick = th;
                }
              }
              center = pick;
              step /= 20.0;
            }
            if (pick != 0.0) coeff = rotate(pick);
          }
        if (value <= before * (1.0 + 1e-12)) break;
      }
      if (value > best * (1.0 + 1e-9)) {
        best = value;
        best_coeff = coeff;
      }
    }
  }
  Eigen::VectorXd v = basis * best_coeff;
  fix_sign(v);
  return v;
}

NodalCountBound nodal_count_bound_data(const SurfaceComplex& c, const NodalDecomposition& d) {
  if (d.count() < 2 || d.single_sign) throw Error(ErrorCode::kSingleDomain, "bound needs at least two nodal domains");
  NodalCountBound b;
  b.domain_count = d.count();
  b.surface_chi = euler_characteristic(c);
  for (int i = 0; i < d.count(); ++i) {
    int chi = d.domains[static_cast<std::size_t>(i)].topology.chi;
    if (b.best_domain < 0 || chi > b.best_chi) {
      b.best_domain = i;
      b.best_chi = chi;
    }
  }
  b.lower_holds = static_cast<double>(b.surface_chi) / b.domain_count <= b.best_chi;
  b.upper_holds = b.best_chi <= 1;
  auto counts = edge_face_counts(c);
  b.closed = c.has_faces() && std::all_of(counts.begin(), counts.end(), [](int n) { return n == 2; });
  b.surface_generators = b.closed ? 2 - b.surface_chi : 1 - b.surface_chi;
  b.coset_generator_bound = b.closed ? b.surface_generators / 2.0 : (b.surface_generators + 1) / 2.0;
  return b;
}

int mu_formula(int genus, int doors, int exits, bool orientable) {
  if (genus < 0 || doors < 1 || exits < 0 || (!orientable && genus < 1))
    throw Error(ErrorCode::kInvalidSignature, "need g >= 0 (>= 1 if non-orientable), k >= 1, l >= 0");
  int mu = (orientable ? 2 * genus : genus) + doors - 1 + std::max(exits - 1, 0);
  int chi = 2 - (orientable ? 2 * genus : genus) - doors - exits;
  if (mu != -chi + (exits == 0 ? 1 : 0)) throw Error(ErrorCode::kInvalidSignature, "inconsistent signature");
  return mu;
}

CocycleSet intersection_cocycles(const SurfaceComplex& c, const NodalDecomposition& d, int u) {
  if (u < 0 || u >= d.count()) throw Error(ErrorCode::kIndexOutOfRange, "domain index out of range");
  const auto& dom = d.domains[static_cast<std::size_t>(u)];
  std::vector<bool> in_u(static_cast<std::size_t>(c.vertex_count), false);
  for (int v : dom.vertices) in_u[static_cast<std::size_t>(v)] = true;
  std::vector<int> rest;
  for (int v = 0; v < c.vertex_count; ++v)
    if (!in_u[static_cast<std::size_t>(v)]) rest.push_back(v);
  if (rest.empty()) throw Error(ErrorCode::kInvalidInput, "domain has empty complement");
  Coefficients coeffs = c.orientation == Orientability::kNonOrientable ? Coefficients::kMod2 : Coefficients::kIntegers;
  CocycleSet out;
  for (auto& comp : induced_components(c, rest)) {
    std::vector<bool> in_v(static_cast<std::size_t>(c.vertex_count), false);
    for (int v : comp) in_v[static_cast<std::size_t>(v)] = true;
    std::vector<int> support;
    for (int e = 0; e < c.edge_count(); ++e) {
      const auto& ed = c.edges[static_cast<std::size_t>(e)];
      if (in_v[static_cast<std::size_t>(ed.u)] || in_v[static_cast<std::size_t>(ed.v)]) support.push_back(e);
    }
    auto basis = relative_cocycle_basis(c, support, comp, coeffs);
    const int index = static_cast<int>(out.components.size());
    out.components.push_back({comp, static_cast<int>(basis.size())});
    for (auto& w : basis) out.cocycles.push_back({index, std::move(w), coeffs});
  }
  return out;
}

UnstableCoverPlan unstable_cover_plan(const SurfaceComplex& c, const NodalDecomposition& d, int u, int degree) {
  if (degree < 2) throw Error(ErrorCode::kInvalidParams, "degree must be at least 2");
  auto set = intersection_cocycles(c, d, u);
  if (set.cocycles.empty()) throw Error(ErrorCode::kNoCocycle, "complement of domain " + std::to_string(u) + " carries no cocycle");
  if (set.cocycles.front().coefficients == Coefficients::kMod2 && degree != 2)
    throw Error(ErrorCode::kInvalidParams, "mod-2 cocycles only define double covers");
  auto tree = canonical_spanning_tree(c);
  for (std::size_t i = 0; i < set.cocycles.size(); ++i) {
    auto spec = cyclic_spec_from_cochain(c, tree, set.cocycles[i].values, degree);
    auto cov = build_cover(c, spec);
    if (!cov.connected) continue;
    UnstableCoverPlan plan;
    plan.degree = degree;
    plan.domain = u;
    plan.cocycle_index = static_cast<int>(i);
    plan.cocycles_available = static_cast<int>(set.cocycles.size());
    plan.mu_used = 1;
    plan.predicted_increase = degree - 1;
    plan.coefficients = set.cocycles[i].coefficients;
    plan.spec = std::move(spec);
    return plan;
  }
  throw Error(ErrorCode::kNoCocycle, "no cocycle of domain " + std::to_string(u) + " defines a connected cover");
}

}  // namespace nodalcover
