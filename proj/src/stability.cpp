#include "nodalcover/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "nodalcover/error.hpp"

namespace nodalcover {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Counts in [lower, lambda) or [lower, lambda]; range failures become kUncertifiedRange.
int interval_count(const Spectrum& s, double lower, double lambda, CountMode mode, double margin) {
  try {
    int upper = count_below(s, lambda, mode, margin);
    return lower > 0.0 ? upper - count_below(s, lower, CountMode::kOpen, margin) : upper;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kRangeExceeded) throw Error(ErrorCode::kUncertifiedRange, e.what());
    throw;
  }
}

// Isolation of the eigenvalues within `margin` of lambda, relative to their spread.
double gap_ratio(const Spectrum& s, double lambda, double margin) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, away = lo;
  for (double v : s.values) {
    if (std::abs(v - lambda) <= margin) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    } else {
      away = std::min(away, std::abs(v - lambda));
    }
  }
  if (lo > hi) return 0.0;
  if (!std::isfinite(away)) away = s.complete() ? std::numeric_limits<double>::max() : 0.0;
  return away / std::max(hi - lo, s.cluster_gap);
}

int svd_rank(const MatrixXd& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    double s = svd.singularValues()(i);
    if (s > 0.01 * tol && s < 100.0 * tol)
      throw Error(ErrorCode::kRankAmbiguous, "singular value " + std::to_string(s) + " near tolerance " + std::to_string(tol));
    if (s > tol) ++r;
  }
  return r;
}

// Orthonormal basis of the column space, dropping directions below tol * largest.
MatrixXd orth(const MatrixXd& m, double tol) {
  if (m.cols() == 0) return MatrixXd(m.rows(), 0);
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinU);
  const double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int r = top > 0.0 ? svd_rank(m / top, tol) : 0;
  return svd.matrixU().leftCols(r);
}

// Null space of m via SVD.
MatrixXd null_space(const MatrixXd& m, double tol) {
  if (m.cols() == 0) return MatrixXd(0, 0);
  if (m.rows() == 0) return MatrixXd::Identity(m.cols(), m.cols());
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullV);
  int r = svd_rank(m, tol);
  return svd.matrixV().rightCols(m.cols() - r);
}

struct SpectralSplit {
  MatrixXd negative, null;
};

SpectralSplit split(const MatrixXd& a, double tol) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  const double t = tol * scale;
  std::vector<Eigen::Index> neg, nul;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double v = es.eigenvalues()(i);
    if (std::abs(v) > 0.01 * t && std::abs(v) < 100.0 * t)
      throw Error(ErrorCode::kRankAmbiguous, "eigenvalue " + std::to_string(v) + " near zero tolerance");
    if (v < -t)
      neg.push_back(i);
    else if (std::abs(v) <= t)
      nul.push_back(i);
  }
  SpectralSplit s{MatrixXd(a.rows(), static_cast<Eigen::Index>(neg.size())), MatrixXd(a.rows(), static_cast<Eigen::Index>(nul.size()))};
  for (std::size_t j = 0; j < neg.size(); ++j) s.negative.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(neg[j]);
  for (std::size_t j = 0; j < nul.size(); ++j) s.null.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(nul[j]);
  return s;
}

double norm_or_zero(const MatrixXd& m) { return m.size() ? m.norm() : 0.0; }

MatrixXd random_gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal(rng);
  return m;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace

BoundEntry make_bound(std::string name, double claimed, double observed) {
  BoundEntry b{std::move(name), claimed, observed, observed >= claimed, observed == claimed};
  return b;
}

bool all_hold(const BoundLedger& ledger) {
  return std::all_of(ledger.begin(), ledger.end(), [](const BoundEntry& b) { return b.holds; });
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kStable: return "stable";
    case Verdict::kStrictlyUnstable: return "strictly-unstable";
    case Verdict::kWeaklyUnstable: return "weakly-unstable";
    case Verdict::kAmbiguous: return "ambiguous";
  }
  return "ambiguous";
}

Target Target::interval(double lower, double upper) {
  if (!(lower >= 0.0 && upper >= lower)) throw Error(ErrorCode::kInvalidParams, "interval needs 0 <= lower <= upper");
  return Target{lower, upper, -1};
}

Target Target::eigenvalue(int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidParams, "eigenvalue target needs k >= 1");
  return Target{0.0, 0.0, k};
}

std::string Target::label() const {
  if (eigen_index >= 0) return "lambda" + std::to_string(eigen_index);
  return "[" + std::to_string(lower) + ", " + std::to_string(upper) + "]";
}

StabilityReport stability_verdict(const Spectrum& base, const Spectrum& cover, const Target& target, double margin) {
  StabilityReport r;
  r.target = target;
  r.margin = margin;
  r.base_seed = base.seed;
  r.cover_seed = cover.seed;
  r.base_tol = base.tol;
  r.cover_tol = cover.tol;
  double lower = target.lower;
  if (target.eigen_index >= 0) {
    if (target.eigen_index >= base.size())
      throw Error(ErrorCode::kUncertifiedRange, "base spectrum has no eigenvalue " + std::to_string(target.eigen_index));
    r.lambda = base.values[static_cast<std::size_t>(target.eigen_index)];
    lower = 0.0;
  } else {
    r.lambda = target.upper;
  }
  try {
    r.base_open = interval_count(base, lower, r.lambda, CountMode::kOpen, margin);
    r.base_closed = interval_count(base, lower, r.lambda, CountMode::kClosed, margin);
    r.cover_open = interval_count(cover, lower, r.lambda, CountMode::kOpen, margin);
    r.cover_closed = interval_count(cover, lower, r.lambda, CountMode::kClosed, margin);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kAmbiguousCount) throw;
    r.verdict = Verdict::kAmbiguous;
    r.note = e.what();
    return r;
  }
  r.base_multiplicity = r.base_closed - r.base_open;
  r.cover_multiplicity = r.cover_closed - r.cover_open;
  r.ledger.push_back(make_bound("lifted count", r.base_closed, r.cover_closed));
  r.ledger.push_back(make_bound("lifted open count", r.base_open, r.cover_open));
  if (r.cover_open < r.base_open || r.cover_closed < r.base_closed) {
    r.verdict = Verdict::kAmbiguous;
    r.note = "cover count below base count";
  } else if (r.cover_open > r.base_open) {
    r.verdict = Verdict::kStrictlyUnstable;
  } else if (r.cover_closed > r.base_closed) {
    r.gap_ratio = gap_ratio(cover, r.lambda, margin);
    if (r.base_multiplicity > 0) r.gap_ratio = std::min(r.gap_ratio, gap_ratio(base, r.lambda, margin));
    if (r.gap_ratio > kWeakGapRatio) {
      r.verdict = Verdict::kWeaklyUnstable;
    } else {
      r.verdict = Verdict::kAmbiguous;
      r.note = "multiplicity grows but the cluster is not isolated";
    }
  } else {
    r.verdict = Verdict::kStable;
  }
  return r;
}

LiftingReport numberg_check(const SurfaceComplex& base, const Cover& cov, const Spectrum& base_spectrum,
                            const Spectrum& cover_spectrum, const VectorXd& phi, double lambda, double margin,
                            double zero_eps, std::uint64_t seed, int samples) {
  if (cov.base_vertices != base.vertex_count) throw Error(ErrorCode::kInvalidInput, "cover does not match base");
  if (!(lambda > margin)) throw Error(ErrorCode::kInvalidParams, "lambda must exceed the bottom of the spectrum");
  LiftingReport r;
  r.lambda = lambda;
  auto d = nodal_decomposition(base, phi, zero_eps);
  r.base_open = count_below(base_spectrum, lambda, CountMode::kOpen, margin);
  r.cover_open = count_below(cover_spectrum, lambda, CountMode::kOpen, margin);

  const int nc = cov.total.vertex_count;
  const int deg = cov.degree;
  // Component id within the lifts of each domain, per cover vertex.
  std::vector<int> component(static_cast<std::size_t>(nc), -1);
  std::vector<std::vector<int>> sizes;
  for (int i = 0; i < d.count(); ++i) {
    const auto& dom = d.domains[static_cast<std::size_t>(i)];
    auto comps = preimage_components(cov, dom.vertices);
    DomainLift lift;
    lift.domain = i;
    lift.components = static_cast<int>(comps.size());
    const auto& t = dom.topology;
    lift.simply_connected = t.chi == 1 && t.doors + t.exits >= 1;
    for (std::size_t j = 0; j < comps.size(); ++j) {
      lift.sheet_multiplicities.push_back(static_cast<int>(comps[j].size() / dom.vertices.size()));
      for (int x : comps[j]) component[static_cast<std::size_t>(x)] = static_cast<int>(j);
    }
    r.domains.push_back(std::move(lift));
  }

  // Test vectors phi_ij, one column per (domain, component).
  std::vector<std::pair<int, int>> labels;
  for (const auto& l : r.domains)
    for (int j = 0; j < l.components; ++j) labels.emplace_back(l.domain, j);
  MatrixXd tests = MatrixXd::Zero(nc, static_cast<Eigen::Index>(labels.size()));
  for (std::size_t col = 0; col < labels.size(); ++col) {
    auto [i, j] = labels[col];
    const double kij = r.domains[static_cast<std::size_t>(i)].sheet_multiplicities[static_cast<std::size_t>(j)];
    for (int x = 0; x < nc; ++x) {
      const int v = cov.project_vertex(x);
      const double lifted = phi(v);
      const int dom = d.domain_of_vertex[static_cast<std::size_t>(v)];
      double value;
      if (dom == i)
        value = component[static_cast<std::size_t>(x)] == j ? lifted / kij : 0.0;
      else
        value = lifted / deg;
      tests(x, static_cast<Eigen::Index>(col)) = value;
    }
  }
  r.expected_dimension = static_cast<int>(labels.size()) - d.count() + 1;
  {
    Eigen::JacobiSVD<MatrixXd> svd(tests);
    const double top = svd.singularValues()(0);
    r.test_space_dimension = static_cast<int>((svd.singularValues().array() > 1e-9 * top).count());
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  r.integral_samples = samples;
  for (int s = 0; s < samples; ++s) {
    VectorXd psi(base.vertex_count);
    for (auto& x : psi) x = normal(rng);
    double rhs = 0.0, scale = 0.0;
    for (int v = 0; v < base.vertex_count; ++v) {
      rhs += base.mass[static_cast<std::size_t>(v)] * phi(v) * psi(v);
      scale += std::abs(base.mass[static_cast<std::size_t>(v)] * phi(v) * psi(v));
    }
    for (Eigen::Index col = 0; col < tests.cols(); ++col) {
      double lhs = 0.0;
      for (int x = 0; x < nc; ++x) lhs += cov.total.mass[static_cast<std::size_t>(x)] * tests(x, col) * psi(cov.project_vertex(x));
      r.integral_residual = std::max(r.integral_residual, std::abs(lhs - rhs) / std::max(1.0, scale));
    }
  }

  int extra = 0, largest = 0, simple = 0;
  for (const auto& l : r.domains) {
    extra += l.components - 1;
    largest = std::max(largest, l.components - 1);
    if (l.simply_connected) ++simple;
  }
  r.ledger.push_back(make_bound("nodal lifting", r.base_open + extra, r.cover_open));
  r.ledger.push_back(make_bound("largest single domain", r.base_open + largest, r.cover_open));
  r.ledger.push_back(make_bound("simply connected domains", r.base_open + simple * (deg - 1), r.cover_open));
  BoundEntry dim{"test space dimension", static_cast<double>(r.expected_dimension), static_cast<double>(r.test_space_dimension),
                 r.expected_dimension == r.test_space_dimension, true};
  r.ledger.push_back(dim);
  BoundEntry integral{"integral identity residual", 1e-12, r.integral_residual, r.integral_residual <= 1e-12, false};
  r.ledger.push_back(integral);
  return r;
}

int domain_generators(const SurfaceComplex& c, std::span<const int> sub) {
  if (static_cast<int>(sub.size()) == c.vertex_count) {
    auto counts = edge_face_counts(c);
    bool closed = c.has_faces() && std::all_of(counts.begin(), counts.end(), [](int n) { return n == 2; });
    return (closed ? 2 : 1) - euler_characteristic(c);
  }
  return 1 - classify_subsurface(c, sub).chi;
}

SigmaEstimate sigma_upper_bounds(const SurfaceComplex& c, int generator_budget, const SigmaSearch& search) {
  if (generator_budget < 0) throw Error(ErrorCode::kInvalidParams, "generator budget must be nonnegative");
  const auto op = assemble(c, search.kind);
  const auto adj = vertex_adjacency(c);
  const int n = c.vertex_count;
  const int cap = search.max_size > 0 ? std::min(search.max_size, n) : n;
  SigmaEstimate best;
  best.generator_budget = generator_budget;
  best.value = std::numeric_limits<double>::infinity();

  auto ground_state = [&](const std::vector<int>& sub) {
    auto r = restrict_to(op, sub);
    SolverOptions opt;
    opt.count = 1;
    opt.tol = 1e-11;
    auto s = r.dim() <= 400 ? dense_eigenpairs(r, opt) : lowest_eigenpairs(r, opt);
    return std::make_pair(s.values.front(), VectorXd(s.vectors.col(0).cwiseAbs()));
  };

  const int seeds = std::min(std::max(search.max_seeds, 1), n);
  for (int i = 0; i < seeds; ++i) {
    const int start = static_cast<int>(static_cast<long long>(i) * n / seeds);
    std::vector<int> dom{start};
    std::vector<char> in(static_cast<std::size_t>(n), 0);
    in[static_cast<std::size_t>(start)] = 1;
    if (domain_generators(c, dom) > generator_budget) continue;
    while (true) {
      std::vector<int> sorted = dom;
      std::sort(sorted.begin(), sorted.end());
      auto [value, psi] = ground_state(sorted);
      if (value < best.value * (1.0 - 1e-12)) {
        best.value = value;
        best.witness = sorted;
        best.witness_generators = domain_generators(c, sorted);
      }
      if (static_cast<int>(dom.size()) >= cap) break;
      // Flux of the current ground state into each frontier vertex.
      std::vector<std::pair<double, int>> frontier;
      std::vector<double> flux(static_cast<std::size_t>(n), 0.0);
      for (std::size_t k = 0; k < sorted.size(); ++k)
        for (auto [w, e] : adj[static_cast<std::size_t>(sorted[k])])
          if (!in[static_cast<std::size_t>(w)]) flux[static_cast<std::size_t>(w)] += c.edges[static_cast<std::size_t>(e)].weight * psi(static_cast<Eigen::Index>(k));
      for (int w = 0; w < n; ++w)
        if (flux[static_cast<std::size_t>(w)] > 0.0) frontier.emplace_back(-flux[static_cast<std::size_t>(w)], w);
      std::sort(frontier.begin(), frontier.end());
      bool grown = false;
      for (auto [f, w] : frontier) {
        dom.push_back(w);
        if (domain_generators(c, dom) <= generator_budget) {
          in[static_cast<std::size_t>(w)] = 1;
          grown = true;
          break;
        }
        dom.pop_back();
      }
      if (!grown) break;
    }
  }
  if (best.witness.empty()) throw Error(ErrorCode::kInvalidParams, "no vertex is admissible for this budget");
  return best;
}

GeneratorBoundReport numberd_check(const SurfaceComplex& base, const Cover& cov, const Spectrum& cover_spectrum,
                                   const SigmaEstimate& sigma, int min_generators, double margin,
                                   const std::vector<DisjointDomain>& family) {
  GeneratorBoundReport r;
  r.min_generators = min_generators;
  r.generator_budget = sigma.generator_budget;
  r.sigma = sigma.value;
  r.cover_closed = count_below(cover_spectrum, sigma.value, CountMode::kClosed, margin);
  r.witness_components = static_cast<int>(preimage_components(cov, sigma.witness).size());
  r.ledger.push_back(make_bound("generator bound", std::max(min_generators - sigma.generator_budget + 1, 1), r.cover_closed));
  r.ledger.push_back(make_bound("witness lifts", r.witness_components, r.cover_closed));
  if (!family.empty()) {
    std::vector<int> owner(static_cast<std::size_t>(base.vertex_count), -1);
    for (std::size_t i = 0; i < family.size(); ++i)
      for (int v : family[i].vertices) {
        if (owner.at(static_cast<std::size_t>(v)) >= 0) throw Error(ErrorCode::kInvalidInput, "family domains overlap");
        owner[static_cast<std::size_t>(v)] = static_cast<int>(i);
      }
    for (const auto& e : base.edges) {
      int a = owner[static_cast<std::size_t>(e.u)], b = owner[static_cast<std::size_t>(e.v)];
      if (a >= 0 && b >= 0 && a != b) throw Error(ErrorCode::kInvalidInput, "family domains must not be adjacent");
    }
    double top = 0.0;
    int claimed = 0, lifts = 0;
    const auto op = assemble(base);
    for (const auto& dom : family) {
      top = std::max(top, dirichlet_lambda0(op, dom.vertices));
      claimed += std::max(min_generators - dom.generators + 1, 1);
      lifts += static_cast<int>(preimage_components(cov, dom.vertices).size());
    }
    int observed = count_below(cover_spectrum, top, CountMode::kClosed, margin);
    r.ledger.push_back(make_bound("disjoint family", claimed, observed));
    r.ledger.push_back(make_bound("disjoint family lifts", lifts, observed));
  }
  return r;
}

TowerTrajectory tower_experiment(const Tower& t, int index, double roof, double margin, const SolverOptions& opt) {
  if (t.height() < 2) throw Error(ErrorCode::kInvalidParams, "tower needs at least two levels above the base");
  if (index < 0) throw Error(ErrorCode::kInvalidParams, "eigenvalue index must be nonnegative");
  TowerTrajectory r;
  r.index = index;
  r.roof = roof;
  r.margin = margin;
  std::vector<Spectrum> spectra;
  for (int k = 0; k <= t.height(); ++k) {
    const auto& level = t.level(k);
    SolverOptions o = opt;
    o.count = std::min(std::max(opt.count, 2 * index + 4), level.vertex_count);
    if (o.count <= index) throw Error(ErrorCode::kIndexOutOfRange, "level " + std::to_string(k) + " has too few vertices");
    spectra.push_back(lowest_eigenpairs(assemble(level), o));
    TowerLevel entry;
    entry.level = k;
    entry.degree = t.composite_degree(k);
    entry.vertices = level.vertex_count;
    entry.value = spectra.back().values[static_cast<std::size_t>(index)];
    if (k > 0) {
      const double cut = r.levels.back().value;
      try {
        int now = count_below(spectra[static_cast<std::size_t>(k)], cut, CountMode::kOpen, margin);
        int before = count_below(spectra[static_cast<std::size_t>(k - 1)], cut, CountMode::kOpen, margin);
        int bottom = count_below(spectra.front(), cut, CountMode::kOpen, margin);
        entry.stage_unstable = now > before;
        entry.composite_unstable = now > bottom;
        if (*entry.stage_unstable && !*entry.composite_unstable) r.composition_holds = false;
      } catch (const Error&) {
      }
      if (entry.value > r.levels.back().value + margin) r.nonincreasing = false;
    }
    r.levels.push_back(entry);
  }
  for (int k = t.height(); k >= 0 && r.levels[static_cast<std::size_t>(k)].value <= roof + margin; --k) r.entered_at = k;
  BoundEntry roof_entry{"roof", roof + margin, r.levels.back().value, r.levels.back().value <= roof + margin, false};
  r.ledger.push_back(roof_entry);
  BoundEntry comp{"composition", 1.0, r.composition_holds ? 1.0 : 0.0, r.composition_holds, true};
  r.ledger.push_back(comp);
  return r;
}

CountLedger count_experiment(const Presentation& p, int n) {
  CountLedger r;
  r.containment = intermediate_count_check(p, n);
  r.assumption = "every index-" + std::to_string(n) +
                 " subgroup's cover carries a lambda_1-unstable double cover; continuum statement, not recomputed";
  BoundEntry contain{"intermediate containment", static_cast<double>(r.containment.allowed),
                     static_cast<double>(r.containment.max_containment), r.containment.holds,
                     r.containment.max_containment == r.containment.allowed};
  r.ledger.push_back(contain);
  r.ledger.push_back(make_bound("unstable covers of index 2n", r.containment.implied_lower_bound,
                                static_cast<double>(r.containment.subgroups_2n)));
  return r;
}

void validate(const RespecInstance& inst, double tol) {
  const auto& a = inst.a;
  const Eigen::Index n = a.rows();
  if (a.cols() != n || inst.x.rows() != n || inst.y.rows() != n) throw Error(ErrorCode::kInvalidInput, "dimension mismatch");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > tol * scale) throw Error(ErrorCode::kInvalidInput, "matrix is not symmetric");
  MatrixXd xo = orth(inst.x, tol), yo = orth(inst.y, tol);
  if (xo.cols() > 0) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(xo.transpose() * a * xo);
    if (es.eigenvalues().maxCoeff() > tol * scale) throw Error(ErrorCode::kInvalidInput, "form is positive somewhere on X");
  }
  if (norm_or_zero(xo.transpose() * yo) > tol) throw Error(ErrorCode::kInvalidInput, "X and Y are not perpendicular");
  auto s = split(a, tol);
  MatrixXd py = s.negative * (s.negative.transpose() * yo);
  if (norm_or_zero(py - yo * (yo.transpose() * py)) > tol * std::sqrt(static_cast<double>(n)))
    throw Error(ErrorCode::kInvalidInput, "Y is not invariant under the negative projection");
}

RespecInstance random_respec_instance(int n, std::uint64_t seed) {
  if (n < 4) throw Error(ErrorCode::kInvalidParams, "instance dimension must be at least 4");
  std::mt19937_64 rng(seed);
  const int neg = uniform_int(rng, 2, n / 2);
  const int nul = uniform_int(rng, 1, std::max(1, n / 5));
  const int pos = n - neg - nul;
  Eigen::HouseholderQR<MatrixXd> qr(random_gaussian(n, n, rng));
  MatrixXd q = qr.householderQ();
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  VectorXd diag(n);
  for (int i = 0; i < n; ++i) diag(i) = i < neg ? -mag(rng) : (i < neg + nul ? 0.0 : mag(rng));
  RespecInstance inst;
  inst.seed = seed;
  inst.a = q * diag.asDiagonal() * q.transpose();
  inst.a = 0.5 * (inst.a + inst.a.transpose()).eval();
  MatrixXd en = q.leftCols(neg), e0 = q.middleCols(neg, nul), ep = q.rightCols(pos);

  const int y_neg = uniform_int(rng, 0, neg - 1);
  const int y_pos = uniform_int(rng, 0, pos);
  MatrixXd r_neg = random_gaussian(neg, y_neg, rng);
  inst.y.resize(n, y_neg + y_pos);
  if (y_neg > 0) inst.y.leftCols(y_neg) = en * r_neg;
  if (y_pos > 0) inst.y.rightCols(y_pos) = ep * random_gaussian(pos, y_pos, rng);

  // X lives in (H_- minus Y) + H_0, where the form is nonpositive.
  MatrixXd free_neg = y_neg > 0 ? MatrixXd(en * null_space(r_neg.transpose(), 1e-9)) : en;
  MatrixXd w(n, free_neg.cols() + nul);
  w << free_neg, e0;
  const int p = uniform_int(rng, 1, static_cast<int>(w.cols()));
  inst.x = w * random_gaussian(w.cols(), p, rng);
  if (uniform_int(rng, 0, 1) == 1) inst.x.col(0) = e0 * random_gaussian(nul, 1, rng);
  return inst;
}

std::vector<RespecInstance> trivial_respec_instances() {
  MatrixXd a = VectorXd((VectorXd(3) << -1.0, 0.0, 1.0).finished()).asDiagonal();
  MatrixXd id = MatrixXd::Identity(3, 3);
  std::vector<RespecInstance> out;
  out.push_back({a, id.col(0), MatrixXd(3, 0), 0});
  out.push_back({a, id.col(1), MatrixXd(3, 0), 0});
  out.push_back({a, id.leftCols(2), id.col(2), 0});
  return out;
}

RespecRecord respec_check(const RespecInstance& inst, double tol) {
  validate(inst, tol);
  RespecRecord r;
  r.seed = inst.seed;
  const Eigen::Index n = inst.a.rows();
  MatrixXd xo = orth(inst.x, tol), yo = orth(inst.y, tol);
  auto s = split(inst.a, tol);
  r.dim_x = static_cast<int>(xo.cols());
  MatrixXd coeff = s.negative.transpose() * xo;  // P X in negative coordinates
  r.dim_px = svd_rank(coeff, tol);
  MatrixXd off_null = xo - s.null * (s.null.transpose() * xo);
  r.dim_x_null = r.dim_x - svd_rank(off_null, tol);
  r.dim_neg_minus_y = static_cast<int>(s.negative.cols()) - svd_rank(yo.transpose() * s.negative, tol);
  MatrixXd kernel = null_space(coeff, tol);
  r.dim_x_kernel_p = static_cast<int>(kernel.cols());
  r.kernel_null_residual = kernel.cols() ? norm_or_zero(off_null * kernel) : 0.0;
  r.px_y_residual = norm_or_zero(yo.transpose() * (s.negative * coeff));
  r.equality = r.dim_px == r.dim_x - r.dim_x_null;
  r.inequality = r.dim_neg_minus_y >= r.dim_px;
  const double small = 1e3 * tol * std::sqrt(static_cast<double>(n));
  r.pass = r.equality && r.inequality && r.dim_x_kernel_p == r.dim_x_null && r.kernel_null_residual <= small &&
           r.px_y_residual <= small;
  return r;
}

std::vector<WeylPoint> weyl_ratio(const Spectrum& base, const Spectrum& cover, const std::vector<double>& grid, double margin) {
  std::vector<WeylPoint> out;
  for (double lambda : grid) {
    WeylPoint p;
    p.lambda = lambda;
    auto certified = [&](const Spectrum& s) { return s.complete() || (!s.values.empty() && lambda + margin < s.values.back()); };
    p.certified = certified(base) && certified(cover);
    auto count = [&](const Spectrum& s) {
      return static_cast<int>(std::count_if(s.values.begin(), s.values.end(), [&](double v) { return v <= lambda + margin; }));
    };
    p.base = count(base);
    p.cover = count(cover);
    p.ratio = p.base > 0 ? static_cast<double>(p.cover) / p.base : 0.0;
    out.push_back(p);
  }
  return out;
}

}  // namespace nodalcover
