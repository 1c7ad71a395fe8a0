#include "nodalcover/spectra.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>

#include "nodalcover/error.hpp"

namespace nodalcover {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

SparseMatrix standard_form(const LaplaceOperator& op) {
  VectorXd s = op.mass.cwiseSqrt().cwiseInverse();
  SparseMatrix a = s.asDiagonal() * op.stiffness * s.asDiagonal();
  SparseMatrix at = a.transpose();
  a = 0.5 * (a + at);
  a.prune(0.0);
  return a;
}

// Appends the columns of `cand` to the orthonormal block `basis`, dropping
// directions that are numerically dependent. Two Gram-Schmidt passes.
MatrixXd extend_orthonormal(const MatrixXd& basis, const MatrixXd& cand) {
  MatrixXd out(basis.rows(), basis.cols() + cand.cols());
  out.leftCols(basis.cols()) = basis;
  Eigen::Index k = basis.cols();
  for (Eigen::Index j = 0; j < cand.cols(); ++j) {
    VectorXd v = cand.col(j);
    double start = v.norm();
    if (start == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) v -= out.leftCols(k) * (out.leftCols(k).transpose() * v);
    double len = v.norm();
    if (len <= 1e-10 * start) continue;
    out.col(k++) = v / len;
  }
  return out.leftCols(k);
}

void normalize_signs(MatrixXd& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    double big = v.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > 1e-8 * big) {
        if (v(i, j) < 0) v.col(j) *= -1.0;
        break;
      }
    }
  }
}

Spectrum finish(const SparseMatrix& a, const LaplaceOperator& op, const VectorXd& theta, MatrixXd x, int m,
                const SolverOptions& opt, int iterations) {
  Spectrum s;
  s.dimension = op.dim();
  s.seed = opt.seed;
  s.tol = opt.tol;
  s.iterations = iterations;
  x = x.leftCols(m).eval();
  MatrixXd r = a * x - x * theta.head(m).asDiagonal();
  VectorXd inv_sqrt = op.mass.cwiseSqrt().cwiseInverse();
  s.vectors = inv_sqrt.asDiagonal() * x;
  normalize_signs(s.vectors);
  for (int i = 0; i < m; ++i) {
    s.values.push_back(theta(i));
    s.residuals.push_back(r.col(i).norm());
  }
  assign_clusters(s, opt.cluster_relative, opt.cluster_floor);
  return s;
}

Spectrum dense_standard(const SparseMatrix& a, const LaplaceOperator& op, int m, const SolverOptions& opt) {
  MatrixXd dense(a);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(dense);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::kNoConvergence, "dense eigensolver failed");
  return finish(a, op, es.eigenvalues(), es.eigenvectors(), m, opt, 0);
}

}  // namespace

LaplaceOperator assemble(const SurfaceComplex& c, LaplaceKind kind) {
  const int n = c.vertex_count;
  LaplaceOperator op;
  op.kind = kind;
  std::vector<Triplet> t;
  auto add_edge = [&](int u, int v, double w) {
    if (u == v) return;
    t.emplace_back(u, v, -w);
    t.emplace_back(v, u, -w);
    t.emplace_back(u, u, w);
    t.emplace_back(v, v, w);
  };
  if (kind == LaplaceKind::kGraph) {
    for (const auto& e : c.edges) add_edge(e.u, e.v, e.weight);
    op.mass = Eigen::Map<const VectorXd>(c.mass.data(), n);
  } else {
    if (c.coords.size() != static_cast<std::size_t>(n)) throw Error(ErrorCode::kMissingCoordinates, "cotangent assembly needs vertex coordinates");
    if (!c.has_faces()) throw Error(ErrorCode::kInvalidInput, "cotangent assembly needs faces");
    op.mass = VectorXd::Zero(n);
    double scale = 0.0;
    for (const auto& e : c.edges) {
      Eigen::Vector3d d = Eigen::Vector3d(c.coords[e.u].data()) - Eigen::Vector3d(c.coords[e.v].data());
      scale = std::max(scale, d.norm());
    }
    for (int f = 0; f < c.face_count(); ++f) {
      auto fb = face_boundary(c, f);
      if (fb.vertices.size() != 3) throw Error(ErrorCode::kInvalidInput, "cotangent assembly needs triangular faces");
      std::array<Eigen::Vector3d, 3> p;
      for (int i = 0; i < 3; ++i) p[i] = Eigen::Vector3d(c.coords[static_cast<std::size_t>(fb.vertices[i])].data());
      double area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]).norm();
      if (area <= 1e-12 * scale * scale) throw Error(ErrorCode::kDegenerateTriangle, "face " + std::to_string(f) + " has near-zero area");
      for (int i = 0; i < 3; ++i) {
        // Angle at vertex i faces the edge (i+1, i+2).
        Eigen::Vector3d a = p[(i + 1) % 3] - p[i], b = p[(i + 2) % 3] - p[i];
        double cot = a.dot(b) / a.cross(b).norm();
        add_edge(fb.vertices[(i + 1) % 3], fb.vertices[(i + 2) % 3], 0.5 * cot);
        op.mass(fb.vertices[i]) += area / 3.0;
      }
    }
    for (int v = 0; v < n; ++v)
      if (!(op.mass(v) > 0.0)) throw Error(ErrorCode::kInvalidInput, "vertex " + std::to_string(v) + " lies in no face");
  }
  op.stiffness.resize(n, n);
  op.stiffness.setFromTriplets(t.begin(), t.end());
  op.stiffness.makeCompressed();
  return op;
}

LaplaceOperator restrict_to(const LaplaceOperator& op, std::span<const int> sub) {
  std::vector<int> index(static_cast<std::size_t>(op.dim()), -1);
  for (std::size_t i = 0; i < sub.size(); ++i) {
    int v = sub[i];
    if (v < 0 || v >= op.dim() || index[static_cast<std::size_t>(v)] >= 0) throw Error(ErrorCode::kInvalidInput, "invalid subset");
    index[static_cast<std::size_t>(v)] = static_cast<int>(i);
  }
  std::vector<Triplet> t;
  for (int k = 0; k < op.stiffness.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(op.stiffness, k); it; ++it) {
      int r = index[static_cast<std::size_t>(it.row())], c = index[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  LaplaceOperator out;
  out.kind = op.kind;
  const int m = static_cast<int>(sub.size());
  out.stiffness.resize(m, m);
  out.stiffness.setFromTriplets(t.begin(), t.end());
  out.mass.resize(m);
  for (int i = 0; i < m; ++i) out.mass(i) = op.mass(sub[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<int> Spectrum::cluster_members(int id) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (cluster[static_cast<std::size_t>(i)] == id) out.push_back(i);
  return out;
}

int Spectrum::find_cluster(double lambda, double slack) const {
  double reach = std::max(cluster_gap, slack);
  for (int i = 0; i < size(); ++i)
    if (std::abs(values[static_cast<std::size_t>(i)] - lambda) <= reach) return cluster[static_cast<std::size_t>(i)];
  return -1;
}

double Spectrum::cluster_value(int id) const {
  auto members = cluster_members(id);
  if (members.empty()) throw Error(ErrorCode::kClusterNotFound, "no cluster " + std::to_string(id));
  double sum = 0.0;
  for (int i : members) sum += values[static_cast<std::size_t>(i)];
  return sum / static_cast<double>(members.size());
}

void assign_clusters(Spectrum& s, double relative, double floor) {
  double top = 0.0;
  for (double v : s.values) top = std::max(top, std::abs(v));
  s.cluster_gap = std::max(relative * top, floor);
  s.cluster.assign(s.values.size(), 0);
  for (std::size_t i = 1; i < s.values.size(); ++i)
    s.cluster[i] = s.cluster[i - 1] + (s.values[i] - s.values[i - 1] > s.cluster_gap ? 1 : 0);
}

Spectrum dense_eigenpairs(const LaplaceOperator& op, const SolverOptions& opt) {
  return dense_standard(standard_form(op), op, op.dim(), opt);
}

Spectrum lowest_eigenpairs(const LaplaceOperator& op, const SolverOptions& opt) {
  const int n = op.dim();
  const int m = opt.count;
  if (m < 1 || m > n) throw Error(ErrorCode::kInvalidParams, "requested " + std::to_string(m) + " eigenpairs of a " + std::to_string(n) + "-dimensional operator");
  if (!(opt.tol > 0.0)) throw Error(ErrorCode::kInvalidParams, "tolerance must be positive");
  SparseMatrix a = standard_form(op);
  const int block = std::min(n, m + std::max(4, m / 2));
  if (3 * block >= n) return dense_standard(a, op, m, opt);

  double mean_diag = a.diagonal().mean();
  SparseMatrix shifted = a;
  for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) += 1e-5 * mean_diag;
  Eigen::SimplicialLDLT<SparseMatrix> precond(shifted);
  if (precond.info() != Eigen::Success) throw Error(ErrorCode::kNoConvergence, "preconditioner factorization failed");

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd start(n, block);
  for (Eigen::Index j = 0; j < start.cols(); ++j)
    for (Eigen::Index i = 0; i < start.rows(); ++i) start(i, j) = normal(rng);
  MatrixXd x = extend_orthonormal(MatrixXd(n, 0), start);
  MatrixXd p(n, 0);
  VectorXd theta;
  VectorXd res;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    MatrixXd ax = a * x;
    MatrixXd h = x.transpose() * ax;
    Eigen::SelfAdjointEigenSolver<MatrixXd> rr(0.5 * (h + h.transpose()));
    x = (x * rr.eigenvectors()).eval();
    ax = (ax * rr.eigenvectors()).eval();
    theta = rr.eigenvalues();
    MatrixXd r = ax - x * theta.asDiagonal();
    res = r.colwise().norm();
    if ((res.head(m).array() <= opt.tol).all()) return finish(a, op, theta, x, m, opt, it);

    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < r.cols(); ++j)
      if (res(j) > opt.tol) active.push_back(j);
    MatrixXd w(n, static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) w.col(static_cast<Eigen::Index>(k)) = precond.solve(r.col(active[k]));

    MatrixXd extra(n, w.cols() + p.cols());
    extra << w, p;
    MatrixXd s = extend_orthonormal(x, extra);
    MatrixXd g = s.transpose() * (a * s);
    Eigen::SelfAdjointEigenSolver<MatrixXd> big(0.5 * (g + g.transpose()));
    MatrixXd c = big.eigenvectors().leftCols(x.cols());
    const Eigen::Index kx = x.cols();
    p = s.rightCols(s.cols() - kx) * c.bottomRows(s.cols() - kx);
    x = s * c;
  }
  std::string worst = std::to_string(res.head(m).maxCoeff());
  throw Error(ErrorCode::kNoConvergence, "eigensolver stopped after " + std::to_string(opt.max_iterations) + " iterations with residual " + worst);
}

int count_below(const Spectrum& s, double lambda, CountMode mode, double margin) {
  if (!(margin > 0.0)) throw Error(ErrorCode::kInvalidParams, "margin must be positive");
  if (!s.complete() && (s.values.empty() || lambda + 2.0 * margin >= s.values.back()))
    throw Error(ErrorCode::kRangeExceeded, "lambda + 2 margin reaches the last computed eigenvalue");
  int count = 0;
  for (double mu : s.values) {
    double d = std::abs(mu - lambda);
    if (d > margin && d <= 2.0 * margin) throw Error(ErrorCode::kAmbiguousCount, "eigenvalue " + std::to_string(mu) + " lies in the ambiguity band");
    if (d <= margin) {
      if (mode == CountMode::kClosed) ++count;
    } else if (mu < lambda) {
      ++count;
    }
  }
  return count;
}

double mass_dot(const VectorXd& mass, const VectorXd& a, const VectorXd& b) { return (mass.array() * a.array() * b.array()).sum(); }

TransferPair transfer_pair(const Cover& cov, const SurfaceComplex& base, LaplaceKind kind) {
  const int nb = cov.base_vertices, nc = cov.total.vertex_count;
  if (base.vertex_count != nb) throw Error(ErrorCode::kInvalidInput, "cover does not match base");
  TransferPair tp;
  tp.degree = cov.degree;
  std::vector<Triplet> up, down;
  for (int x = 0; x < nc; ++x) {
    up.emplace_back(x, cov.project_vertex(x), 1.0);
    down.emplace_back(cov.project_vertex(x), x, 1.0 / cov.degree);
  }
  tp.pullback.resize(nc, nb);
  tp.pullback.setFromTriplets(up.begin(), up.end());
  tp.pushdown.resize(nb, nc);
  tp.pushdown.setFromTriplets(down.begin(), down.end());

  SparseMatrix ident(nb, nb);
  ident.setIdentity();
  SparseMatrix comp = tp.pushdown * tp.pullback - ident;
  tp.composition_residual = comp.nonZeros() ? comp.coeffs().cwiseAbs().maxCoeff() : 0.0;

  auto lb = assemble(base, kind);
  auto lc = assemble(cov.total, kind);
  SparseMatrix diff = lc.stiffness * tp.pullback - tp.pullback * lb.stiffness;
  double scale = lb.stiffness.coeffs().cwiseAbs().maxCoeff();
  double mass_diff = (lc.mass - tp.pullback * lb.mass).cwiseAbs().maxCoeff() / lb.mass.cwiseAbs().maxCoeff();
  tp.intertwining_residual = std::max(diff.nonZeros() ? diff.coeffs().cwiseAbs().maxCoeff() / scale : 0.0, mass_diff);
  if (tp.composition_residual > 1e-12 || tp.intertwining_residual > 1e-12)
    throw Error(ErrorCode::kIntertwiningFailure, "transfer identities fail: composition " + std::to_string(tp.composition_residual) +
                                                     ", intertwining " + std::to_string(tp.intertwining_residual));
  return tp;
}

double adjointness_residual(const TransferPair& tp, const VectorXd& base_mass, const VectorXd& cover_mass,
                            const VectorXd& cover_fn, const VectorXd& base_fn) {
  double lhs = mass_dot(cover_mass, cover_fn, tp.pullback * base_fn);
  double rhs = tp.degree * mass_dot(base_mass, tp.pushdown * cover_fn, base_fn);
  double scale = std::sqrt(mass_dot(cover_mass, cover_fn, cover_fn) * mass_dot(cover_mass, tp.pullback * base_fn, tp.pullback * base_fn));
  return scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
}

SplittingRecord invariant_splitting(const TransferPair& tp, const LaplaceOperator& base_op, const LaplaceOperator& cover_op,
                                    double lambda, const Spectrum& base, const Spectrum& cover, double tol) {
  int cid = cover.find_cluster(lambda, tol);
  if (cid < 0) throw Error(ErrorCode::kClusterNotFound, "no cover cluster at " + std::to_string(lambda));
  auto cm = cover.cluster_members(cid);
  SplittingRecord rec;
  rec.dim_total = static_cast<int>(cm.size());
  MatrixXd e_cover(cover_op.dim(), rec.dim_total);
  for (int j = 0; j < rec.dim_total; ++j) e_cover.col(j) = cover.vectors.col(cm[static_cast<std::size_t>(j)]);

  MatrixXd lifted(cover_op.dim(), 0);
  int bid = base.find_cluster(lambda, tol);
  if (bid >= 0) {
    auto bm = base.cluster_members(bid);
    lifted.resize(cover_op.dim(), static_cast<Eigen::Index>(bm.size()));
    for (std::size_t j = 0; j < bm.size(); ++j)
      lifted.col(static_cast<Eigen::Index>(j)) = tp.pullback * base.vectors.col(bm[j]) / std::sqrt(static_cast<double>(tp.degree));
  }
  rec.dim_lifted = static_cast<int>(lifted.cols());

  // Work in the mass-weighted frame where both blocks are orthonormal.
  VectorXd sc = cover_op.mass.cwiseSqrt(), sb = base_op.mass.cwiseSqrt();
  MatrixXd ec = sc.asDiagonal() * e_cover;
  MatrixXd lc = sc.asDiagonal() * lifted;
  MatrixXd pushed = sb.asDiagonal() * (tp.pushdown * e_cover);
  Eigen::JacobiSVD<MatrixXd> svd(pushed, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  double top = sv.size() ? sv(0) : 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-8 * std::max(top, 1.0)) ++rank;
  rec.dim_kernel = rec.dim_total - rank;
  MatrixXd kernel = ec * svd.matrixV().rightCols(rec.dim_kernel);

  double ortho = 0.0;
  if (lc.cols() && kernel.cols()) ortho = (lc.transpose() * kernel).cwiseAbs().maxCoeff();
  if (lc.cols()) {
    MatrixXd outside = lc - ec * (ec.transpose() * lc);
    ortho = std::max(ortho, outside.cwiseAbs().maxCoeff());
    MatrixXd down = std::sqrt(static_cast<double>(tp.degree)) * (sb.asDiagonal() * (tp.pushdown * lifted));
    MatrixXd gram = down.transpose() * down - MatrixXd::Identity(lc.cols(), lc.cols());
    rec.isometry_residual = gram.cwiseAbs().maxCoeff();
  }
  rec.ortho_residual = ortho;
  rec.additive = rec.dim_total == rec.dim_lifted + rec.dim_kernel;
  return rec;
}

double dirichlet_lambda0(const LaplaceOperator& op, std::span<const int> sub) {
  if (sub.empty() || static_cast<int>(sub.size()) >= op.dim()) throw Error(ErrorCode::kEmptyOrFullSubset, "subset must be nonempty and proper");
  auto r = restrict_to(op, sub);
  SolverOptions opt;
  opt.count = 1;
  opt.tol = 1e-11;
  return lowest_eigenpairs(r, opt).values.front();
}

double dirichlet_lambda0(const SurfaceComplex& c, std::span<const int> sub, LaplaceKind kind) {
  return dirichlet_lambda0(assemble(c, kind), sub);
}

}  // namespace nodalcover
