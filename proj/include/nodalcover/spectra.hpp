#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <span>
#include <vector>

#include "nodalcover/cover.hpp"
#include "nodalcover/surface.hpp"

namespace nodalcover {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class LaplaceKind { kGraph, kCotangent };

/// Generalized problem L v = lambda B v with B = diag(mass).
struct LaplaceOperator {
  SparseMatrix stiffness;
  Eigen::VectorXd mass;
  LaplaceKind kind = LaplaceKind::kGraph;

  int dim() const { return static_cast<int>(mass.size()); }
};

LaplaceOperator assemble(const SurfaceComplex& c, LaplaceKind kind = LaplaceKind::kGraph);
/// Principal submatrix on `sub` (Dirichlet condition outside).
LaplaceOperator restrict_to(const LaplaceOperator& op, std::span<const int> sub);

struct SolverOptions {
  int count = 6;
  double tol = 1e-10;
  std::uint64_t seed = 7;
  int max_iterations = 3000;
  double cluster_relative = 1e-7;
  double cluster_floor = 1e-10;
};

/// Sorted low eigenpairs; eigenvectors are B-orthonormal columns.
struct Spectrum {
  std::vector<double> values;
  Eigen::MatrixXd vectors;
  std::vector<double> residuals;
  std::vector<int> cluster;  // cluster id per eigenvalue
  double cluster_gap = 0.0;
  int dimension = 0;
  int iterations = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;

  int size() const { return static_cast<int>(values.size()); }
  bool complete() const { return size() == dimension; }
  int cluster_count() const { return cluster.empty() ? 0 : cluster.back() + 1; }
  std::vector<int> cluster_members(int id) const;
  /// Cluster whose values lie within max(gap, slack) of lambda, or -1.
  int find_cluster(double lambda, double slack = 0.0) const;
  double cluster_value(int id) const;
};

/// Block Rayleigh-quotient minimization (LOBPCG) in the mass-normalized
/// frame, preconditioned with a sparse factorization of a shifted operator.
/// Falls back to a dense solver when the search space would span the space.
Spectrum lowest_eigenpairs(const LaplaceOperator& op, const SolverOptions& opt);
/// Full spectrum by a dense symmetric solver.
Spectrum dense_eigenpairs(const LaplaceOperator& op, const SolverOptions& opt = {});

/// Groups consecutive eigenvalues closer than max(relative * max|lambda|, floor).
void assign_clusters(Spectrum& s, double relative, double floor);

enum class CountMode { kClosed, kOpen };

/// Eigenvalues within `margin` of lambda count as equal to it: included in
/// closed mode, excluded in open mode. Throws kAmbiguousCount if some
/// eigenvalue lies in margin < |mu - lambda| <= 2 margin and kRangeExceeded if
/// uncomputed eigenvalues could lie below lambda + 2 margin.
int count_below(const Spectrum& s, double lambda, CountMode mode, double margin);

struct TransferPair {
  SparseMatrix pullback;  // p*: base -> cover
  SparseMatrix pushdown;  // p_*: cover -> base, fiber average
  int degree = 1;
  double composition_residual = 0.0;   // max |p_* p* - I|
  double intertwining_residual = 0.0;  // |L' p* - p* L| / |L|, entrywise max
};

/// Throws kIntertwiningFailure if either identity fails at 1e-12.
TransferPair transfer_pair(const Cover& cov, const SurfaceComplex& base, LaplaceKind kind = LaplaceKind::kGraph);

/// |<f', p* f>_{M'} - |p| <p_* f', f>_M| relative to |f'| |f| in the mass norms.
double adjointness_residual(const TransferPair& tp, const Eigen::VectorXd& base_mass, const Eigen::VectorXd& cover_mass,
                            const Eigen::VectorXd& cover_fn, const Eigen::VectorXd& base_fn);

struct SplittingRecord {
  int dim_total = 0;
  int dim_lifted = 0;
  int dim_kernel = 0;
  double ortho_residual = 0.0;     // lifted block against the kernel block, and containment in the cluster
  double isometry_residual = 0.0;  // sqrt|p| p_* on the lifted block
  bool additive = false;
};

SplittingRecord invariant_splitting(const TransferPair& tp, const LaplaceOperator& base_op,
                                    const LaplaceOperator& cover_op, double lambda, const Spectrum& base,
                                    const Spectrum& cover, double tol = 1e-8);

double dirichlet_lambda0(const SurfaceComplex& c, std::span<const int> sub, LaplaceKind kind = LaplaceKind::kGraph);
double dirichlet_lambda0(const LaplaceOperator& op, std::span<const int> sub);

/// Mass-weighted inner product.
double mass_dot(const Eigen::VectorXd& mass, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace nodalcover
