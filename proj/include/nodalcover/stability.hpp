#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nodalcover/cover.hpp"
#include "nodalcover/group.hpp"
#include "nodalcover/nodal.hpp"
#include "nodalcover/spectra.hpp"

namespace nodalcover {

/// One-sided bound: holds when observed >= claimed.
struct BoundEntry {
  std::string name;
  double claimed = 0.0;
  double observed = 0.0;
  bool holds = false;
  bool tight = false;
};

using BoundLedger = std::vector<BoundEntry>;

BoundEntry make_bound(std::string name, double claimed, double observed);
bool all_hold(const BoundLedger& ledger);

enum class Verdict { kStable, kStrictlyUnstable, kWeaklyUnstable, kAmbiguous };
std::string to_string(Verdict v);

/// Either the closed interval [lower, upper] or the eigenvalue lambda_k of the base.
struct Target {
  double lower = 0.0;
  double upper = 0.0;
  int eigen_index = -1;

  static Target interval(double lower, double upper);
  static Target eigenvalue(int k);
  std::string label() const;
};

struct StabilityReport {
  Target target;
  double lambda = 0.0;  // right end of the interval
  double margin = 0.0;
  int base_open = 0, base_closed = 0;    // counts in [lower, lambda) and [lower, lambda]
  int cover_open = 0, cover_closed = 0;
  int base_multiplicity = 0, cover_multiplicity = 0;
  double gap_ratio = 0.0;  // isolation of the cover cluster at lambda over its width
  Verdict verdict = Verdict::kAmbiguous;
  std::string note;
  BoundLedger ledger;
  std::uint64_t base_seed = 0, cover_seed = 0;
  double base_tol = 0.0, cover_tol = 0.0;
};

inline constexpr double kWeakGapRatio = 1e3;

/// Throws kUncertifiedRange when either spectrum stops short of the target.
StabilityReport stability_verdict(const Spectrum& base, const Spectrum& cover, const Target& target, double margin);

struct DomainLift {
  int domain = 0;
  int components = 0;                  // |J_i|
  std::vector<int> sheet_multiplicities;  // k_ij, summing to the degree
  bool simply_connected = false;
};

struct LiftingReport {
  double lambda = 0.0;
  int base_open = 0;   // N_M(lambda-)
  int cover_open = 0;  // N_M'(lambda-)
  std::vector<DomainLift> domains;
  int test_space_dimension = 0;  // rank of the phi_ij
  int expected_dimension = 0;    // sum |J_i| - |I| + 1
  double integral_residual = 0.0;  // max over random psi
  int integral_samples = 0;
  BoundLedger ledger;
};

/// Nodal lifting bound N_M'(lambda-) >= N_M(lambda-) + sum(|J_i| - 1) with the
/// phi_ij test vectors and their integral identity against random psi.
LiftingReport numberg_check(const SurfaceComplex& base, const Cover& cov, const Spectrum& base_spectrum,
                            const Spectrum& cover_spectrum, const Eigen::VectorXd& phi, double lambda, double margin,
                            double zero_eps = 1e-8, std::uint64_t seed = 7, int samples = 20);

struct SigmaSearch {
  int max_seeds = 64;   // seed vertices tried, evenly spaced
  int max_size = 0;     // 0 means unbounded
  LaplaceKind kind = LaplaceKind::kGraph;
};

struct SigmaEstimate {
  int generator_budget = 0;
  double value = 0.0;  // upper bound on sigma_l
  std::vector<int> witness;
  int witness_generators = 0;
};

/// Generator count of the fundamental group of the thickened subset: 1 - chi
/// for proper subsets, 2 - chi for a whole closed surface.
int domain_generators(const SurfaceComplex& c, std::span<const int> sub);

/// Greedy region growing: from each seed, repeatedly add the frontier vertex
/// with the largest ground-state flux while the generator count stays within
/// budget, keeping the smallest Dirichlet bottom eigenvalue seen.
SigmaEstimate sigma_upper_bounds(const SurfaceComplex& c, int generator_budget, const SigmaSearch& search = {});

struct DisjointDomain {
  std::vector<int> vertices;
  int generators = 0;
};

struct GeneratorBoundReport {
  int min_generators = 0;  // k
  int generator_budget = 0;  // l
  double sigma = 0.0;
  int cover_closed = 0;     // N_M'(sigma + margin)
  int witness_components = 0;  // |J_1| for the witness domain
  BoundLedger ledger;
};

/// N_M'(sigma_l) >= k - l + 1 (at least 1), N_M'(sigma_l) >= |J_1| for the
/// witness, and for a disjoint family sum(k - l_i + 1) and sum |J_i| at max lambda_0(D_i).
GeneratorBoundReport numberd_check(const SurfaceComplex& base, const Cover& cov, const Spectrum& cover_spectrum,
                                   const SigmaEstimate& sigma, int min_generators, double margin,
                                   const std::vector<DisjointDomain>& family = {});

struct TowerLevel {
  int level = 0;
  long long degree = 1;  // over the base
  int vertices = 0;
  double value = 0.0;  // lambda_l
  std::optional<bool> stage_unstable;      // level k-1 -> k at [0, lambda_l(M_{k-1}))
  std::optional<bool> composite_unstable;  // base -> level k on the same interval
};

struct TowerTrajectory {
  int index = 0;
  double roof = 0.0;
  double margin = 0.0;
  std::vector<TowerLevel> levels;
  int entered_at = -1;  // first level from which all values are <= roof + margin
  bool nonincreasing = true;
  bool composition_holds = true;
  BoundLedger ledger;
};

TowerTrajectory tower_experiment(const Tower& t, int index, double roof, double margin, const SolverOptions& opt = {});

struct CountLedger {
  ContainmentReport containment;
  std::string assumption;
  BoundLedger ledger;
};

CountLedger count_experiment(const Presentation& p, int n);

struct RespecInstance {
  Eigen::MatrixXd a;  // symmetric
  Eigen::MatrixXd x;  // columns span X, Q <= 0 on X
  Eigen::MatrixXd y;  // columns span Y, X perp Y, P Y in Y
  std::uint64_t seed = 0;
};

/// Checks symmetry, Q <= tol on X, X perp Y and P-invariance of Y; throws kInvalidInput.
void validate(const RespecInstance& inst, double tol = 1e-9);

RespecInstance random_respec_instance(int n, std::uint64_t seed);
std::vector<RespecInstance> trivial_respec_instances();

struct RespecRecord {
  int dim_x = 0;
  int dim_x_null = 0;       // dim X cap H_0
  int dim_px = 0;
  int dim_neg_minus_y = 0;  // dim H_- cap Y^perp
  int dim_x_kernel_p = 0;   // dim X cap ker P
  double px_y_residual = 0.0;
  double kernel_null_residual = 0.0;
  bool equality = false;
  bool inequality = false;
  bool pass = false;
  std::uint64_t seed = 0;
};

/// Rank decisions use singular values against `tol`; values within a factor
/// 100 of it raise kRankAmbiguous.
RespecRecord respec_check(const RespecInstance& inst, double tol = 1e-9);

struct WeylPoint {
  double lambda = 0.0;
  int base = 0;
  int cover = 0;
  double ratio = 0.0;
  bool certified = true;
};

std::vector<WeylPoint> weyl_ratio(const Spectrum& base, const Spectrum& cover, const std::vector<double>& grid,
                                  double margin = 1e-8);

}  // namespace nodalcover
