#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "nodalcover/cover.hpp"
#include "nodalcover/spectra.hpp"
#include "nodalcover/surface.hpp"

namespace nodalcover {

struct NodalDomain {
  int sign = 1;
  std::vector<int> vertices;
  DomainTopology topology;
};

struct NodalDecomposition {
  Eigen::VectorXd values;
  double zero_threshold = 0.0;  // absolute
  std::vector<int> zero_set;
  std::vector<NodalDomain> domains;
  std::vector<int> domain_of_vertex;  // -1 on the zero set
  bool single_sign = false;

  int count() const { return static_cast<int>(domains.size()); }
};

/// Strong nodal domains: components of the strictly positive and strictly
/// negative vertices, with |phi(v)| <= eps * max|phi| treated as zero.
NodalDecomposition nodal_decomposition(const SurfaceComplex& c, const Eigen::VectorXd& phi, double eps = 1e-8);

/// Unit combination of a cluster's eigenvectors maximizing min_v |phi(v)|, by
/// coordinate-plane rotation sweeps from several deterministic starts.
Eigen::VectorXd canonical_cluster_vector(const Spectrum& s, int cluster_id, std::uint64_t seed = 7);

struct NodalCountBound {
  int domain_count = 0;   // nu
  int surface_chi = 0;
  int best_domain = -1;   // maximizes chi(U)
  int best_chi = 0;
  bool lower_holds = false;  // chi(S) / nu <= chi(U)
  bool upper_holds = false;  // chi(U) <= 1
  bool closed = false;
  int surface_generators = 0;      // 2 - chi closed, 1 - chi otherwise
  double coset_generator_bound = 0.0;  // nu(S)/2 closed, (nu(S)+1)/2 otherwise
};

NodalCountBound nodal_count_bound_data(const SurfaceComplex& c, const NodalDecomposition& d);

/// 2g+k-1+max(l-1,0) (orientable) or g+k-1+max(l-1,0); requires k >= 1.
int mu_formula(int genus, int doors, int exits, bool orientable);

struct IntersectionCocycle {
  int component = 0;  // index into the complement components
  std::vector<std::int64_t> values;  // per edge
  Coefficients coefficients = Coefficients::kIntegers;
};

struct ComplementComponent {
  std::vector<int> vertices;
  int cocycle_count = 0;
};

struct CocycleSet {
  std::vector<ComplementComponent> components;
  std::vector<IntersectionCocycle> cocycles;
};

/// Closed cochains supported on edges meeting each complement component of
/// domain `u`, modulo coboundaries there; integer coefficients on orientable
/// complexes and graphs, mod 2 otherwise.
CocycleSet intersection_cocycles(const SurfaceComplex& c, const NodalDecomposition& d, int u);

struct UnstableCoverPlan {
  int degree = 2;
  int domain = 0;
  int cocycle_index = 0;  // which cocycle defines the cover
  int cocycles_available = 0;
  int mu_used = 1;
  int predicted_increase = 0;  // mu_used * (degree - 1)
  Coefficients coefficients = Coefficients::kIntegers;
  CoverSpec spec;
};

/// Cyclic degree-n cover with voltages sigma^w(e) from the first cocycle that
/// yields a connected cover. Throws kNoCocycle when none exists.
UnstableCoverPlan unstable_cover_plan(const SurfaceComplex& c, const NodalDecomposition& d, int u, int degree);

}  // namespace nodalcover
