#pragma once

#include <span>
#include <string>
#include <vector>

#include "nodalcover/surface.hpp"

namespace nodalcover {

/// A word over generators 1..r: letter +i is generator i, -i its inverse.
using Word = std::vector<int>;
/// Images of the points 0..n-1.
using Perm = std::vector<int>;

struct Presentation {
  int rank = 0;
  std::vector<Word> relators;
};

Presentation free_group(int rank);
/// Closed orientable surface group with relator [a1,b1]...[ag,bg].
Presentation surface_group(int genus);
void validate(const Presentation& p);
bool is_free(const Presentation& p);

/// Right action of the generators on the points 0..n-1; point 0 is the basepoint.
struct CosetAction {
  int degree = 0;
  std::vector<Perm> perms;
};

void validate(const CosetAction& a);
/// Throws kInvalidInput unless every relator acts trivially.
void check_relators(const CosetAction& a, const Presentation& p);

Perm identity_perm(int n);
Perm inverse(const Perm& p);
/// (p * q)(x) = q(p(x)): apply p first.
Perm compose(const Perm& p, const Perm& q);
Perm cycle_power(int n, long long k);
bool is_identity(const Perm& p);
bool is_permutation(const Perm& p, int n);

Word free_reduce(Word w);
Word invert(const Word& w);
void check_word(const Word& w, int rank);

int apply_word(const CosetAction& a, const Word& w, int point);
Perm word_permutation(const CosetAction& a, const Word& w);

bool is_transitive(const CosetAction& a);

/// Orbits of the subgroup generated by `gens`, each sorted, ordered by smallest point.
std::vector<std::vector<int>> orbits(const CosetAction& a, std::span<const Word> gens);
std::vector<std::vector<int>> orbits_of_perms(int n, std::span<const Perm> perms);

/// Whether every generator word fixes the basepoint.
bool fixed_identity_coset(const CosetAction& a, std::span<const Word> gens);
/// Whether every conjugate t g t^-1 of a generator by a transversal word fixes the basepoint.
bool normal_closure_fixes_basepoint(const CosetAction& a, std::span<const Word> gens);

/// Transversal words t_x with 0 . t_x = x, from a breadth-first search over
/// letters in the order g1, g1^-1, g2, ...
std::vector<Word> transversal(const CosetAction& a);
/// Schreier generators of the basepoint stabilizer.
std::vector<Word> schreier_generators(const CosetAction& a);

/// Smallest number of elements that together with the basepoint stabilizer
/// generate the whole group.
int min_generators_coset(const CosetAction& a, int degree_cap = 24);

struct OrbitBoundRecord {
  int min_generators = 0;  // k
  int subgroup_generators = 0;  // l
  int orbit_count = 0;
  int bound = 0;  // k - l + 1
  bool holds = false;
};

OrbitBoundRecord orbit_lower_bound_check(const CosetAction& a, std::span<const Word> gens, int degree_cap = 24);

/// Minimal number of generators of a finite abelian group.
int abelian_mu(const AbelianInvariants& inv);

/// Regular action of Z/k1 x ... x Z/km on itself, one generator per factor.
/// Points are mixed-radix numbers with the first factor varying fastest.
CosetAction regular_abelian_action(const std::vector<int>& orders);

/// Default enumeration bound: 6 for free groups of rank at most 2, else 4.
int enumeration_bound(const Presentation& p);

/// All transitive pointed actions of degree n satisfying the relators, one per
/// subgroup of index n, as standardized coset tables in depth-first order.
std::vector<CosetAction> enumerate_index_n(const Presentation& p, int n, int max_index = 0);

/// Points j such that the smallest block of imprimitivity containing {0, j} has size 2.
std::vector<int> index_two_overgroups(const CosetAction& a);

struct ContainmentReport {
  int n = 0;
  long long subgroups_n = 0;  // a(n)
  long long subgroups_2n = 0;  // a(2n)
  std::vector<int> containment_counts;  // one per index-2n subgroup
  int max_containment = 0;
  int allowed = 0;  // 2n - 1
  double implied_lower_bound = 0.0;  // a(n) / (2n - 1)
  bool holds = false;
};

ContainmentReport intermediate_count_check(const Presentation& p, int n, int max_index = 0);

}  // namespace nodalcover
