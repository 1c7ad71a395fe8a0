#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "nodalcover/error.hpp"
#include "nodalcover/group.hpp"

using namespace nodalcover;

namespace {

long long factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Number of index-n subgroups of the free group of rank r.
long long hall_count(int r, int n) {
  std::vector<long long> a(static_cast<std::size_t>(n + 1), 0);
  for (int m = 1; m <= n; ++m) {
    long long v = m * ipow(factorial(m), r - 1);
    for (int k = 1; k < m; ++k) v -= ipow(factorial(m - k), r - 1) * a[static_cast<std::size_t>(k)];
    a[static_cast<std::size_t>(m)] = v;
  }
  return a[static_cast<std::size_t>(n)];
}

std::vector<Perm> all_perms(int n) {
  std::vector<Perm> out;
  Perm p = identity_perm(n);
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Transitive tuples satisfying the relators, divided by the relabelings fixing 0.
long long brute_subgroup_count(const Presentation& pres, int n) {
  auto perms = all_perms(n);
  long long count = 0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(pres.rank), 0);
  while (true) {
    CosetAction a{n, {}};
    for (auto i : idx) a.perms.push_back(perms[i]);
    bool ok = is_transitive(a);
    for (const auto& r : pres.relators) ok = ok && is_identity(word_permutation(a, r));
    if (ok) ++count;
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == perms.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return count / factorial(n - 1);
}

// Elementary-abelian rank of the p-torsion, maximized over p, by enumerating elements.
int p_rank_oracle(const std::vector<int>& orders) {
  int n = 1;
  for (int k : orders) n *= k;
  int best = 0;
  for (int p = 2; p <= n; ++p) {
    bool prime = true;
    for (int q = 2; q * q <= p; ++q) prime = prime && p % q != 0;
    if (!prime) continue;
    int killed = 0;
    for (int x = 0; x < n; ++x) {
      int rest = x;
      bool zero = true;
      for (int k : orders) {
        int digit = rest % k;
        rest /= k;
        zero = zero && (p * digit) % k == 0;
      }
      if (zero) ++killed;
    }
    int d = 0;
    while (killed > 1) {
      killed /= p;
      ++d;
    }
    best = std::max(best, d);
  }
  return best;
}

// Smallest generating subset, by exhaustive search.
int generating_oracle(const std::vector<int>& orders) {
  int n = 1;
  for (int k : orders) n *= k;
  auto add = [&](int x, int y) {
    int out = 0, stride = 1;
    for (int k : orders) {
      out += (((x / stride) % k + (y / stride) % k) % k) * stride;
      stride *= k;
    }
    return out;
  };
  for (int size = 0; size <= static_cast<int>(orders.size()); ++size) {
    std::vector<int> pick(static_cast<std::size_t>(size));
    std::function<bool(int, int)> rec = [&](int pos, int from) {
      if (pos == size) {
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        std::vector<int> el{0};
        seen[0] = true;
        for (std::size_t h = 0; h < el.size(); ++h)
          for (int g : pick) {
            int y = add(el[h], g);
            if (!seen[static_cast<std::size_t>(y)]) {
              seen[static_cast<std::size_t>(y)] = true;
              el.push_back(y);
            }
          }
        return static_cast<int>(el.size()) == n;
      }
      for (int x = from; x < n; ++x) {
        pick[static_cast<std::size_t>(pos)] = x;
        if (rec(pos + 1, x + 1)) return true;
      }
      return false;
    };
    if (rec(0, 1)) return size;
  }
  return -1;
}

void factor_lists(int max_order, int min_factor, std::vector<int>& cur, int prod, std::vector<std::vector<int>>& out) {
  out.push_back(cur);
  for (int k = min_factor; prod * k <= max_order; ++k) {
    cur.push_back(k);
    factor_lists(max_order, k, cur, prod * k, out);
    cur.pop_back();
  }
}

AbelianInvariants as_invariants(const std::vector<int>& orders) {
  AbelianInvariants inv;
  for (int k : orders) inv.torsion.push_back(k);
  return inv;
}

}  // namespace

TEST_CASE("hall recursion values") {
  CHECK(hall_count(2, 2) == 3);
  CHECK(hall_count(2, 3) == 13);
  CHECK(hall_count(2, 4) == 71);
  CHECK(hall_count(2, 5) == 461);
  CHECK(hall_count(2, 6) == 3447);
}

TEST_CASE("words and permutations") {
  CHECK(free_reduce({1, 2, -2, -1, 3}) == Word{3});
  CHECK(invert({1, -2}) == Word{2, -1});
  auto a = regular_abelian_action({6});
  CHECK(word_permutation(a, {1, 1}) == cycle_power(6, 2));
  CHECK(apply_word(a, {1, 1, -1}, 3) == 4);
  CHECK_THROWS_AS(apply_word(a, {2}, 0), Error);
  try {
    word_permutation(a, {0});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidWord);
  }
  CHECK(compose(cycle_power(5, 1), cycle_power(5, 3)) == cycle_power(5, 4));
  CHECK(is_identity(compose(cycle_power(7, 3), inverse(cycle_power(7, 3)))));
}

TEST_CASE("orbits of subgroups") {
  auto a = regular_abelian_action({6});
  std::vector<Word> gens{{1, 1}};
  auto o = orbits(a, gens);
  REQUIRE(o.size() == 2);
  CHECK(o[0] == std::vector<int>{0, 2, 4});
  CHECK(o[1] == std::vector<int>{1, 3, 5});
  CHECK(orbits(a, std::vector<Word>{}).size() == 6);
  CHECK(orbits(a, std::vector<Word>{{1, 1, 1, 1, 1}}).size() == 1);
}

TEST_CASE("orbits agree with brute-force closure") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + static_cast<int>(rng() % 7);
    CosetAction a{n, {}};
    for (int g = 0; g < 2; ++g) {
      Perm p = identity_perm(n);
      std::shuffle(p.begin(), p.end(), rng);
      a.perms.push_back(p);
    }
    std::vector<Word> gens;
    int count = static_cast<int>(rng() % 3);
    for (int i = 0; i < count; ++i) {
      Word w;
      int len = 1 + static_cast<int>(rng() % 4);
      for (int j = 0; j < len; ++j) w.push_back((rng() % 2 ? 1 : -1) * (1 + static_cast<int>(rng() % 2)));
      gens.push_back(w);
    }
    // Closure under repeated application of the words and their inverses.
    std::vector<int> label(static_cast<std::size_t>(n));
    std::iota(label.begin(), label.end(), 0);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& w : gens)
        for (int x = 0; x < n; ++x) {
          int y = apply_word(a, w, x);
          int m = std::min(label[x], label[y]);
          if (label[x] != m || label[y] != m) {
            int old1 = label[x], old2 = label[y];
            for (int& l : label)
              if (l == old1 || l == old2) l = m;
            changed = true;
          }
        }
    }
    std::set<int> classes(label.begin(), label.end());
    CHECK(orbits(a, gens).size() == classes.size());
  }
}

TEST_CASE("basepoint stabilizer tests") {
  auto a = regular_abelian_action({2});
  CHECK_FALSE(fixed_identity_coset(a, std::vector<Word>{{1}}));
  CHECK(fixed_identity_coset(a, std::vector<Word>{{1, 1}}));
  // Point stabilizer of S3 acting on 3 points.
  CosetAction s3{3, {{1, 0, 2}, {0, 2, 1}}};
  std::vector<Word> stab{{2}};
  CHECK(fixed_identity_coset(s3, stab));
  CHECK_FALSE(normal_closure_fixes_basepoint(s3, stab));
  CHECK(orbits(s3, stab).size() >= 2);
  // A word in the kernel of the action: its normal closure fixes everything.
  std::vector<Word> kernel{{1, 1}};
  CHECK(normal_closure_fixes_basepoint(s3, kernel));
  CHECK(orbits(s3, kernel).size() == 3);
}

TEST_CASE("schreier generators fix the basepoint") {
  CosetAction a{4, {{1, 2, 3, 0}, {1, 0, 2, 3}}};
  auto gens = schreier_generators(a);
  CHECK(!gens.empty());
  CHECK(fixed_identity_coset(a, gens));
  auto t = transversal(a);
  for (int x = 0; x < 4; ++x) CHECK(apply_word(a, t[x], 0) == x);
}

TEST_CASE("minimal generators of coset actions") {
  CHECK(min_generators_coset(regular_abelian_action({2, 2})) == 2);
  CHECK(min_generators_coset(regular_abelian_action({6})) == 1);
  CHECK(min_generators_coset(regular_abelian_action({2, 3})) == 1);
  CHECK(min_generators_coset(CosetAction{1, {{0}, {0}}}) == 0);
  CHECK(min_generators_coset(regular_abelian_action({2, 2, 2})) == 3);
  // Natural action of S4: the stabilizer S3 plus one 4-cycle generates.
  CHECK(min_generators_coset(CosetAction{4, {{1, 2, 3, 0}, {1, 0, 2, 3}}}) == 1);
  CHECK_THROWS_AS(min_generators_coset(regular_abelian_action({5, 5})), Error);
  CHECK(min_generators_coset(regular_abelian_action({5, 5}), 25) == 2);
}

TEST_CASE("orbit lower bound") {
  auto a = regular_abelian_action({2, 2, 2});
  std::mt19937_64 rng(1);
  for (int x = 1; x < 8; ++x) {
    auto t = transversal(a);
    std::vector<Word> gens{t[x]};
    auto r = orbit_lower_bound_check(a, gens);
    CHECK(r.min_generators == 3);
    CHECK(r.orbit_count == 4);
    CHECK(r.holds);
  }
  auto b = regular_abelian_action({2, 4});
  auto r = orbit_lower_bound_check(b, std::vector<Word>{{1}});
  CHECK(r.orbit_count == 4);
  CHECK(r.bound == 2);
  CHECK(r.holds);
  auto triv = orbit_lower_bound_check(b, std::vector<Word>{{1}, {2}, {1, 2}});
  CHECK(triv.bound <= 1);
  CHECK(triv.holds);
}

TEST_CASE("abelian minimal generator count") {
  CHECK(abelian_mu(as_invariants({2, 4})) == 2);
  CHECK(abelian_mu(as_invariants({2, 3})) == 1);
  CHECK(abelian_mu(as_invariants({})) == 0);
  AbelianInvariants inf;
  inf.rank = 1;
  CHECK_THROWS_AS(abelian_mu(inf), Error);
}

TEST_CASE("abelian_mu agrees with element enumeration up to order 256") {
  std::vector<std::vector<int>> lists;
  std::vector<int> cur;
  factor_lists(256, 2, cur, 1, lists);
  CHECK(lists.size() > 500);
  for (const auto& l : lists) CHECK(abelian_mu(as_invariants(l)) == p_rank_oracle(l));
  for (const auto& l : lists) {
    int n = 1;
    for (int k : l) n *= k;
    if (n > 32) continue;
    CHECK(abelian_mu(as_invariants(l)) == generating_oracle(l));
    if (n <= 24) CHECK(min_generators_coset(regular_abelian_action(l)) == abelian_mu(as_invariants(l)));
  }
}

TEST_CASE("subgroup enumeration of the free group matches the recursion") {
  auto f2 = free_group(2);
  for (int n = 1; n <= 5; ++n) CHECK(static_cast<long long>(enumerate_index_n(f2, n).size()) == hall_count(2, n));
  for (int n = 1; n <= 4; ++n) CHECK(static_cast<long long>(enumerate_index_n(f2, n).size()) == brute_subgroup_count(f2, n));
  CHECK(enumerate_index_n(free_group(3), 3).size() == static_cast<std::size_t>(hall_count(3, 3)));
  CHECK_THROWS_AS(enumerate_index_n(f2, 7), Error);
}

TEST_CASE("enumerated actions are transitive, distinct and standardized") {
  auto list = enumerate_index_n(free_group(2), 4);
  std::set<std::vector<Perm>> seen;
  for (const auto& a : list) {
    CHECK(is_transitive(a));
    CHECK(seen.insert(a.perms).second);
  }
  // Different subgroups are told apart by which short words fix the basepoint.
  std::set<std::vector<bool>> signatures;
  std::vector<Word> probes{{}};
  for (std::size_t h = 0; h < probes.size(); ++h) {
    if (probes[h].size() == 6) continue;
    for (int l : {1, -1, 2, -2}) {
      if (!probes[h].empty() && probes[h].back() == -l) continue;
      Word w = probes[h];
      w.push_back(l);
      probes.push_back(w);
    }
  }
  for (const auto& a : list) {
    std::vector<bool> sig;
    for (const auto& w : probes) sig.push_back(apply_word(a, w, 0) == 0);
    signatures.insert(sig);
  }
  CHECK(signatures.size() == list.size());
}

TEST_CASE("surface group enumeration") {
  auto g2 = surface_group(2);
  CHECK(g2.relators.front().size() == 8);
  CHECK(enumerate_index_n(g2, 2).size() == 15);
  CHECK(static_cast<long long>(enumerate_index_n(g2, 3).size()) == brute_subgroup_count(g2, 3));
  for (const auto& a : enumerate_index_n(g2, 3)) CHECK_NOTHROW(check_relators(a, g2));
  CHECK(enumerate_index_n(surface_group(1), 2).size() == 3);
}

TEST_CASE("intermediate subgroup containment") {
  auto f2 = free_group(2);
  auto r1 = intermediate_count_check(f2, 1);
  CHECK(r1.subgroups_2n == 3);
  for (int c : r1.containment_counts) CHECK(c == 1);
  auto r2 = intermediate_count_check(f2, 2);
  CHECK(r2.subgroups_n == 3);
  CHECK(r2.subgroups_2n == 71);
  CHECK(r2.max_containment <= 3);
  CHECK(r2.holds);
  CHECK(r2.implied_lower_bound == doctest::Approx(1.0));
  auto r3 = intermediate_count_check(f2, 3);
  CHECK(r3.max_containment <= 5);
  CHECK(r3.implied_lower_bound == doctest::Approx(13.0 / 5.0));
  // Count pairs from the other side: an index-n subgroup is free of rank n+1
  // and has 2^(n+1) - 1 subgroups of index 2.
  for (const auto& rep : {r1, r2, r3}) {
    long long pairs = 0;
    for (int c : rep.containment_counts) pairs += c;
    CHECK(pairs == rep.subgroups_n * hall_count(rep.n + 1, 2));
  }
}
