#include "nodalcover/group.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "nodalcover/error.hpp"

namespace nodalcover {
namespace {

// Letter index in scan order: g1, g1^-1, g2, g2^-1, ...
int letter_of_slot(int slot) { return slot % 2 == 0 ? slot / 2 + 1 : -(slot / 2 + 1); }

class ActionTable {
 public:
  ActionTable(const CosetAction& a) : a_(a) {
    for (const auto& p : a.perms) inverses_.push_back(inverse(p));
  }
  int step(int x, int letter) const {
    const auto& p = letter > 0 ? a_.perms[static_cast<std::size_t>(letter - 1)] : inverses_[static_cast<std::size_t>(-letter - 1)];
    return p[static_cast<std::size_t>(x)];
  }

 private:
  const CosetAction& a_;
  std::vector<Perm> inverses_;
};

std::vector<int> orbit_of_zero(int n, std::span<const Perm> perms) {
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<int> out{0};
  seen[0] = true;
  for (std::size_t h = 0; h < out.size(); ++h)
    for (const auto& p : perms) {
      int y = p[static_cast<std::size_t>(out[h])];
      if (!seen[static_cast<std::size_t>(y)]) {
        seen[static_cast<std::size_t>(y)] = true;
        out.push_back(y);
      }
    }
  return out;
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<long long> prime_factors(long long v) {
  std::vector<long long> out;
  for (long long p = 2; p * p <= v; ++p) {
    if (v % p != 0) continue;
    out.push_back(p);
    while (v % p == 0) v /= p;
  }
  if (v > 1) out.push_back(v);
  return out;
}

}  // namespace

Presentation free_group(int rank) {
  if (rank < 0) throw Error(ErrorCode::kInvalidParams, "rank must be nonnegative");
  return {rank, {}};
}

Presentation surface_group(int genus) {
  if (genus < 1) throw Error(ErrorCode::kInvalidParams, "genus must be at least 1");
  Word rel;
  for (int h = 0; h < genus; ++h) {
    int a = 2 * h + 1, b = 2 * h + 2;
    rel.insert(rel.end(), {a, b, -a, -b});
  }
  return {2 * genus, {rel}};
}

void validate(const Presentation& p) {
  if (p.rank < 0) throw Error(ErrorCode::kInvalidInput, "negative rank");
  for (const auto& r : p.relators) check_word(r, p.rank);
}

bool is_free(const Presentation& p) {
  return std::all_of(p.relators.begin(), p.relators.end(), [](const Word& w) { return free_reduce(w).empty(); });
}

Perm identity_perm(int n) {
  Perm p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

Perm inverse(const Perm& p) {
  Perm q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
  return q;
}

Perm compose(const Perm& p, const Perm& q) {
  Perm out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = q[static_cast<std::size_t>(p[i])];
  return out;
}

Perm cycle_power(int n, long long k) {
  Perm p(static_cast<std::size_t>(n));
  long long s = ((k % n) + n) % n;
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = static_cast<int>((i + s) % n);
  return p;
}

bool is_identity(const Perm& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != static_cast<int>(i)) return false;
  return true;
}

bool is_permutation(const Perm& p, int n) {
  if (p.size() != static_cast<std::size_t>(n)) return false;
  std::vector<bool> hit(static_cast<std::size_t>(n), false);
  for (int x : p) {
    if (x < 0 || x >= n || hit[static_cast<std::size_t>(x)]) return false;
    hit[static_cast<std::size_t>(x)] = true;
  }
  return true;
}

void validate(const CosetAction& a) {
  if (a.degree < 1) throw Error(ErrorCode::kInvalidInput, "degree must be positive");
  for (const auto& p : a.perms)
    if (!is_permutation(p, a.degree)) throw Error(ErrorCode::kInvalidInput, "action contains a non-permutation");
}

void check_relators(const CosetAction& a, const Presentation& p) {
  if (static_cast<int>(a.perms.size()) != p.rank)
    throw Error(ErrorCode::kInvalidInput, "action has " + std::to_string(a.perms.size()) + " generators, presentation " + std::to_string(p.rank));
  for (const auto& r : p.relators)
    if (!is_identity(word_permutation(a, r))) throw Error(ErrorCode::kInvalidInput, "relator acts nontrivially");
}

Word free_reduce(Word w) {
  Word out;
  out.reserve(w.size());
  for (int l : w) {
    if (!out.empty() && out.back() == -l)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

Word invert(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& l : out) l = -l;
  return out;
}

void check_word(const Word& w, int rank) {
  for (int l : w)
    if (l == 0 || l > rank || l < -rank) throw Error(ErrorCode::kInvalidWord, "letter " + std::to_string(l) + " outside generators 1.." + std::to_string(rank));
}

int apply_word(const CosetAction& a, const Word& w, int point) {
  check_word(w, static_cast<int>(a.perms.size()));
  for (int l : w) {
    if (l > 0) {
      point = a.perms[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(point)];
    } else {
      const auto& p = a.perms[static_cast<std::size_t>(-l - 1)];
      point = static_cast<int>(std::find(p.begin(), p.end(), point) - p.begin());
    }
  }
  return point;
}

Perm word_permutation(const CosetAction& a, const Word& w) {
  check_word(w, static_cast<int>(a.perms.size()));
  Perm out = identity_perm(a.degree);
  for (int l : w) {
    const auto& p = a.perms[static_cast<std::size_t>(std::abs(l) - 1)];
    out = compose(out, l > 0 ? p : inverse(p));
  }
  return out;
}

bool is_transitive(const CosetAction& a) {
  return static_cast<int>(orbit_of_zero(a.degree, a.perms).size()) == a.degree;
}

std::vector<std::vector<int>> orbits_of_perms(int n, std::span<const Perm> perms) {
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<int> orb{s};
    label[static_cast<std::size_t>(s)] = static_cast<int>(out.size());
    for (std::size_t h = 0; h < orb.size(); ++h)
      for (const auto& p : perms) {
        int y = p[static_cast<std::size_t>(orb[h])];
        if (label[static_cast<std::size_t>(y)] < 0) {
          label[static_cast<std::size_t>(y)] = static_cast<int>(out.size());
          orb.push_back(y);
        }
      }
    std::sort(orb.begin(), orb.end());
    out.push_back(std::move(orb));
  }
  return out;
}

std::vector<std::vector<int>> orbits(const CosetAction& a, std::span<const Word> gens) {
  std::vector<Perm> perms;
  for (const auto& w : gens) perms.push_back(word_permutation(a, w));
  // Forward images suffice: a finite permutation group is closed under inverses.
  return orbits_of_perms(a.degree, perms);
}

bool fixed_identity_coset(const CosetAction& a, std::span<const Word> gens) {
  return std::all_of(gens.begin(), gens.end(), [&](const Word& w) { return apply_word(a, w, 0) == 0; });
}

std::vector<Word> transversal(const CosetAction& a) {
  ActionTable table(a);
  const int letters = 2 * static_cast<int>(a.perms.size());
  std::vector<Word> out(static_cast<std::size_t>(a.degree));
  std::vector<bool> seen(static_cast<std::size_t>(a.degree), false);
  seen[0] = true;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (int s = 0; s < letters; ++s) {
      int l = letter_of_slot(s);
      int y = table.step(x, l);
      if (seen[static_cast<std::size_t>(y)]) continue;
      seen[static_cast<std::size_t>(y)] = true;
      out[static_cast<std::size_t>(y)] = out[static_cast<std::size_t>(x)];
      out[static_cast<std::size_t>(y)].push_back(l);
      queue.push_back(y);
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw Error(ErrorCode::kInvalidInput, "action is not transitive");
  return out;
}

bool normal_closure_fixes_basepoint(const CosetAction& a, std::span<const Word> gens) {
  auto t = transversal(a);
  for (const auto& g : gens) {
    for (const auto& tx : t) {
      Word conj = tx;
      conj.insert(conj.end(), g.begin(), g.end());
      auto ti = invert(tx);
      conj.insert(conj.end(), ti.begin(), ti.end());
      if (apply_word(a, free_reduce(conj), 0) != 0) return false;
    }
  }
  return true;
}

std::vector<Word> schreier_generators(const CosetAction& a) {
  auto t = transversal(a);
  std::vector<Word> out;
  std::set<Word> seen;
  for (int x = 0; x < a.degree; ++x) {
    for (int g = 1; g <= static_cast<int>(a.perms.size()); ++g) {
      int y = a.perms[static_cast<std::size_t>(g - 1)][static_cast<std::size_t>(x)];
      Word w = t[static_cast<std::size_t>(x)];
      w.push_back(g);
      auto back = invert(t[static_cast<std::size_t>(y)]);
      w.insert(w.end(), back.begin(), back.end());
      w = free_reduce(std::move(w));
      if (!w.empty() && seen.insert(w).second) out.push_back(std::move(w));
    }
  }
  return out;
}

int min_generators_coset(const CosetAction& a, int degree_cap) {
  validate(a);
  if (a.degree > degree_cap)
    throw Error(ErrorCode::kDegreeTooLarge, "degree " + std::to_string(a.degree) + " exceeds cap " + std::to_string(degree_cap));
  if (!is_transitive(a)) throw Error(ErrorCode::kInvalidInput, "action is not transitive");
  if (a.degree == 1) return 0;
  auto t = transversal(a);
  std::vector<Perm> stab;
  for (const auto& w : schreier_generators(a)) stab.push_back(word_permutation(a, w));
  // Adding h g h' with h, h' in the stabilizer generates the same overgroup, so
  // one transversal element per stabilizer orbit is enough.
  auto sub = orbits_of_perms(a.degree, stab);
  std::vector<Perm> candidates;
  for (const auto& orb : sub)
    if (orb.front() != 0) candidates.push_back(word_permutation(a, t[static_cast<std::size_t>(orb.front())]));
  for (std::size_t k = 1; k <= candidates.size(); ++k) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    do {
      auto perms = stab;
      for (std::size_t i : idx) perms.push_back(candidates[i]);
      if (static_cast<int>(orbit_of_zero(a.degree, perms).size()) == a.degree) return static_cast<int>(k);
    } while (next_combination(idx, candidates.size()));
  }
  throw Error(ErrorCode::kInvalidInput, "no generating set found");
}

OrbitBoundRecord orbit_lower_bound_check(const CosetAction& a, std::span<const Word> gens, int degree_cap) {
  OrbitBoundRecord r;
  r.min_generators = min_generators_coset(a, degree_cap);
  r.subgroup_generators = static_cast<int>(gens.size());
  r.orbit_count = static_cast<int>(orbits(a, gens).size());
  r.bound = r.min_generators - r.subgroup_generators + 1;
  r.holds = r.orbit_count >= r.bound;
  return r;
}

int abelian_mu(const AbelianInvariants& inv) {
  if (inv.rank > 0) throw Error(ErrorCode::kInfiniteGroup, "abelian_mu needs a finite group");
  std::map<long long, int> counts;
  for (const auto& k : inv.torsion) {
    if (k < 1) throw Error(ErrorCode::kInvalidInput, "invariant factors must be positive");
    for (long long p : prime_factors(to_int64(k))) ++counts[p];
  }
  int best = 0;
  for (const auto& [p, c] : counts) best = std::max(best, c);
  return best;
}

CosetAction regular_abelian_action(const std::vector<int>& orders) {
  int n = 1;
  for (int k : orders) {
    if (k < 1) throw Error(ErrorCode::kInvalidParams, "cyclic factor orders must be positive");
    n *= k;
  }
  CosetAction a{n, {}};
  int stride = 1;
  for (int k : orders) {
    Perm p(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) {
      int digit = (x / stride) % k;
      p[static_cast<std::size_t>(x)] = x + ((digit + 1) % k - digit) * stride;
    }
    a.perms.push_back(std::move(p));
    stride *= k;
  }
  return a;
}

int enumeration_bound(const Presentation& p) { return is_free(p) && p.rank <= 2 ? 6 : 4; }

std::vector<CosetAction> enumerate_index_n(const Presentation& p, int n, int max_index) {
  validate(p);
  if (n < 1) throw Error(ErrorCode::kInvalidParams, "index must be positive");
  int bound = max_index > 0 ? max_index : enumeration_bound(p);
  if (n > bound) throw Error(ErrorCode::kBoundExceeded, "index " + std::to_string(n) + " exceeds bound " + std::to_string(bound));
  const int r = p.rank;
  std::vector<CosetAction> out;
  if (r == 0) {
    if (n == 1) out.push_back({1, {}});
    return out;
  }
  // fwd[g][x] and bwd[g][x]: images under generator g and its inverse, -1 if open.
  std::vector<std::vector<int>> fwd(static_cast<std::size_t>(r), std::vector<int>(static_cast<std::size_t>(n), -1));
  auto bwd = fwd;
  const int slots = 2 * r;
  int used = 1;

  std::function<void(int, int)> search = [&](int x, int s) {
    // Advance to the next open slot in scan order.
    while (x < n) {
      if (x >= used) return;  // the table cannot reach every point
      if (s == slots) {
        ++x;
        s = 0;
        continue;
      }
      int g = s / 2;
      bool open = (s % 2 == 0 ? fwd : bwd)[static_cast<std::size_t>(g)][static_cast<std::size_t>(x)] < 0;
      if (open) break;
      ++s;
    }
    if (x == n) {
      CosetAction a{n, {}};
      for (const auto& row : fwd) a.perms.push_back(row);
      for (const auto& rel : p.relators)
        if (!is_identity(word_permutation(a, rel))) return;
      out.push_back(std::move(a));
      return;
    }
    const std::size_t g = static_cast<std::size_t>(s / 2);
    auto& here = s % 2 == 0 ? fwd[g] : bwd[g];
    auto& there = s % 2 == 0 ? bwd[g] : fwd[g];
    const int limit = std::min(used + 1, n);
    for (int y = 0; y < limit; ++y) {
      if (there[static_cast<std::size_t>(y)] >= 0) continue;
      bool fresh = y == used;
      here[static_cast<std::size_t>(x)] = y;
      there[static_cast<std::size_t>(y)] = x;
      if (fresh) ++used;
      search(x, s + 1);
      if (fresh) --used;
      here[static_cast<std::size_t>(x)] = -1;
      there[static_cast<std::size_t>(y)] = -1;
    }
  };
  search(0, 0);
  return out;
}

std::vector<int> index_two_overgroups(const CosetAction& a) {
  std::vector<int> out;
  for (int j = 1; j < a.degree; ++j) {
    std::vector<int> parent(static_cast<std::size_t>(a.degree));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) {
      while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      return v;
    };
    std::deque<std::pair<int, int>> pending{{0, j}};
    while (!pending.empty()) {
      auto [u, v] = pending.front();
      pending.pop_front();
      int ru = find(u), rv = find(v);
      if (ru == rv) continue;
      parent[static_cast<std::size_t>(ru)] = rv;
      for (const auto& perm : a.perms) pending.push_back({perm[static_cast<std::size_t>(u)], perm[static_cast<std::size_t>(v)]});
    }
    int root = find(0);
    int size = 0;
    for (int v = 0; v < a.degree; ++v)
      if (find(v) == root) ++size;
    if (size == 2) out.push_back(j);
  }
  return out;
}

ContainmentReport intermediate_count_check(const Presentation& p, int n, int max_index) {
  if (n < 1) throw Error(ErrorCode::kInvalidParams, "n must be positive");
  ContainmentReport rep;
  rep.n = n;
  rep.subgroups_n = static_cast<long long>(enumerate_index_n(p, n, max_index).size());
  auto big = enumerate_index_n(p, 2 * n, max_index);
  rep.subgroups_2n = static_cast<long long>(big.size());
  rep.allowed = 2 * n - 1;
  for (const auto& a : big) {
    int c = static_cast<int>(index_two_overgroups(a).size());
    rep.containment_counts.push_back(c);
    rep.max_containment = std::max(rep.max_containment, c);
  }
  rep.holds = rep.max_containment <= rep.allowed;
  rep.implied_lower_bound = static_cast<double>(rep.subgroups_n) / rep.allowed;
  return rep;
}

}  // namespace nodalcover
