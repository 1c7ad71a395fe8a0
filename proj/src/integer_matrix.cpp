#include "nodalcover/integer_matrix.hpp"

#include <algorithm>
#include <limits>
#include <utility>

#include "nodalcover/error.hpp"

namespace nodalcover {
namespace {

struct Overflow {};

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw Overflow{};
  return out;
}
std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_sub_overflow(a, b, &out)) throw Overflow{};
  return out;
}
std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw Overflow{};
  return out;
}
std::int64_t checked_neg(std::int64_t a) {
  if (a == std::numeric_limits<std::int64_t>::min()) throw Overflow{};
  return -a;
}

BigInt checked_mul(const BigInt& a, const BigInt& b) { return a * b; }
BigInt checked_sub(const BigInt& a, const BigInt& b) { return a - b; }
BigInt checked_add(const BigInt& a, const BigInt& b) { return a + b; }
BigInt checked_neg(const BigInt& a) { return -a; }

template <class Int>
Int magnitude(const Int& v) {
  return v < 0 ? checked_neg(v) : v;
}

template <class Int>
using Mat = std::vector<std::vector<Int>>;

template <class Int>
Mat<Int> identity(std::size_t n) {
  Mat<Int> m(n, std::vector<Int>(n, Int(0)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = Int(1);
  return m;
}

template <class Int>
class SmithRunner {
 public:
  SmithRunner(Mat<Int> a, std::size_t cols, bool transforms)
      : a_(std::move(a)), rows_(a_.size()), cols_(cols), transforms_(transforms) {
    if (transforms_) {
      left_inv_ = identity<Int>(rows_);
      right_ = identity<Int>(cols_);
      right_inv_ = identity<Int>(cols_);
    }
  }

  std::size_t run() {
    std::size_t t = 0;
    while (t < rows_ && t < cols_) {
      auto [pi, pj] = min_entry(t, t, rows_, cols_);
      if (pi == npos) break;
      swap_rows(t, pi);
      swap_cols(t, pj);
      while (true) {
        if (clear_column(t)) {
          auto [ri, rj] = min_entry(t, t, rows_, t + 1);
          swap_rows(t, ri);
          continue;
        }
        if (clear_row(t)) {
          auto [ri, rj] = min_entry(t, t, t + 1, cols_);
          swap_cols(t, rj);
          continue;
        }
        std::size_t bad = find_indivisible(t);
        if (bad == npos) break;
        add_row(t, bad);
      }
      if (a_[t][t] < 0) negate_row(t);
      ++t;
    }
    return t;
  }

  const Mat<Int>& matrix() const { return a_; }
  const Mat<Int>& left_inverse() const { return left_inv_; }
  const Mat<Int>& right() const { return right_; }
  const Mat<Int>& right_inverse() const { return right_inv_; }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::pair<std::size_t, std::size_t> min_entry(std::size_t r0, std::size_t c0, std::size_t r1,
                                                std::size_t c1) const {
    std::size_t bi = npos, bj = npos;
    Int best(0);
    for (std::size_t i = r0; i < r1; ++i) {
      for (std::size_t j = c0; j < c1; ++j) {
        if (a_[i][j] == 0) continue;
        Int m = magnitude(a_[i][j]);
        if (bi == npos || m < best) {
          best = m;
          bi = i;
          bj = j;
          if (best == 1) return {bi, bj};
        }
      }
    }
    return {bi, bj};
  }

  // Returns true if a nonzero remainder was left below the pivot.
  bool clear_column(std::size_t t) {
    bool remainder = false;
    for (std::size_t i = t + 1; i < rows_; ++i) {
      if (a_[i][t] == 0) continue;
      Int q = a_[i][t] / a_[t][t];
      if (q != 0) sub_row(i, t, q);
      if (a_[i][t] != 0) remainder = true;
    }
    return remainder;
  }

  bool clear_row(std::size_t t) {
    bool remainder = false;
    for (std::size_t j = t + 1; j < cols_; ++j) {
      if (a_[t][j] == 0) continue;
      Int q = a_[t][j] / a_[t][t];
      if (q != 0) sub_col(j, t, q);
      if (a_[t][j] != 0) remainder = true;
    }
    return remainder;
  }

  std::size_t find_indivisible(std::size_t t) const {
    const Int& p = a_[t][t];
    if (p == 1 || p == -1) return npos;
    for (std::size_t i = t + 1; i < rows_; ++i)
      for (std::size_t j = t + 1; j < cols_; ++j)
        if (a_[i][j] % p != 0) return i;
    return npos;
  }

  // row_i -= q * row_t
  void sub_row(std::size_t i, std::size_t t, const Int& q) {
    for (std::size_t j = 0; j < cols_; ++j)
      if (a_[t][j] != 0) a_[i][j] = checked_sub(a_[i][j], checked_mul(q, a_[t][j]));
    if (transforms_)
      for (std::size_t r = 0; r < rows_; ++r)
        if (left_inv_[r][i] != 0)
          left_inv_[r][t] = checked_add(left_inv_[r][t], checked_mul(q, left_inv_[r][i]));
  }

  // col_j -= q * col_t
  void sub_col(std::size_t j, std::size_t t, const Int& q) {
    for (std::size_t i = 0; i < rows_; ++i)
      if (a_[i][t] != 0) a_[i][j] = checked_sub(a_[i][j], checked_mul(q, a_[i][t]));
    if (transforms_) {
      for (std::size_t r = 0; r < cols_; ++r)
        if (right_[r][t] != 0) right_[r][j] = checked_sub(right_[r][j], checked_mul(q, right_[r][t]));
      for (std::size_t c = 0; c < cols_; ++c)
        if (right_inv_[j][c] != 0)
          right_inv_[t][c] = checked_add(right_inv_[t][c], checked_mul(q, right_inv_[j][c]));
    }
  }

  // row_t += row_i
  void add_row(std::size_t t, std::size_t i) {
    for (std::size_t j = 0; j < cols_; ++j)
      if (a_[i][j] != 0) a_[t][j] = checked_add(a_[t][j], a_[i][j]);
    if (transforms_)
      for (std::size_t r = 0; r < rows_; ++r)
        if (left_inv_[r][t] != 0) left_inv_[r][i] = checked_sub(left_inv_[r][i], left_inv_[r][t]);
  }

  void negate_row(std::size_t t) {
    for (auto& v : a_[t]) v = checked_neg(v);
    if (transforms_)
      for (std::size_t r = 0; r < rows_; ++r) left_inv_[r][t] = checked_neg(left_inv_[r][t]);
  }

  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    std::swap(a_[i], a_[j]);
    if (transforms_)
      for (auto& row : left_inv_) std::swap(row[i], row[j]);
  }

  void swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (auto& row : a_) std::swap(row[i], row[j]);
    if (transforms_) {
      for (auto& row : right_) std::swap(row[i], row[j]);
      std::swap(right_inv_[i], right_inv_[j]);
    }
  }

  Mat<Int> a_;
  std::size_t rows_;
  std::size_t cols_;
  bool transforms_;
  Mat<Int> left_inv_;
  Mat<Int> right_;
  Mat<Int> right_inv_;
};

template <class Int>
BigMatrix to_big(const Mat<Int>& m) {
  BigMatrix out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    out[i].reserve(m[i].size());
    for (const auto& v : m[i]) out[i].emplace_back(v);
  }
  return out;
}

template <class Int>
SmithForm finish(SmithRunner<Int>& runner, std::size_t rows, std::size_t cols, bool transforms) {
  SmithForm form;
  form.rows = rows;
  form.cols = cols;
  form.rank = runner.run();
  for (std::size_t t = 0; t < form.rank; ++t) form.factors.emplace_back(runner.matrix()[t][t]);
  if (transforms) {
    form.left_inverse = to_big(runner.left_inverse());
    form.right = to_big(runner.right());
    form.right_inverse = to_big(runner.right_inverse());
  }
  return form;
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& a, bool with_transforms) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows == 0 ? 0 : a.front().size();
  for (const auto& row : a)
    if (row.size() != cols) throw Error(ErrorCode::kInvalidInput, "ragged integer matrix");
  try {
    SmithRunner<std::int64_t> runner(a, cols, with_transforms);
    return finish(runner, rows, cols, with_transforms);
  } catch (const Overflow&) {
    Mat<BigInt> big(rows, std::vector<BigInt>(cols));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) big[i][j] = a[i][j];
    SmithRunner<BigInt> runner(std::move(big), cols, with_transforms);
    return finish(runner, rows, cols, with_transforms);
  }
}

std::vector<BigInt> torsion_factors(const SmithForm& form) {
  std::vector<BigInt> out;
  for (const auto& d : form.factors)
    if (d > 1) out.push_back(d);
  return out;
}

std::int64_t to_int64(const BigInt& value) {
  if (value > std::numeric_limits<std::int64_t>::max() ||
      value < std::numeric_limits<std::int64_t>::min())
    throw Error(ErrorCode::kInvalidInput, "integer coefficient exceeds 64 bits");
  return static_cast<std::int64_t>(value);
}

std::size_t gf2_rank(Gf2Matrix rows, std::size_t cols) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && (rows[pivot][c] & 1U) == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && (rows[r][c] & 1U)) {
        for (std::size_t k = c; k < cols; ++k) rows[r][k] = (rows[r][k] ^ rows[rank][k]) & 1U;
      }
    }
    ++rank;
  }
  return rank;
}

std::vector<std::vector<std::uint8_t>> gf2_kernel(const Gf2Matrix& a, std::size_t cols) {
  Gf2Matrix rows = a;
  for (auto& row : rows)
    for (auto& v : row) v &= 1U;
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][c] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (r != rank && rows[r][c])
        for (std::size_t k = 0; k < cols; ++k) rows[r][k] ^= rows[rank][k];
    pivot_col.push_back(c);
    ++rank;
  }
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<std::uint8_t>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<std::uint8_t> v(cols, 0);
    v[free] = 1;
    for (std::size_t r = 0; r < rank; ++r)
      if (rows[r][free]) v[pivot_col[r]] = 1;
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<std::vector<std::uint8_t>> gf2_extend_basis(
    const std::vector<std::vector<std::uint8_t>>& base,
    const std::vector<std::vector<std::uint8_t>>& candidates) {
  // Echelon form of the span built so far; each reduced row keyed by its leading column.
  std::vector<std::vector<std::uint8_t>> echelon;
  std::vector<std::size_t> lead;
  auto reduce = [&](std::vector<std::uint8_t> v) {
    for (std::size_t r = 0; r < echelon.size(); ++r)
      if (v[lead[r]] & 1U)
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = (v[k] ^ echelon[r][k]) & 1U;
    return v;
  };
  auto insert = [&](const std::vector<std::uint8_t>& v) {
    auto red = reduce(v);
    auto it = std::find_if(red.begin(), red.end(), [](std::uint8_t x) { return (x & 1U) != 0; });
    if (it == red.end()) return false;
    echelon.push_back(red);
    lead.push_back(static_cast<std::size_t>(it - red.begin()));
    return true;
  };
  for (const auto& v : base) insert(v);
  std::vector<std::vector<std::uint8_t>> added;
  for (const auto& v : candidates)
    if (insert(v)) added.push_back(v);
  return added;
}

}  // namespace nodalcover
