#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace nodalcover {

using BigInt = boost::multiprecision::cpp_int;
using IntMatrix = std::vector<std::vector<std::int64_t>>;
using BigMatrix = std::vector<std::vector<BigInt>>;

/// Smith normal form U * A * V = D of an integer matrix.
///
/// Pivots are chosen by minimal absolute value. The elimination first runs in
/// checked 64-bit arithmetic and transparently restarts in arbitrary precision
/// if any intermediate value overflows.
struct SmithForm {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t rank = 0;
  /// Nonzero diagonal entries d_1 | d_2 | ... | d_rank, all positive.
  std::vector<BigInt> factors;
  /// Populated only when transforms are requested.
  BigMatrix left_inverse;   // U^{-1}, rows x rows
  BigMatrix right;          // V, cols x cols
  BigMatrix right_inverse;  // V^{-1}, cols x cols
};

SmithForm smith_normal_form(const IntMatrix& a, bool with_transforms = false);

/// Invariant factors greater than one (the torsion part of Z^rows / im A).
std::vector<BigInt> torsion_factors(const SmithForm& form);

/// Narrowing that throws if the value does not fit.
std::int64_t to_int64(const BigInt& value);

// Dense GF(2) helpers. Entries are 0/1 bytes; all inputs are reduced mod 2.
using Gf2Matrix = std::vector<std::vector<std::uint8_t>>;

std::size_t gf2_rank(Gf2Matrix rows, std::size_t cols);

/// Basis of {x : A x = 0} over GF(2) for an r x cols matrix A.
std::vector<std::vector<std::uint8_t>> gf2_kernel(const Gf2Matrix& a, std::size_t cols);

/// Greedy completion: returns the members of `candidates` that extend a basis
/// of span(`base`) to a basis of span(base + candidates).
std::vector<std::vector<std::uint8_t>> gf2_extend_basis(
    const std::vector<std::vector<std::uint8_t>>& base,
    const std::vector<std::vector<std::uint8_t>>& candidates);

}  // namespace nodalcover
