#pragma once

// Position-indexed lattice tables shared by the numerical modules. A table for
// size n describes NCP({0..n-1}) or NCG({0..n-1}) with blocks as bitmasks over
// positions; it is relabelled onto any ground set of that size by mapping
// position i to the i-th element. Tables are built once, lazily, and are
// immutable afterwards.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace freelab::detail {

using Mask = std::uint32_t;

struct PartitionEntry {
  std::vector<Mask> blocks;           // sorted by lowest set bit
  std::vector<Mask> kreweras_blocks;  // K(pi), same convention
  std::int64_t mobius = 0;            // mu(pi, 1)
};

struct GraphEntry {
  std::vector<std::pair<int, int>> edges;  // position pairs (a < b), sorted
  std::size_t partition_index = 0;         // index of pi(E) in ncp_table(n)
  bool connected = false;
};

/// NCP({0..n-1}) in lexicographic canonical order, 1 <= n <= 12.
const std::vector<PartitionEntry>& ncp_table(std::size_t n);

/// NCG({0..n-1}) in lexicographic edge-list order, 1 <= n <= 8.
const std::vector<GraphEntry>& ncg_table(std::size_t n);

/// Index of the partition with the given (canonically ordered) block masks.
std::size_t ncp_index(std::size_t n, const std::vector<Mask>& blocks);

/// Deposits the low bits of `positions` onto the set bits of `subset`:
/// bit i of `positions` selects the i-th lowest set bit of `subset`.
inline Mask spread_bits(Mask positions, Mask subset) {
  Mask out = 0;
  for (Mask bit = 1; subset != 0; bit <<= 1) {
    const Mask lowest = subset & (~subset + 1);
    if (positions & bit) out |= lowest;
    subset &= subset - 1;
  }
  return out;
}

inline int popcount(Mask m) { return __builtin_popcount(m); }
inline int lowest_index(Mask m) { return __builtin_ctz(m); }

}  // namespace freelab::detail
