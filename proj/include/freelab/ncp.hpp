#pragma once

// Non-crossing partitions and non-crossing graphs on finite ordered ground sets.
//
// Elements of a ground set S are thought of as points placed counter-clockwise
// on a circle in increasing order. All values here are immutable once built and
// are stored in a canonical form (blocks ascending, sorted by their minima;
// edges as (min,max) pairs sorted lexicographically), so equality is structural.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"

namespace freelab {

inline constexpr std::size_t kNcpEnumerationCap = 12;
inline constexpr std::size_t kNcgEnumerationCap = 8;

/// Strictly increasing, non-empty list of positive integers.
class GroundSet {
 public:
  explicit GroundSet(std::vector<int> elements);

  /// The set {1, ..., n}.
  static GroundSet first_n(int n);

  std::size_t size() const { return elements_.size(); }
  std::span<const int> elements() const { return elements_; }
  int operator[](std::size_t i) const { return elements_[i]; }

  bool contains(int element) const;
  /// Zero-based position of `element`; throws ValidationError if absent.
  std::size_t position(int element) const;

  std::string to_string() const;

  friend bool operator==(const GroundSet&, const GroundSet&) = default;

 private:
  std::vector<int> elements_;
};

using Block = std::vector<int>;
using Edge = std::pair<int, int>;

class NonCrossingPartition;
class NonCrossingGraph;

namespace detail {
// Builds a partition from blocks already known to be canonical and valid.
NonCrossingPartition unchecked_partition(GroundSet ground, std::vector<Block> blocks);
NonCrossingGraph unchecked_graph(GroundSet ground, std::vector<Edge> edges);
}  // namespace detail

class NonCrossingPartition {
 public:
  /// Validates that `blocks` partition `ground` without crossings and stores
  /// them canonically. Throws ValidationError otherwise.
  NonCrossingPartition(GroundSet ground, std::vector<Block> blocks);

  /// 0_S: every element in its own block.
  static NonCrossingPartition finest(const GroundSet& ground);
  /// 1_S: a single block.
  static NonCrossingPartition coarsest(const GroundSet& ground);

  /// Parses the compact text form "1 3 4|2|5|6". The ground set is the union
  /// of all listed elements.
  static NonCrossingPartition parse(std::string_view text);
  /// Parses a JSON list of lists, e.g. [[1,3,4],[2],[5],[6]].
  static NonCrossingPartition from_json(const nlohmann::json& j);

  const GroundSet& ground() const { return ground_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t num_blocks() const { return blocks_.size(); }

  std::size_t block_index_of(int element) const;
  const Block& block_of(int element) const { return blocks_[block_index_of(element)]; }

  std::string to_string() const;
  nlohmann::json to_json() const;

  friend bool operator==(const NonCrossingPartition& a, const NonCrossingPartition& b) {
    return a.ground_ == b.ground_ && a.blocks_ == b.blocks_;
  }
  /// Lexicographic order on the canonical block lists.
  friend std::strong_ordering operator<=>(const NonCrossingPartition& a,
                                          const NonCrossingPartition& b) {
    return a.blocks_ <=> b.blocks_;
  }

 private:
  struct Trusted {};
  NonCrossingPartition(Trusted, GroundSet ground, std::vector<Block> blocks);

  friend NonCrossingPartition detail::unchecked_partition(GroundSet, std::vector<Block>);

  GroundSet ground_;
  std::vector<Block> blocks_;
};

/// Whether `blocks` is non-crossing. Throws ValidationError if the blocks do
/// not partition `ground` exactly.
bool is_noncrossing_partition(std::span<const Block> blocks, const GroundSet& ground);

/// Every non-crossing partition of `ground`, lexicographic on canonical form.
/// Throws SizeLimitError when |ground| exceeds kNcpEnumerationCap.
std::vector<NonCrossingPartition> enumerate_ncp(const GroundSet& ground);

/// Kreweras complement K(pi): arcs x (following point x counter-clockwise)
/// and y share a block iff they lie in the same region of the disk cut by the
/// convex hulls of the blocks of pi.
NonCrossingPartition kreweras(const NonCrossingPartition& pi);

/// Relabels every element s_i by s_{i+steps} (indices taken cyclically).
NonCrossingPartition rotate(const NonCrossingPartition& pi, int steps);

/// Moebius value mu(pi, 1_S) from the Kreweras closed form
/// (-1)^{|pi|-1} prod_{B in K(pi)} C_{|B|-1}.
std::int64_t mobius_to_top(const NonCrossingPartition& pi);

/// pi <= sigma in the refinement order. Throws ValidationError when the
/// ground sets differ.
bool refinement_leq(const NonCrossingPartition& pi, const NonCrossingPartition& sigma);

boost::multiprecision::cpp_int catalan(unsigned n);

class NonCrossingGraph {
 public:
  /// Edges may be given in any orientation; they are stored as (min,max),
  /// sorted. Throws ValidationError on self-loops, duplicates, vertices outside
  /// the ground set, or crossing edges.
  NonCrossingGraph(GroundSet ground, std::vector<Edge> edges);

  const GroundSet& ground() const { return ground_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }

  bool is_connected() const;
  /// No edge joins two cyclically adjacent vertices.
  bool is_dissection() const;

  std::string to_string() const;

  friend bool operator==(const NonCrossingGraph&, const NonCrossingGraph&) = default;

 private:
  struct Trusted {};
  NonCrossingGraph(Trusted, GroundSet ground, std::vector<Edge> edges);
  friend NonCrossingGraph detail::unchecked_graph(GroundSet, std::vector<Edge>);

  GroundSet ground_;
  std::vector<Edge> edges_;
};

/// All non-crossing graphs on `ground`, lexicographic on the edge list.
/// Throws SizeLimitError when |ground| exceeds kNcgEnumerationCap.
std::vector<NonCrossingGraph> enumerate_ncg(const GroundSet& ground);
std::vector<NonCrossingGraph> enumerate_connected_ncg(const GroundSet& ground);

/// Partition of the ground set into connected components of `graph`.
NonCrossingPartition components_partition(const NonCrossingGraph& graph);

}  // namespace freelab
