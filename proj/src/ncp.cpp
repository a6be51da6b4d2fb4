#include "freelab/ncp.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "freelab/detail/lattice_tables.hpp"
#include "freelab/errors.hpp"

namespace freelab {

using detail::Mask;

namespace {

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

bool crosses(int a, int b, int c, int d) {
  // Edges/blocks given as a < b and c < d.
  return (a < c && c < b && b < d) || (c < a && a < d && d < b);
}

std::vector<Block> canonical(std::vector<Block> blocks) {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end(),
            [](const Block& x, const Block& y) { return x.front() < y.front(); });
  return blocks;
}

// Block masks over positions -> canonical element blocks of `ground`.
std::vector<Block> blocks_from_masks(const std::vector<Mask>& masks, const GroundSet& ground) {
  std::vector<Block> out;
  out.reserve(masks.size());
  for (Mask m : masks) {
    Block b;
    for (Mask rest = m; rest != 0; rest &= rest - 1) b.push_back(ground[detail::lowest_index(rest)]);
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<Mask> masks_from_blocks(const std::vector<Block>& blocks, const GroundSet& ground) {
  std::vector<Mask> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) {
    Mask m = 0;
    for (int e : b) m |= Mask{1} << ground.position(e);
    out.push_back(m);
  }
  return out;
}

bool masks_noncrossing(const std::vector<Mask>& blocks) {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      if (i == j) continue;
      // a<c<b<d with a,b in block i and c,d in block j: some element of j lies
      // strictly between two elements of i while another lies above both.
      for (Mask ri = blocks[i]; ri != 0; ri &= ri - 1) {
        const int a = detail::lowest_index(ri);
        for (Mask rb = ri & (ri - 1); rb != 0; rb &= rb - 1) {
          const int b = detail::lowest_index(rb);
          const Mask between = ((Mask{1} << b) - 1) & ~((Mask{2} << a) - 1);
          const Mask above = ~((Mask{2} << b) - 1);
          if ((blocks[j] & between) && (blocks[j] & above)) return false;
        }
      }
    }
  }
  return true;
}

std::vector<Mask> kreweras_masks(const std::vector<Mask>& blocks, std::size_t n) {
  // Arc x sits between point x and x+1. Arcs i<j share a region iff no block
  // has points both in (i, j] and outside it.
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Mask inside = ((Mask{2} << j) - 1) & ~((Mask{2} << i) - 1);
      const bool separated = std::any_of(blocks.begin(), blocks.end(), [&](Mask b) {
        return (b & inside) != 0 && (b & ~inside) != 0;
      });
      if (!separated) uf.unite(i, j);
    }
  }
  std::vector<Mask> out;
  std::vector<int> slot(n, -1);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t root = uf.find(x);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(out.size());
      out.push_back(0);
    }
    out[static_cast<std::size_t>(slot[root])] |= Mask{1} << x;
  }
  return out;  // roots are minima, so already ordered by lowest bit
}

std::int64_t catalan_i64(std::size_t n) {
  static const std::array<std::int64_t, 20> table = [] {
    std::array<std::int64_t, 20> c{};
    c[0] = 1;
    for (std::size_t i = 1; i < c.size(); ++i) c[i] = c[i - 1] * 2 * (2 * static_cast<std::int64_t>(i) - 1) / (static_cast<std::int64_t>(i) + 1);
    return c;
  }();
  return table.at(n);
}

std::int64_t mobius_from_kreweras(std::size_t num_blocks, const std::vector<Mask>& k_blocks) {
  std::int64_t value = (num_blocks % 2 == 1) ? 1 : -1;
  for (Mask b : k_blocks) value *= catalan_i64(static_cast<std::size_t>(detail::popcount(b)) - 1);
  return value;
}

// All non-crossing partitions of the position interval [lo, hi], unordered.
using MaskPartitions = std::vector<std::vector<Mask>>;

MaskPartitions interval_partitions(int lo, int hi, std::map<std::pair<int, int>, MaskPartitions>& memo) {
  if (lo > hi) return {{}};
  const auto key = std::make_pair(lo, hi);
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  MaskPartitions result;
  const int len = hi - lo;  // elements after lo
  for (Mask choice = 0; choice < (Mask{1} << len); ++choice) {
    // Block of lo: lo plus the chosen later positions.
    Mask block = Mask{1} << lo;
    std::vector<int> members{lo};
    for (int i = 0; i < len; ++i) {
      if (choice & (Mask{1} << i)) {
        block |= Mask{1} << (lo + 1 + i);
        members.push_back(lo + 1 + i);
      }
    }
    // Gaps between consecutive members, and the tail after the last one.
    std::vector<std::pair<int, int>> gaps;
    for (std::size_t i = 0; i + 1 < members.size(); ++i) gaps.emplace_back(members[i] + 1, members[i + 1] - 1);
    gaps.emplace_back(members.back() + 1, hi);

    MaskPartitions partial{{block}};
    for (auto [a, b] : gaps) {
      const MaskPartitions sub = interval_partitions(a, b, memo);
      MaskPartitions next;
      next.reserve(partial.size() * sub.size());
      for (const auto& p : partial) {
        for (const auto& s : sub) {
          auto merged = p;
          merged.insert(merged.end(), s.begin(), s.end());
          next.push_back(std::move(merged));
        }
      }
      partial = std::move(next);
    }
    for (auto& p : partial) result.push_back(std::move(p));
  }
  memo.emplace(key, result);
  return result;
}

std::vector<detail::PartitionEntry> build_ncp_table(std::size_t n) {
  std::map<std::pair<int, int>, MaskPartitions> memo;
  MaskPartitions raw = interval_partitions(0, static_cast<int>(n) - 1, memo);

  // Canonical order: lexicographic on block lists of positions.
  std::vector<std::vector<Block>> as_blocks;
  as_blocks.reserve(raw.size());
  for (auto& p : raw) {
    std::sort(p.begin(), p.end(), [](Mask a, Mask b) { return detail::lowest_index(a) < detail::lowest_index(b); });
    std::vector<Block> bl;
    for (Mask m : p) {
      Block b;
      for (Mask r = m; r != 0; r &= r - 1) b.push_back(detail::lowest_index(r));
      bl.push_back(std::move(b));
    }
    as_blocks.push_back(std::move(bl));
  }
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return as_blocks[a] < as_blocks[b]; });

  std::vector<detail::PartitionEntry> table;
  table.reserve(raw.size());
  for (std::size_t idx : order) {
    detail::PartitionEntry e;
    e.blocks = raw[idx];
    e.kreweras_blocks = kreweras_masks(e.blocks, n);
    e.mobius = mobius_from_kreweras(e.blocks.size(), e.kreweras_blocks);
    table.push_back(std::move(e));
  }
  return table;
}

std::vector<std::vector<std::pair<int, int>>> build_graph_edge_lists(std::size_t n) {
  std::vector<std::pair<int, int>> candidates;
  for (int a = 0; a < static_cast<int>(n); ++a)
    for (int b = a + 1; b < static_cast<int>(n); ++b) candidates.emplace_back(a, b);

  std::vector<std::vector<std::pair<int, int>>> out;
  std::vector<std::pair<int, int>> current;
  auto recurse = [&](auto&& self, std::size_t next) -> void {
    if (next == candidates.size()) {
      out.push_back(current);
      return;
    }
    self(self, next + 1);
    const auto [c, d] = candidates[next];
    const bool ok = std::none_of(current.begin(), current.end(),
                                 [&](const auto& e) { return crosses(e.first, e.second, c, d); });
    if (ok) {
      current.push_back(candidates[next]);
      self(self, next + 1);
      current.pop_back();
    }
  };
  recurse(recurse, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Mask> component_masks(const std::vector<std::pair<int, int>>& edges, std::size_t n) {
  UnionFind uf(n);
  for (auto [a, b] : edges) uf.unite(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  std::vector<Mask> out;
  std::vector<int> slot(n, -1);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t root = uf.find(x);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(out.size());
      out.push_back(0);
    }
    out[static_cast<std::size_t>(slot[root])] |= Mask{1} << x;
  }
  return out;
}

}  // namespace

namespace detail {

const std::vector<PartitionEntry>& ncp_table(std::size_t n) {
  if (n == 0 || n > kNcpEnumerationCap) throw SizeLimitError("non-crossing partition table", n, kNcpEnumerationCap);
  static std::array<std::once_flag, kNcpEnumerationCap + 1> flags;
  static std::array<std::vector<PartitionEntry>, kNcpEnumerationCap + 1> tables;
  std::call_once(flags[n], [n] { tables[n] = build_ncp_table(n); });
  return tables[n];
}

std::size_t ncp_index(std::size_t n, const std::vector<Mask>& blocks) {
  static std::array<std::once_flag, kNcpEnumerationCap + 1> flags;
  static std::array<std::map<std::vector<Mask>, std::size_t>, kNcpEnumerationCap + 1> index;
  const auto& table = ncp_table(n);
  std::call_once(flags[n], [&] {
    for (std::size_t i = 0; i < table.size(); ++i) index[n].emplace(table[i].blocks, i);
  });
  auto it = index[n].find(blocks);
  if (it == index[n].end()) throw ValidationError("block masks do not form a non-crossing partition");
  return it->second;
}

const std::vector<GraphEntry>& ncg_table(std::size_t n) {
  if (n == 0 || n > kNcgEnumerationCap) throw SizeLimitError("non-crossing graph table", n, kNcgEnumerationCap);
  static std::array<std::once_flag, kNcgEnumerationCap + 1> flags;
  static std::array<std::vector<GraphEntry>, kNcgEnumerationCap + 1> tables;
  std::call_once(flags[n], [n] {
    auto lists = build_graph_edge_lists(n);
    std::vector<GraphEntry> table;
    table.reserve(lists.size());
    for (auto& edges : lists) {
      GraphEntry e;
      const auto comps = component_masks(edges, n);
      e.partition_index = ncp_index(n, comps);
      e.connected = comps.size() == 1;
      e.edges = std::move(edges);
      table.push_back(std::move(e));
    }
    tables[n] = std::move(table);
  });
  return tables[n];
}

NonCrossingPartition unchecked_partition(GroundSet ground, std::vector<Block> blocks) {
  return NonCrossingPartition(NonCrossingPartition::Trusted{}, std::move(ground), std::move(blocks));
}

NonCrossingGraph unchecked_graph(GroundSet ground, std::vector<Edge> edges) {
  return NonCrossingGraph(NonCrossingGraph::Trusted{}, std::move(ground), std::move(edges));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// GroundSet

GroundSet::GroundSet(std::vector<int> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw ValidationError("ground set must be non-empty");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i] < 1) throw ValidationError("ground set elements must be positive integers");
    if (i > 0 && elements_[i] <= elements_[i - 1])
      throw ValidationError("ground set elements must be strictly increasing");
  }
}

GroundSet GroundSet::first_n(int n) {
  if (n < 1) throw ValidationError("ground set size must be at least 1");
  std::vector<int> e(static_cast<std::size_t>(n));
  std::iota(e.begin(), e.end(), 1);
  return GroundSet(std::move(e));
}

bool GroundSet::contains(int element) const {
  return std::binary_search(elements_.begin(), elements_.end(), element);
}

std::size_t GroundSet::position(int element) const {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), element);
  if (it == elements_.end() || *it != element)
    throw ValidationError("element " + std::to_string(element) + " is not in the ground set");
  return static_cast<std::size_t>(it - elements_.begin());
}

std::string GroundSet::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < elements_.size(); ++i) os << (i ? "," : "") << elements_[i];
  os << '}';
  return os.str();
}

// ---------------------------------------------------------------------------
// NonCrossingPartition

NonCrossingPartition::NonCrossingPartition(GroundSet ground, std::vector<Block> blocks)
    : ground_(std::move(ground)), blocks_(canonical(std::move(blocks))) {
  if (!is_noncrossing_partition(blocks_, ground_))
    throw ValidationError("partition " + to_string() + " is crossing");
}

NonCrossingPartition::NonCrossingPartition(Trusted, GroundSet ground, std::vector<Block> blocks)
    : ground_(std::move(ground)), blocks_(std::move(blocks)) {}

NonCrossingPartition NonCrossingPartition::finest(const GroundSet& ground) {
  std::vector<Block> blocks;
  for (int e : ground.elements()) blocks.push_back({e});
  return NonCrossingPartition(Trusted{}, ground, std::move(blocks));
}

NonCrossingPartition NonCrossingPartition::coarsest(const GroundSet& ground) {
  Block all(ground.elements().begin(), ground.elements().end());
  return NonCrossingPartition(Trusted{}, ground, {std::move(all)});
}

NonCrossingPartition NonCrossingPartition::parse(std::string_view text) {
  std::vector<Block> blocks;
  std::vector<int> all;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t bar = std::min(text.find('|', start), text.size());
    std::istringstream is{std::string(text.substr(start, bar - start))};
    Block b;
    std::string token;
    while (is >> token) {
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) throw ValidationError("invalid partition element '" + token + "'");
      b.push_back(v);
    }
    if (b.empty()) throw ValidationError("empty block in partition text '" + std::string(text) + "'");
    all.insert(all.end(), b.begin(), b.end());
    blocks.push_back(std::move(b));
    start = bar + 1;
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw ValidationError("repeated element in partition text '" + std::string(text) + "'");
  return NonCrossingPartition(GroundSet(std::move(all)), std::move(blocks));
}

NonCrossingPartition NonCrossingPartition::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("partition JSON must be a list of lists");
  std::vector<Block> blocks;
  std::vector<int> all;
  for (const auto& jb : j) {
    if (!jb.is_array() || jb.empty()) throw ValidationError("partition JSON blocks must be non-empty lists");
    Block b;
    for (const auto& v : jb) {
      if (!v.is_number_integer()) throw ValidationError("partition JSON elements must be integers");
      b.push_back(v.get<int>());
    }
    all.insert(all.end(), b.begin(), b.end());
    blocks.push_back(std::move(b));
  }
  if (blocks.empty()) throw ValidationError("partition JSON must contain at least one block");
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) throw ValidationError("repeated element in partition JSON");
  return NonCrossingPartition(GroundSet(std::move(all)), std::move(blocks));
}

std::size_t NonCrossingPartition::block_index_of(int element) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (std::binary_search(blocks_[i].begin(), blocks_[i].end(), element)) return i;
  throw ValidationError("element " + std::to_string(element) + " is not in the ground set");
}

std::string NonCrossingPartition::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i) os << '|';
    for (std::size_t j = 0; j < blocks_[i].size(); ++j) os << (j ? " " : "") << blocks_[i][j];
  }
  return os.str();
}

nlohmann::json NonCrossingPartition::to_json() const { return nlohmann::json(blocks_); }

// ---------------------------------------------------------------------------
// Lattice operations

bool is_noncrossing_partition(std::span<const Block> blocks, const GroundSet& ground) {
  std::vector<int> seen(ground.size(), 0);
  std::vector<Mask> masks;
  for (const auto& b : blocks) {
    if (b.empty()) throw ValidationError("blocks must be non-empty");
    Mask m = 0;
    for (int e : b) {
      if (!ground.contains(e))
        throw ValidationError("element " + std::to_string(e) + " is not in ground set " + ground.to_string());
      const std::size_t p = ground.position(e);
      if (seen[p]++) throw ValidationError("element " + std::to_string(e) + " appears in more than one block");
      m |= Mask{1} << p;
    }
    masks.push_back(m);
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw ValidationError("blocks do not cover ground set " + ground.to_string());
  if (ground.size() > 32) throw SizeLimitError("crossing test", ground.size(), 32);
  return masks_noncrossing(masks);
}

std::vector<NonCrossingPartition> enumerate_ncp(const GroundSet& ground) {
  if (ground.size() > kNcpEnumerationCap) throw SizeLimitError("enumerate_ncp", ground.size(), kNcpEnumerationCap);
  const auto& table = detail::ncp_table(ground.size());
  std::vector<NonCrossingPartition> out;
  out.reserve(table.size());
  for (const auto& e : table) out.push_back(detail::unchecked_partition(ground, blocks_from_masks(e.blocks, ground)));
  return out;
}

NonCrossingPartition kreweras(const NonCrossingPartition& pi) {
  const auto& g = pi.ground();
  if (g.size() > 32) throw SizeLimitError("kreweras", g.size(), 32);
  auto k = kreweras_masks(masks_from_blocks(pi.blocks(), g), g.size());
  return detail::unchecked_partition(g, blocks_from_masks(k, g));
}

NonCrossingPartition rotate(const NonCrossingPartition& pi, int steps) {
  const auto& g = pi.ground();
  const int n = static_cast<int>(g.size());
  std::vector<Block> blocks;
  for (const auto& b : pi.blocks()) {
    Block nb;
    for (int e : b) {
      const int p = static_cast<int>(g.position(e));
      nb.push_back(g[static_cast<std::size_t>(((p + steps) % n + n) % n)]);
    }
    blocks.push_back(std::move(nb));
  }
  return detail::unchecked_partition(g, canonical(std::move(blocks)));
}

std::int64_t mobius_to_top(const NonCrossingPartition& pi) {
  return mobius_from_kreweras(pi.num_blocks(), masks_from_blocks(kreweras(pi).blocks(), pi.ground()));
}

bool refinement_leq(const NonCrossingPartition& pi, const NonCrossingPartition& sigma) {
  if (!(pi.ground() == sigma.ground())) throw ValidationError("refinement_leq: ground sets differ");
  return std::all_of(pi.blocks().begin(), pi.blocks().end(), [&](const Block& b) {
    const Block& target = sigma.block_of(b.front());
    return std::includes(target.begin(), target.end(), b.begin(), b.end());
  });
}

boost::multiprecision::cpp_int catalan(unsigned n) {
  // C_{i+1} = C_i * 2(2i+1) / (i+2), exact at every step.
  boost::multiprecision::cpp_int c = 1;
  for (unsigned i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

// ---------------------------------------------------------------------------
// NonCrossingGraph

NonCrossingGraph::NonCrossingGraph(GroundSet ground, std::vector<Edge> edges) : ground_(std::move(ground)) {
  for (auto [a, b] : edges) {
    if (a == b) throw ValidationError("self-loop at vertex " + std::to_string(a));
    if (!ground_.contains(a) || !ground_.contains(b))
      throw ValidationError("edge (" + std::to_string(a) + "," + std::to_string(b) + ") leaves the ground set");
    edges_.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) throw ValidationError("duplicate edge");
  for (std::size_t i = 0; i < edges_.size(); ++i)
    for (std::size_t j = i + 1; j < edges_.size(); ++j)
      if (crosses(edges_[i].first, edges_[i].second, edges_[j].first, edges_[j].second))
        throw ValidationError("edges cross in graph " + to_string());
}

NonCrossingGraph::NonCrossingGraph(Trusted, GroundSet ground, std::vector<Edge> edges)
    : ground_(std::move(ground)), edges_(std::move(edges)) {}

bool NonCrossingGraph::is_connected() const { return components_partition(*this).num_blocks() == 1; }

bool NonCrossingGraph::is_dissection() const {
  const std::size_t n = ground_.size();
  return std::none_of(edges_.begin(), edges_.end(), [&](const Edge& e) {
    const std::size_t a = ground_.position(e.first), b = ground_.position(e.second);
    return b == a + 1 || (a == 0 && b == n - 1);
  });
}

std::string NonCrossingGraph::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < edges_.size(); ++i)
    os << (i ? "," : "") << '(' << edges_[i].first << ' ' << edges_[i].second << ')';
  os << '}';
  return os.str();
}

namespace {
std::vector<NonCrossingGraph> graphs_from_table(const GroundSet& ground, bool connected_only) {
  if (ground.size() > kNcgEnumerationCap) throw SizeLimitError("enumerate_ncg", ground.size(), kNcgEnumerationCap);
  const auto& table = detail::ncg_table(ground.size());
  std::vector<NonCrossingGraph> out;
  for (const auto& e : table) {
    if (connected_only && !e.connected) continue;
    std::vector<Edge> edges;
    edges.reserve(e.edges.size());
    for (auto [a, b] : e.edges)
      edges.emplace_back(ground[static_cast<std::size_t>(a)], ground[static_cast<std::size_t>(b)]);
    out.push_back(detail::unchecked_graph(ground, std::move(edges)));
  }
  return out;
}
}  // namespace

std::vector<NonCrossingGraph> enumerate_ncg(const GroundSet& ground) { return graphs_from_table(ground, false); }

std::vector<NonCrossingGraph> enumerate_connected_ncg(const GroundSet& ground) {
  return graphs_from_table(ground, true);
}

NonCrossingPartition components_partition(const NonCrossingGraph& graph) {
  const auto& g = graph.ground();
  std::vector<std::pair<int, int>> pos_edges;
  for (auto [a, b] : graph.edges())
    pos_edges.emplace_back(static_cast<int>(g.position(a)), static_cast<int>(g.position(b)));
  if (g.size() > 32) throw SizeLimitError("components_partition", g.size(), 32);
  return detail::unchecked_partition(g, blocks_from_masks(component_masks(pos_edges, g.size()), g));
}

}  // namespace freelab
