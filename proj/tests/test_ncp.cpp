#include <map>
#include <set>

#include "doctest.h"
#include "freelab/errors.hpp"
#include "freelab/ncp.hpp"
#include "oracles.hpp"

using namespace freelab;

namespace {

NonCrossingPartition P(const char* text) { return NonCrossingPartition::parse(text); }

oracle::Part as_part(const NonCrossingPartition& pi) { return oracle::canonical(pi.blocks()); }

NonCrossingPartition from_part(const oracle::Part& p, int n) {
  return NonCrossingPartition(GroundSet::first_n(n), p);
}

}  // namespace

TEST_CASE("enumeration of NCP([3]) lists the five partitions in lexicographic order") {
  const auto all = enumerate_ncp(GroundSet::first_n(3));
  REQUIRE(all.size() == 5);
  std::set<std::string> seen;
  for (const auto& p : all) seen.insert(p.to_string());
  CHECK(seen == std::set<std::string>{"1|2|3", "1 2|3", "1 3|2", "1|2 3", "1 2 3"});
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1] < all[i]);
}

TEST_CASE("single element ground set has one partition") {
  const auto all = enumerate_ncp(GroundSet({4}));
  REQUIRE(all.size() == 1);
  CHECK(all[0].to_string() == "4");
}

TEST_CASE("enumeration matches the brute-force non-crossing filter") {
  for (int n = 1; n <= 8; ++n) {
    std::set<oracle::Part> lib, ref;
    for (const auto& p : enumerate_ncp(GroundSet::first_n(n))) lib.insert(as_part(p));
    for (const auto& p : oracle::noncrossing(n)) ref.insert(p);
    CHECK(lib == ref);
    CHECK(lib.size() == oracle::catalan(static_cast<unsigned>(n)));
  }
}

TEST_CASE("counts follow the Catalan numbers up to ten points") {
  CHECK(enumerate_ncp(GroundSet::first_n(10)).size() == 16796);
  for (unsigned n = 0; n <= 10; ++n) CHECK(catalan(n) == oracle::catalan(n));
  CHECK(catalan(0) == 1);
  CHECK(catalan(1) == 1);
  CHECK(catalan(2) == 2);
  CHECK(catalan(3) == 5);
  CHECK(catalan(4) == 14);
  CHECK(catalan(10) == 16796);
}

TEST_CASE("enumeration on a non-contiguous ground set") {
  const auto all = enumerate_ncp(GroundSet({2, 5, 7, 11}));
  CHECK(all.size() == 14);
  for (const auto& p : all) CHECK(p.ground() == GroundSet({2, 5, 7, 11}));
}

TEST_CASE("enumeration cap") {
  CHECK_THROWS_AS(enumerate_ncp(GroundSet::first_n(13)), SizeLimitError);
  CHECK_THROWS_AS(enumerate_ncg(GroundSet::first_n(9)), SizeLimitError);
}

TEST_CASE("crossing test") {
  const std::vector<Block> fig = {{1, 8}, {2, 3, 7}, {4, 6}, {5}};
  CHECK(is_noncrossing_partition(fig, GroundSet::first_n(8)));
  const std::vector<Block> cross = {{1, 3}, {2, 4}};
  CHECK_FALSE(is_noncrossing_partition(cross, GroundSet::first_n(4)));
  const std::vector<Block> dec = {{1}, {2, 5, 9, 10}, {3, 4}, {6, 7, 8}};
  CHECK(is_noncrossing_partition(dec, GroundSet::first_n(10)));
  const std::vector<Block> missing = {{1, 2}};
  CHECK_THROWS_AS(is_noncrossing_partition(missing, GroundSet::first_n(3)), ValidationError);
  CHECK_THROWS_AS(NonCrossingPartition(GroundSet::first_n(4), cross), ValidationError);
}

TEST_CASE("canonical form and serialization round trip") {
  const auto p = NonCrossingPartition(GroundSet::first_n(6), {{6}, {4, 3, 1}, {5}, {2}});
  CHECK(p.to_string() == "1 3 4|2|5|6");
  CHECK(P("1 3 4|2|5|6") == p);
  CHECK(NonCrossingPartition::from_json(p.to_json()) == p);
  CHECK(p.to_json() == nlohmann::json::parse("[[1,3,4],[2],[5],[6]]"));
  CHECK_THROWS_AS(P("1 2|x"), ValidationError);
}

TEST_CASE("Kreweras complement worked examples") {
  CHECK(kreweras(P("1 3 4|2|5|6")) == P("1 2|3|4 5 6"));
  CHECK(kreweras(P("1 2 3 4|6 8|5|7")) == P("1|2|3|4 5 8|6 7"));
  CHECK(kreweras(P("1|2|3")) == P("1 2 3"));
  CHECK(kreweras(P("1 2 3")) == P("1|2|3"));
}

TEST_CASE("Kreweras complement agrees with the interleaving oracle") {
  for (int n = 1; n <= 6; ++n)
    for (const auto& p : oracle::noncrossing(n)) {
      const auto k = kreweras(from_part(p, n));
      CHECK(as_part(k) == oracle::kreweras(p, n));
    }
}

TEST_CASE("Kreweras block count, square and order reversal") {
  for (int n = 1; n <= 8; ++n) {
    const auto all = enumerate_ncp(GroundSet::first_n(n));
    for (const auto& p : all) {
      const auto k = kreweras(p);
      CHECK(p.num_blocks() + k.num_blocks() == static_cast<std::size_t>(n) + 1);
      CHECK(kreweras(k) == rotate(p, -1));
    }
    if (n <= 6)
      for (const auto& a : all)
        for (const auto& b : all) CHECK(refinement_leq(a, b) == refinement_leq(kreweras(b), kreweras(a)));
  }
}

TEST_CASE("Kreweras on a general ground set keeps the labels") {
  const auto p = NonCrossingPartition(GroundSet({2, 4, 7}), {{2, 7}, {4}});
  const auto k = kreweras(p);
  CHECK(k.ground() == p.ground());
  CHECK(k.num_blocks() == 2);
}

TEST_CASE("Moebius worked values") {
  CHECK(mobius_to_top(P("1 2|3|4")) == 2);
  CHECK(mobius_to_top(P("1 3|2|4")) == 1);
  CHECK(mobius_to_top(P("1 2 3 4")) == 1);
  CHECK(mobius_to_top(P("5 9")) == 1);
}

TEST_CASE("Moebius closed form equals the defining recursion") {
  for (int n = 1; n <= 6; ++n)
    for (const auto& p : oracle::noncrossing(n)) CHECK(mobius_to_top(from_part(p, n)) == oracle::mobius_to_top(p, n));
}

TEST_CASE("Moebius values sum to zero over the lattice") {
  for (int n = 2; n <= 8; ++n) {
    std::int64_t s = 0;
    for (const auto& p : enumerate_ncp(GroundSet::first_n(n))) s += mobius_to_top(p);
    CHECK(s == 0);
  }
}

TEST_CASE("refinement order") {
  CHECK(refinement_leq(P("1|2 5|3 4|6 8|7|9"), P("1|2 5 9|3 4|6 7 8")));
  CHECK(refinement_leq(P("1 2|3"), P("1 2|3")));
  CHECK_FALSE(refinement_leq(P("1 2|3"), P("1 3|2")));
  CHECK_THROWS_AS(refinement_leq(P("1|2"), P("1|3")), ValidationError);
}

TEST_CASE("graph enumeration on small sets") {
  const auto g3 = enumerate_ncg(GroundSet::first_n(3));
  CHECK(g3.size() == 8);
  CHECK(enumerate_connected_ncg(GroundSet::first_n(3)).size() == 4);
  const auto g1 = enumerate_ncg(GroundSet({1}));
  REQUIRE(g1.size() == 1);
  CHECK(g1[0].num_edges() == 0);
  CHECK(g1[0].is_connected());
  for (std::size_t i = 1; i < g3.size(); ++i) CHECK(g3[i - 1].edges() < g3[i].edges());
}

TEST_CASE("graph counts against brute force over edge subsets") {
  for (int n = 1; n <= 6; ++n) {
    std::vector<Edge> all_edges;
    for (int a = 1; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b) all_edges.emplace_back(a, b);
    std::size_t count = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << all_edges.size()); ++mask) {
      bool ok = true;
      for (std::size_t i = 0; i < all_edges.size() && ok; ++i)
        for (std::size_t j = 0; j < all_edges.size() && ok; ++j) {
          if (!((mask >> i) & 1) || !((mask >> j) & 1)) continue;
          auto [a, b] = all_edges[i];
          auto [c, d] = all_edges[j];
          if (a < c && c < b && b < d) ok = false;
        }
      count += ok;
    }
    CHECK(enumerate_ncg(GroundSet::first_n(n)).size() == count);
  }
}

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(NonCrossingGraph(GroundSet::first_n(4), {{1, 3}, {2, 4}}), ValidationError);
  CHECK_THROWS_AS(NonCrossingGraph(GroundSet::first_n(4), {{1, 1}}), ValidationError);
  CHECK_THROWS_AS(NonCrossingGraph(GroundSet::first_n(4), {{1, 2}, {2, 1}}), ValidationError);
  CHECK_THROWS_AS(NonCrossingGraph(GroundSet::first_n(4), {{1, 5}}), ValidationError);
  const NonCrossingGraph g(GroundSet::first_n(4), {{3, 1}, {1, 2}});
  CHECK(g.edges() == std::vector<Edge>{{1, 2}, {1, 3}});
}

TEST_CASE("connected components") {
  const NonCrossingGraph g(GroundSet::first_n(10), {{2, 5}, {5, 9}, {2, 9}, {2, 10}, {3, 4}, {6, 8}, {6, 7}});
  CHECK(components_partition(g) == P("1|2 5 9 10|3 4|6 7 8"));
  const NonCrossingGraph empty(GroundSet::first_n(3), {});
  CHECK(components_partition(empty) == NonCrossingPartition::finest(GroundSet::first_n(3)));
  const NonCrossingGraph path(GroundSet::first_n(3), {{1, 2}, {2, 3}});
  CHECK(components_partition(path) == P("1 2 3"));
}

TEST_CASE("graphs decompose into connected graphs on the blocks of their component partition") {
  for (int n = 1; n <= 7; ++n) {
    std::map<std::string, std::size_t> by_partition;
    for (const auto& g : enumerate_ncg(GroundSet::first_n(n))) {
      CHECK(is_noncrossing_partition(components_partition(g).blocks(), g.ground()));
      ++by_partition[components_partition(g).to_string()];
    }
    for (const auto& p : enumerate_ncp(GroundSet::first_n(n))) {
      std::size_t product = 1;
      for (const auto& b : p.blocks()) product *= enumerate_connected_ncg(GroundSet(b)).size();
      CHECK(by_partition[p.to_string()] == product);
    }
  }
}

TEST_CASE("dissection test") {
  CHECK(NonCrossingGraph(GroundSet::first_n(4), {{1, 3}}).is_dissection());
  CHECK_FALSE(NonCrossingGraph(GroundSet::first_n(4), {{1, 4}}).is_dissection());
  CHECK_FALSE(NonCrossingGraph(GroundSet::first_n(4), {{2, 3}}).is_dissection());
}
