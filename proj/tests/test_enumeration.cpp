#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "conjgrowth/enumeration.hpp"
#include "conjgrowth/group_model.hpp"
#include "conjgrowth/stallings.hpp"
#include "doctest.h"

using namespace conjgrowth;

namespace {

// Independent sphere-count oracle: breadth-first layers by one-letter right
// multiplication, deduplicated on normal forms. Shares nothing with the DFS
// enumerator beyond the group operations.
std::vector<std::uint64_t> bfsSphereCounts(const GroupModel& model, int maxR) {
  std::unordered_set<Element, ElementHash> seen;
  std::vector<Element> frontier{identity(model)};
  seen.insert(frontier.front());
  std::vector<std::uint64_t> counts{1};
  for (int n = 1; n <= maxR; ++n) {
    std::vector<Element> next;
    for (const auto& u : frontier) {
      for (Letter x = 0; x < model.alphabetSize(); ++x) {
        Element w = multiply(model, u, normalize(model, {x}));
        if (static_cast<int>(w.word.size()) != n) continue;
        if (seen.insert(w).second) next.push_back(w);
      }
    }
    counts.push_back(next.size());
    frontier = std::move(next);
  }
  return counts;
}

std::uint64_t freeSphere(int k, int n) {
  if (n == 0) return 1;
  std::uint64_t v = 2 * static_cast<std::uint64_t>(k);
  for (int i = 1; i < n; ++i) v *= 2 * k - 1;
  return v;
}

std::uint64_t freeBall(int k, int n) {
  std::uint64_t acc = 1;
  for (int m = 1; m <= n; ++m) acc += freeSphere(k, m);
  return acc;
}

std::vector<std::vector<Letter>> collectWalk(const GroupModel& model, int maxLen,
                                             int shardIndex, int shardCount) {
  std::vector<std::vector<Letter>> words;
  BudgetCounter budget(1'000'000);
  walkBall(model, maxLen, shardIndex, shardCount, budget,
           [&](const std::vector<Letter>& w) { words.push_back(w); });
  return words;
}

}  // namespace

TEST_CASE("sphere enumeration matches pinned counts and the BFS oracle") {
  auto f2 = GroupModel::free(2);
  auto z23 = GroupModel::freeProduct({2, 3});
  auto z34 = GroupModel::freeProduct({3, 4});

  auto s0 = sphereElements(f2, 0);
  REQUIRE(s0.size() == 1);
  CHECK(s0[0].isIdentity());

  CHECK(sphereElements(f2, 2).size() == 12);
  CHECK(sphereElements(z23, 4).size() == 8);

  for (const auto* model : {&f2, &z23, &z34}) {
    auto oracle = bfsSphereCounts(*model, 6);
    for (int n = 0; n <= 6; ++n) {
      CAPTURE(n);
      CHECK(sphereElements(*model, n).size() == oracle[n]);
    }
  }
}

TEST_CASE("sphere elements are distinct normal forms of the right length") {
  auto z34 = GroupModel::freeProduct({3, 4});
  auto elems = sphereElements(z34, 5);
  std::unordered_set<Element, ElementHash> dedup;
  for (const auto& e : elems) {
    CHECK(static_cast<int>(e.word.size()) == 5);
    CHECK(normalize(z34, e.word) == e);
    CHECK(dedup.insert(e).second);
  }

  // Repeat runs with a fixed shard plan reproduce the exact stream order.
  EnumerationOptions opts;
  opts.shards = 4;
  auto a = sphereElements(z34, 5, opts);
  auto b = sphereElements(z34, 5, opts);
  CHECK(a == b);
}

TEST_CASE("free-group closed forms hold exactly") {
  for (int k : {2, 3}) {
    auto model = GroupModel::free(k);
    auto census = buildCensus(model, k == 2 ? 10 : 7, 1);
    for (int n = 0; n < static_cast<int>(census.radii.size()); ++n) {
      CAPTURE(k);
      CAPTURE(n);
      CHECK(census.sphereCounts[n] == freeSphere(k, n));
      CHECK(census.ballCounts[n] == freeBall(k, n));
      CHECK(census.ballCounts[n] ==
            (static_cast<std::uint64_t>(k) *
                 static_cast<std::uint64_t>(std::llround(std::pow(2 * k - 1, n))) -
             1) /
                (k - 1));
    }
  }
}

TEST_CASE("census tables carry the pinned example values") {
  auto f2 = GroupModel::free(2);
  auto census = buildCensus(f2, 5, 1);
  CHECK(census.ballCounts[5] == 485);
  CHECK(census.annulusCounts[5] == 108 + 324 + 972);

  auto z23 = GroupModel::freeProduct({2, 3});
  auto zc = buildCensus(z23, 5, 1);
  std::vector<std::uint64_t> expected{3, 4, 6, 8, 12};
  for (int n = 1; n <= 5; ++n) CHECK(zc.sphereCounts[n] == expected[n - 1]);
}

TEST_CASE("census invariants: prefix sums, annulus windows, monotone balls") {
  auto z23 = GroupModel::freeProduct({2, 3});
  auto wide = buildCensus(z23, 8, 0);
  auto census = buildCensus(z23, 6, 2);
  std::uint64_t run = 0;
  for (int n = 0; n <= 6; ++n) {
    CHECK(census.sphereCounts[n] == wide.sphereCounts[n]);
    run += census.sphereCounts[n];
    CHECK(census.ballCounts[n] == run);
    CHECK(census.ballCounts[n] > 0);
    if (n > 0) CHECK(census.ballCounts[n] >= census.ballCounts[n - 1]);
    std::uint64_t ann = 0;
    for (int m = std::max(0, n - 2); m <= n + 2; ++m) ann += wide.sphereCounts[m];
    CHECK(census.annulusCounts[n] == ann);
  }

  auto zero = buildCensus(z23, 6, 0);
  CHECK(zero.annulusCounts == zero.sphereCounts);
}

TEST_CASE("budget overruns raise the explicit error, also across threads") {
  auto f2 = GroupModel::free(2);
  EnumerationOptions tight;
  tight.budget = 50;
  CHECK_THROWS_AS(buildCensus(f2, 6, 0, tight), EnumerationBudgetError);

  tight.shards = 4;
  try {
    buildCensus(f2, 8, 0, tight);
    FAIL("expected a budget error");
  } catch (const EnumerationBudgetError& err) {
    CHECK(err.budget == 50);
    CHECK(err.visited > err.budget);
  }
}

TEST_CASE("sharded walks merge to the serial multiset") {
  auto f2 = GroupModel::free(2);
  auto z23 = GroupModel::freeProduct({2, 3});
  for (const auto* model : {&f2, &z23}) {
    auto serial = collectWalk(*model, 4, 0, 1);
    CHECK(serial.size() ==
          bfsSphereCounts(*model, 4)[1] + bfsSphereCounts(*model, 4)[2] +
              bfsSphereCounts(*model, 4)[3] + bfsSphereCounts(*model, 4)[4]);
    for (int shardCount : {2, 3, 5}) {
      std::vector<std::vector<Letter>> merged;
      for (int s = 0; s < shardCount; ++s) {
        auto part = collectWalk(*model, 4, s, shardCount);
        merged.insert(merged.end(), part.begin(), part.end());
      }
      auto sorted = serial;
      std::sort(sorted.begin(), sorted.end());
      std::sort(merged.begin(), merged.end());
      CHECK(merged == sorted);
    }
  }
}

TEST_CASE("sphere digests agree across shard plans and separate spheres") {
  auto f2 = GroupModel::free(2);
  auto z34 = GroupModel::freeProduct({3, 4});
  for (const auto* model : {&f2, &z34}) {
    for (int n : {3, 5, 7}) {
      EnumerationOptions one, four, sixteen;
      one.shards = 1;
      four.shards = 4;
      sixteen.shards = 16;
      auto d1 = sphereDigest(*model, n, one);
      CHECK(d1 == sphereDigest(*model, n, four));
      CHECK(d1 == sphereDigest(*model, n, sixteen));
    }
    CHECK(sphereDigest(*model, 3) != sphereDigest(*model, 4));
  }
}

TEST_CASE("growth exponent recovers exact geometric ratios") {
  for (double base : {2.0, 3.0}) {
    CensusTable table;
    table.annulusWidth = 0;
    std::uint64_t v = 7;
    for (int n = 0; n <= 12; ++n) {
      table.radii.push_back(n);
      table.sphereCounts.push_back(0);
      table.ballCounts.push_back(v);
      table.annulusCounts.push_back(0);
      v *= static_cast<std::uint64_t>(base);
    }
    auto fit = growthExponent(table);
    CHECK(!fit.degenerate);
    CHECK(fit.deltaHat == doctest::Approx(std::log(base)).epsilon(1e-9));
    CHECK(fit.maxAbsResidual < 1e-9);
  }
}

TEST_CASE("growth exponent on the two main models matches the known values") {
  auto f2 = GroupModel::free(2);
  auto fitF2 = growthExponent(buildCensus(f2, 12, 0));
  CHECK(std::abs(fitF2.deltaHat - std::log(3.0)) < 0.01);
  CHECK(!fitF2.degenerate);
  CHECK(!fitF2.sublinearTrend);

  auto z23 = GroupModel::freeProduct({2, 3});
  auto fitZ = growthExponent(buildCensus(z23, 20, 0));
  CHECK(std::abs(fitZ.deltaHat - 0.5 * std::log(2.0)) < 0.01);
  CHECK(!fitZ.degenerate);
}

TEST_CASE("rank-1 model is flagged as non-exponential") {
  auto z = GroupModel::free(1);
  auto fit = growthExponent(buildCensus(z, 60, 0));
  CHECK(fit.sublinearTrend);
  CHECK(fit.deltaHat < 0.05);
  CHECK(fit.deltaHat >= 0.0);

  CensusTable flat;
  for (int n = 0; n <= 6; ++n) {
    flat.radii.push_back(n);
    flat.sphereCounts.push_back(n == 0 ? 1 : 0);
    flat.ballCounts.push_back(1);
    flat.annulusCounts.push_back(1);
  }
  auto degenerate = growthExponent(flat);
  CHECK(degenerate.degenerate);
  CHECK(degenerate.deltaHat == 0.0);
}

TEST_CASE("subgroup automata fold correctly and decide membership") {
  auto f2 = GroupModel::free(2);
  auto gen = [&](const std::string& s) { return parseElement(f2, s); };

  auto whole = SubgroupAutomaton::build(f2, {gen("a"), gen("b")});
  CHECK(whole.stateCount() == 1);
  CHECK(whole.contains(gen("a b a' b'")));

  auto cyclicA = SubgroupAutomaton::build(f2, {gen("a")});
  CHECK(cyclicA.stateCount() == 1);
  CHECK(cyclicA.contains(gen("a a a")));
  CHECK(cyclicA.contains(gen("a' a'")));
  CHECK(!cyclicA.contains(gen("b")));
  CHECK(!cyclicA.contains(gen("a b")));

  auto squares = SubgroupAutomaton::build(f2, {gen("a a")});
  CHECK(squares.stateCount() == 2);
  CHECK(squares.contains(gen("a a")));
  CHECK(squares.contains(gen("a' a'")));
  CHECK(!squares.contains(gen("a")));
  CHECK(!squares.contains(gen("a a a")));

  auto conj = SubgroupAutomaton::build(f2, {gen("a"), gen("b a b'")});
  CHECK(conj.stateCount() == 2);
  CHECK(conj.contains(gen("b a a b'")));
  CHECK(conj.contains(gen("a b a' b'")));
  CHECK(!conj.contains(gen("a b")));
  CHECK(!conj.contains(gen("b")));
}

TEST_CASE("automaton membership equals the even-b-exponent oracle on a full ball") {
  auto f2 = GroupModel::free(2);
  auto gen = [&](const std::string& s) { return parseElement(f2, s); };
  // a, b^2, bab^-1 are Schreier generators for the kernel of the b-exponent
  // mod 2 map, so membership has an exact independent oracle.
  auto evenB = SubgroupAutomaton::build(f2, {gen("a"), gen("b b"), gen("b a b'")});
  int checked = 0;
  forEachBallElement(f2, 5, [&](const Element& w) {
    int bexp = 0;
    for (Letter x : w.word) {
      if (x == 2) ++bexp;
      if (x == 3) --bexp;
    }
    CHECK(evenB.contains(w) == (bexp % 2 == 0));
    ++checked;
  });
  CHECK(checked == 485);
}

TEST_CASE("automaton construction rejects bad inputs") {
  auto f2 = GroupModel::free(2);
  auto z23 = GroupModel::freeProduct({2, 3});
  CHECK_THROWS_AS(SubgroupAutomaton::build(z23, {parseElement(z23, "s")}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SubgroupAutomaton::build(f2, {parseElement(z23, "s")}),
                  std::invalid_argument);
  auto aut = SubgroupAutomaton::build(f2, {parseElement(f2, "a")});
  CHECK_THROWS_AS(aut.contains(parseElement(z23, "s")), std::invalid_argument);
}

TEST_CASE("scc estimator reproduces the pinned escape-set examples") {
  auto f2 = GroupModel::free(2);
  auto gen = [&](const std::string& s) { return parseElement(f2, s); };

  auto axis = sccEstimate(f2, {gen("a")}, 1, 1, 8);
  CHECK(axis.escapeEmpty);
  CHECK(axis.escapeTotal == 0);
  CHECK(axis.subgroupTotal == 16);
  for (int n = 1; n <= 8; ++n) CHECK(axis.subgroupSphere[n] == 2);

  auto whole = sccEstimate(f2, {gen("a"), gen("b")}, 1, 2, 6);
  CHECK(whole.escapeEmpty);
  CHECK(whole.subgroupSphere[3] == 36);

  auto conj = sccEstimate(f2, {gen("a"), gen("b a b'")}, 2, 2, 6);
  CHECK(conj.escapeSphere[3] == 0);
  CHECK(conj.escapeEmpty);

  auto far = sccEstimate(f2, {gen("b a b'")}, 0, 0, 8);
  CHECK(!far.escapeEmpty);
  CHECK(far.subgroupSphere[3] == 2);
  CHECK(far.escapeSphere[3] == 2);
  CHECK(far.escapeSphere[4] == 2);
  for (int n = 0; n <= 8; ++n) CHECK(far.escapeSphere[n] <= far.subgroupSphere[n]);
  CHECK(std::abs(far.exponentGap) < 0.2);
}

TEST_CASE("scc estimator guards its inputs and budget") {
  auto f2 = GroupModel::free(2);
  auto z23 = GroupModel::freeProduct({2, 3});
  CHECK_THROWS_AS(sccEstimate(z23, {parseElement(z23, "s")}, 1, 1, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(sccEstimate(f2, {parseElement(f2, "a")}, -1, 0, 4),
                  std::invalid_argument);
  EnumerationOptions tight;
  tight.budget = 3;
  CHECK_THROWS_AS(
      sccEstimate(f2, {parseElement(f2, "a"), parseElement(f2, "b")}, 1, 1, 6, tight),
      EnumerationBudgetError);
}
