#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "conjgrowth/group_model.hpp"

namespace conjgrowth {

class EnumerationBudgetError : public std::runtime_error {
 public:
  EnumerationBudgetError(std::uint64_t visited, std::uint64_t budget)
      : std::runtime_error("enumeration budget exceeded: visited " +
                           std::to_string(visited) + " of allowed " +
                           std::to_string(budget)),
        visited(visited),
        budget(budget) {}
  std::uint64_t visited;
  std::uint64_t budget;
};

// Shared cap on enumerated elements. Thread safe; throws as soon as the total
// crosses the budget so exponential blowups fail loudly instead of swapping.
class BudgetCounter {
 public:
  explicit BudgetCounter(std::uint64_t budget) : budget_(budget) {}
  void tick() {
    std::uint64_t seen = count_.fetch_add(1, std::memory_order_relaxed) + 1;
    if (seen > budget_) throw EnumerationBudgetError(seen, budget_);
  }
  std::uint64_t count() const { return count_.load(std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> count_{0};
  std::uint64_t budget_;
};

struct EnumerationOptions {
  std::uint64_t budget = 100000000ULL;
  int shards = 1;
};

struct CensusTable {
  std::vector<int> radii;
  std::vector<std::uint64_t> sphereCounts;
  std::vector<std::uint64_t> ballCounts;
  int annulusWidth = 1;
  std::vector<std::uint64_t> annulusCounts;
};

struct GrowthFit {
  double deltaHat = 0.0;
  std::vector<double> residuals;
  double maxAbsResidual = 0.0;
  bool degenerate = false;       // constant counts over the fit window
  bool sublinearTrend = false;   // log counts visibly concave over the window
  int windowLo = 0;
  int windowHi = 0;
};

// Depth-first walk of all normal forms of length 1..maxLen in lexicographic
// letter order. visit(word) fires once per element at every intermediate
// length. Sharding: the walk below depth 2 is split by the rank of the
// length-2 prefix; words shorter than 2 letters belong to shard 0. The merged
// multiset over all shards equals the serial walk (shardCount 1).
void walkBall(const GroupModel& model, int maxLen, int shardIndex, int shardCount,
              BudgetCounter& budget,
              const std::function<void(const std::vector<Letter>&)>& visit);

// Streams the sphere of radius n in deterministic order (serial DFS when
// options.shards == 1; shard-major order otherwise).
void enumerateSphere(const GroupModel& model, int n,
                     const std::function<void(const Element&)>& visit,
                     const EnumerationOptions& options = {});
std::vector<Element> sphereElements(const GroupModel& model, int n,
                                    const EnumerationOptions& options = {});

// Order-insensitive digest of the sphere multiset; equal across shard plans.
std::uint64_t sphereDigest(const GroupModel& model, int n,
                           const EnumerationOptions& options = {});

CensusTable buildCensus(const GroupModel& model, int maxRadius, int annulusWidth,
                        const EnumerationOptions& options = {});

// Least-squares slope of log(ballCounts) over the largest half of the radii.
GrowthFit growthExponent(const CensusTable& census);

// Shared fitting helper: slope of ys against xs with per-point residuals.
GrowthFit fitLogSlope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace conjgrowth
