#include "conjgrowth/conjugacy_census.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>
#include <unordered_set>

namespace conjgrowth {

namespace {

bool cyclicallyClosed(const GroupModel& model, const std::vector<Letter>& w) {
  if (w.size() < 2) return true;
  if (model.kind() == ModelKind::Free) {
    return w.back() != model.inverseLetter(w.front());
  }
  return !model.sameFactor(w.back(), w.front());
}

struct ShardTally {
  std::vector<std::uint64_t> pointedAt;
  std::vector<std::uint64_t> stableAt;
  std::vector<std::uint64_t> primPointedAt;
  std::vector<std::uint64_t> primStableAt;
  std::vector<std::vector<Letter>> reps;
};

}  // namespace

ConjugacyCensus buildConjugacyCensus(const GroupModel& model, int maxRadius,
                                     const ConjugacyCensusOptions& options) {
  if (maxRadius < 0) throw std::invalid_argument("maxRadius must be >= 0");
  if (model.isElementaryModel()) {
    throw std::invalid_argument("conjugacy census needs a nonelementary model");
  }
  const bool product = model.kind() == ModelKind::FreeProduct;
  const bool keepIndex = maxRadius <= options.indexCap;
  const int shardCount = std::max(1, options.enumeration.shards);
  BudgetCounter budget(options.enumeration.budget);

  std::vector<ShardTally> tallies(shardCount);
  for (auto& t : tallies) {
    t.pointedAt.assign(maxRadius + 1, 0);
    t.stableAt.assign(maxRadius + 1, 0);
    t.primPointedAt.assign(maxRadius + 1, 0);
    t.primStableAt.assign(maxRadius + 1, 0);
  }

  auto runShard = [&](int shard) {
    auto& tally = tallies[shard];
    walkBall(model, maxRadius, shard, shardCount, budget,
             [&](const std::vector<Letter>& w) {
               if (!cyclicallyClosed(model, w)) return;
               if (leastRotation(w) != w) return;
               const int m = static_cast<int>(w.size());
               if (product && m == 1) {
                 ++tally.pointedAt[m];  // torsion class, tau = 0
               } else {
                 ++tally.pointedAt[m];
                 ++tally.stableAt[m];
                 if (minimalPeriod(w) == m) {
                   ++tally.primPointedAt[m];
                   ++tally.primStableAt[m];
                 }
               }
               if (keepIndex) tally.reps.push_back(w);
             });
  };

  if (shardCount == 1) {
    runShard(0);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(shardCount);
    for (int s = 0; s < shardCount; ++s) {
      threads.emplace_back([&, s] {
        try {
          runShard(s);
        } catch (...) {
          errors[s] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  ConjugacyCensus census;
  census.modelSig = model.signature();
  census.maxRadius = maxRadius;
  census.classesAtLength.assign(maxRadius + 1, 0);
  census.classesAtLength[0] = 1;  // identity class
  std::vector<std::uint64_t> stableAt(maxRadius + 1, 0);
  std::vector<std::uint64_t> primPointedAt(maxRadius + 1, 0);
  std::vector<std::uint64_t> primStableAt(maxRadius + 1, 0);
  for (const auto& tally : tallies) {
    for (int n = 1; n <= maxRadius; ++n) {
      census.classesAtLength[n] += tally.pointedAt[n];
      stableAt[n] += tally.stableAt[n];
      primPointedAt[n] += tally.primPointedAt[n];
      primStableAt[n] += tally.primStableAt[n];
    }
  }
  census.countsPointed.assign(maxRadius + 1, 0);
  census.countsStableCapped.assign(maxRadius + 1, 0);
  census.primitivePointed.assign(maxRadius + 1, 0);
  census.primitiveStableCapped.assign(maxRadius + 1, 0);
  std::uint64_t cp = 0, cs = 0, pp = 0, ps = 0;
  for (int n = 0; n <= maxRadius; ++n) {
    cp += census.classesAtLength[n];
    cs += stableAt[n];
    pp += primPointedAt[n];
    ps += primStableAt[n];
    census.countsPointed[n] = cp;
    census.countsStableCapped[n] = cs;
    census.primitivePointed[n] = pp;
    census.primitiveStableCapped[n] = ps;
  }

  if (keepIndex) {
    census.indexBuilt = true;
    Element rep = identity(model);
    for (const auto& tally : tallies) {
      for (const auto& w : tally.reps) {
        const int m = static_cast<int>(w.size());
        ConjugacyRecord rec;
        rep.word = w;
        rec.canonicalRep = rep;
        if (product && m == 1) {
          rec.tau = 0;
          rec.pointedLength = 1;
          rec.isPrimitive = false;
          rec.root = rep;
          rec.exponent = 1;
        } else {
          rec.tau = m;
          rec.pointedLength = m;
          const int p = minimalPeriod(w);
          rec.isPrimitive = p == m;
          rec.root = rep;
          rec.root.word.assign(w.begin(), w.begin() + p);
          rec.exponent = m / p;
        }
        census.classIndex.emplace(rec.canonicalRep, std::move(rec));
      }
    }
  }
  return census;
}

EnvelopeReport envelopeCheck(const ConjugacyCensus& census, double deltaHat,
                             int windowLo, int windowHi) {
  if (windowLo < 1 || windowHi > census.maxRadius || windowHi - windowLo < 1) {
    throw std::invalid_argument("envelope window too small for this census");
  }
  const std::array<const std::vector<std::uint64_t>*, 4> arrays = {
      &census.countsPointed, &census.countsStableCapped, &census.primitivePointed,
      &census.primitiveStableCapped};
  EnvelopeReport rep;
  rep.deltaHat = deltaHat;
  rep.windowLo = windowLo;
  rep.windowHi = windowHi;
  for (int a = 0; a < 4; ++a) {
    rep.curves[a].assign(census.maxRadius + 1, 0.0);
    for (int n = 1; n <= census.maxRadius; ++n) {
      rep.curves[a][n] = static_cast<double>(n) *
                         static_cast<double>((*arrays[a])[n]) /
                         std::exp(deltaHat * n);
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int n = windowLo; n <= windowHi; ++n) {
      lo = std::min(lo, rep.curves[a][n]);
      hi = std::max(hi, rep.curves[a][n]);
    }
    rep.windowMin[a] = lo;
    rep.windowMax[a] = hi;
    rep.ratio[a] = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  }
  return rep;
}

RatioCurve primitiveRatioCurve(const ConjugacyCensus& census) {
  RatioCurve curve;
  curve.pointedRatio.assign(census.maxRadius + 1, 0.0);
  curve.stableRatio.assign(census.maxRadius + 1, 0.0);
  std::vector<double> xs, ys;
  for (int n = 0; n <= census.maxRadius; ++n) {
    const std::uint64_t nonIdentity = census.countsPointed[n] - 1;
    curve.pointedRatio[n] =
        nonIdentity > 0
            ? static_cast<double>(census.primitivePointed[n]) / nonIdentity
            : 0.0;
    curve.stableRatio[n] =
        census.countsStableCapped[n] > 0
            ? static_cast<double>(census.primitiveStableCapped[n]) /
                  census.countsStableCapped[n]
            : 0.0;
    const double gap = 1.0 - curve.pointedRatio[n];
    if (n >= 1 && nonIdentity > 0 && gap > 0) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log(gap));
    }
  }
  if (xs.size() >= 2) {
    curve.decayFit = fitLogSlope(xs, ys);
    curve.decayFit.windowLo = static_cast<int>(xs.front());
    curve.decayFit.windowHi = static_cast<int>(xs.back());
  } else {
    curve.decayFit.degenerate = true;
  }
  return curve;
}

RotationWitness rotationDistinctness(const GroupModel& model, const Element& g) {
  if (g.modelSig != model.signature()) {
    throw std::invalid_argument("element from a different model");
  }
  if (g.isIdentity()) throw std::domain_error("identity has no rotations");
  auto [core, conj] = cyclicReduce(model, g);
  if (!(conj.isIdentity() && core == g)) {
    throw std::invalid_argument("rotation check needs a cyclically reduced input");
  }
  RotationWitness w;
  const int p = minimalPeriod(g.word);
  if (p == static_cast<int>(g.word.size())) {
    w.distinct = true;
  } else {
    w.distinct = false;
    w.firstIndex = 0;
    w.secondIndex = p;
  }
  return w;
}

AnnulusMultiplicity classAnnulusMultiplicity(const GroupModel& model, int n, int delta,
                                             const std::vector<Element>& sampleClasses,
                                             const EnumerationOptions& options) {
  if (n < 1 || delta < 0) throw std::invalid_argument("need n >= 1 and delta >= 0");
  BudgetCounter budget(options.budget);
  AnnulusMultiplicity out;
  const int cap = n + delta;
  const int lo = std::max(0, n - delta);
  for (const auto& g : sampleClasses) {
    ConjugacyRecord rec = conjugacyCanonical(model, g);
    out.reps.push_back(rec.canonicalRep);
    if (rec.pointedLength > cap) {
      out.memberCounts.push_back(0);
      continue;
    }
    std::unordered_set<Element, ElementHash> seen;
    std::vector<Element> frontier{rec.canonicalRep};
    seen.insert(rec.canonicalRep);
    std::uint64_t inWindow =
        rec.canonicalRep.length() >= lo && rec.canonicalRep.length() <= cap ? 1 : 0;
    while (!frontier.empty()) {
      std::vector<Element> next;
      for (const auto& u : frontier) {
        for (Letter x = 0; x < model.alphabetSize(); ++x) {
          Element t = identity(model);
          t.word.assign(1, x);
          Element v = conjugate(model, t, u);
          if (v.length() > cap) continue;
          if (!seen.insert(v).second) continue;
          budget.tick();
          if (v.length() >= lo) ++inWindow;
          next.push_back(v);
        }
      }
      frontier = std::move(next);
    }
    out.memberCounts.push_back(inWindow);
    out.maxOverN = std::max(
        out.maxOverN, static_cast<double>(inWindow) / static_cast<double>(n));
  }
  return out;
}

}  // namespace conjgrowth
