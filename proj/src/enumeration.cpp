#include "conjgrowth/enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace conjgrowth {

namespace {

// Successor letters for the last letter of a normal form, in increasing id
// order. lastLetter == kNoLetter means the word is empty.
inline bool allowedAfter(const GroupModel& model, Letter last, Letter next) {
  if (last == kNoLetter) return true;
  if (model.kind() == ModelKind::Free) return next != model.inverseLetter(last);
  return !model.sameFactor(next, last);
}

void walkFrom(const GroupModel& model, std::vector<Letter>& word, int maxLen,
              BudgetCounter& budget,
              const std::function<void(const std::vector<Letter>&)>& visit) {
  if (static_cast<int>(word.size()) >= maxLen) return;
  Letter last = word.empty() ? kNoLetter : word.back();
  for (Letter x = 0; x < model.alphabetSize(); ++x) {
    if (!allowedAfter(model, last, x)) continue;
    word.push_back(x);
    budget.tick();
    visit(word);
    walkFrom(model, word, maxLen, budget, visit);
    word.pop_back();
  }
}

}  // namespace

void walkBall(const GroupModel& model, int maxLen, int shardIndex, int shardCount,
              BudgetCounter& budget,
              const std::function<void(const std::vector<Letter>&)>& visit) {
  if (maxLen <= 0) return;
  if (shardCount <= 1) {
    std::vector<Letter> word;
    word.reserve(maxLen);
    walkFrom(model, word, maxLen, budget, visit);
    return;
  }
  std::vector<Letter> word;
  word.reserve(maxLen);
  int prefixRank = 0;
  for (Letter a = 0; a < model.alphabetSize(); ++a) {
    if (shardIndex == 0) {
      word.assign(1, a);
      budget.tick();
      visit(word);
    }
    if (maxLen < 2) continue;
    for (Letter b = 0; b < model.alphabetSize(); ++b) {
      if (!allowedAfter(model, a, b)) continue;
      int assigned = prefixRank++ % shardCount;
      if (assigned != shardIndex) continue;
      word.assign({a, b});
      budget.tick();
      visit(word);
      walkFrom(model, word, maxLen, budget, visit);
    }
  }
}

void enumerateSphere(const GroupModel& model, int n,
                     const std::function<void(const Element&)>& visit,
                     const EnumerationOptions& options) {
  if (n < 0) throw std::invalid_argument("sphere radius must be >= 0");
  if (n == 0) {
    visit(identity(model));
    return;
  }
  BudgetCounter budget(options.budget);
  Element scratch = identity(model);
  for (int shard = 0; shard < std::max(1, options.shards); ++shard) {
    walkBall(model, n, shard, std::max(1, options.shards), budget,
             [&](const std::vector<Letter>& word) {
               if (static_cast<int>(word.size()) == n) {
                 scratch.word = word;
                 visit(scratch);
               }
             });
  }
}

std::vector<Element> sphereElements(const GroupModel& model, int n,
                                    const EnumerationOptions& options) {
  std::vector<Element> out;
  enumerateSphere(model, n, [&](const Element& e) { out.push_back(e); }, options);
  return out;
}

std::uint64_t sphereDigest(const GroupModel& model, int n,
                           const EnumerationOptions& options) {
  std::uint64_t acc = 0;
  std::uint64_t count = 0;
  ElementHash h;
  enumerateSphere(model, n,
                  [&](const Element& e) {
                    acc += static_cast<std::uint64_t>(h(e)) | 1;
                    ++count;
                  },
                  options);
  return acc ^ (count * 0x9e3779b97f4a7c15ULL);
}

CensusTable buildCensus(const GroupModel& model, int maxRadius, int annulusWidth,
                        const EnumerationOptions& options) {
  if (maxRadius < 0) throw std::invalid_argument("maxRadius must be >= 0");
  if (annulusWidth < 0) throw std::invalid_argument("annulus width must be >= 0");
  const int extended = maxRadius + annulusWidth;
  const int shardCount = std::max(1, options.shards);
  BudgetCounter budget(options.budget);

  std::vector<std::vector<std::uint64_t>> perShard(
      shardCount, std::vector<std::uint64_t>(extended + 1, 0));
  if (shardCount == 1) {
    walkBall(model, extended, 0, 1, budget,
             [&](const std::vector<Letter>& w) { ++perShard[0][w.size()]; });
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(shardCount);
    for (int s = 0; s < shardCount; ++s) {
      threads.emplace_back([&, s] {
        try {
          walkBall(model, extended, s, shardCount,
                   budget, [&](const std::vector<Letter>& w) { ++perShard[s][w.size()]; });
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

  std::vector<std::uint64_t> sphere(extended + 1, 0);
  sphere[0] = 1;
  for (int s = 0; s < shardCount; ++s) {
    for (int n = 1; n <= extended; ++n) sphere[n] += perShard[s][n];
  }

  CensusTable table;
  table.annulusWidth = annulusWidth;
  table.radii.resize(maxRadius + 1);
  table.sphereCounts.resize(maxRadius + 1);
  table.ballCounts.resize(maxRadius + 1);
  table.annulusCounts.resize(maxRadius + 1);
  std::uint64_t ball = 0;
  for (int n = 0; n <= maxRadius; ++n) {
    table.radii[n] = n;
    table.sphereCounts[n] = sphere[n];
    ball += sphere[n];
    table.ballCounts[n] = ball;
    std::uint64_t ann = 0;
    for (int m = std::max(0, n - annulusWidth); m <= n + annulusWidth; ++m) {
      ann += sphere[m];
    }
    table.annulusCounts[n] = ann;
  }
  return table;
}

GrowthFit fitLogSlope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("fit needs at least two points");
  }
  const std::size_t n = xs.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  GrowthFit fit;
  if (sxx == 0) {
    fit.degenerate = true;
    return fit;
  }
  fit.deltaHat = sxy / sxx;
  double intercept = my - fit.deltaHat * mx;
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = ys[i] - (intercept + fit.deltaHat * xs[i]);
    fit.maxAbsResidual = std::max(fit.maxAbsResidual, std::abs(fit.residuals[i]));
  }
  // Concavity check: consistently negative second differences of ys flag
  // subexponential growth (the fitted slope then overstates the exponent).
  if (n >= 3) {
    double acc = 0;
    for (std::size_t i = 2; i < n; ++i) acc += ys[i] - 2 * ys[i - 1] + ys[i - 2];
    fit.sublinearTrend = acc / static_cast<double>(n - 2) < -1e-4;
  }
  return fit;
}

GrowthFit growthExponent(const CensusTable& census) {
  const int count = static_cast<int>(census.ballCounts.size());
  if (count < 4) throw std::invalid_argument("growth fit needs at least 4 radii");
  const int maxR = census.radii.back();
  const int lo = (maxR + 1) / 2;
  std::vector<double> xs, ys;
  bool constant = true;
  for (int n = lo; n <= maxR; ++n) {
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(static_cast<double>(census.ballCounts[n])));
    if (census.ballCounts[n] != census.ballCounts[lo]) constant = false;
  }
  if (constant) {
    GrowthFit fit;
    fit.degenerate = true;
    fit.windowLo = lo;
    fit.windowHi = maxR;
    return fit;
  }
  GrowthFit fit = fitLogSlope(xs, ys);
  fit.windowLo = lo;
  fit.windowHi = maxR;
  return fit;
}

}  // namespace conjgrowth
