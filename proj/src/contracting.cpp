#include "conjgrowth/contracting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <thread>
#include <unordered_map>

namespace conjgrowth {

namespace {

void checkPair(const GroupModel& model, const Element& e, const char* what) {
  if (e.modelSig != model.signature()) {
    throw std::invalid_argument(std::string(what) + " belongs to a different model");
  }
}

inline long long floorDiv(long long a, long long b) {
  long long q = a / b;
  if (a % b != 0 && (a < 0) != (b < 0)) --q;
  return q;
}

// Bi-infinite geodesic line conj * core^Z: vertexAt(j) walks j letters of the
// periodic core word from conj * o. The core must be cyclically reduced and
// nontorsion, so consecutive vertices are at distance exactly |i - j|.
struct AxisLine {
  Element conj;
  Element core;
  Element coreInv;
  long long period = 0;

  Element vertexAt(const GroupModel& model, long long j) const {
    long long q = floorDiv(j, period);
    long long r = j - q * period;
    std::vector<Letter> raw = conj.word;
    if (q >= 0) {
      for (long long c = 0; c < q; ++c) raw.insert(raw.end(), core.word.begin(), core.word.end());
    } else {
      for (long long c = 0; c < -q; ++c)
        raw.insert(raw.end(), coreInv.word.begin(), coreInv.word.end());
    }
    raw.insert(raw.end(), core.word.begin(), core.word.begin() + r);
    return normalize(model, raw);
  }
};

AxisLine makeLine(const GroupModel& model, const Element& g) {
  auto [core, conj] = cyclicReduce(model, g);
  AxisLine line;
  line.conj = conj;
  line.core = core;
  line.coreInv = invert(model, core);
  line.period = core.length();
  return line;
}

int diameterOf(const GroupModel& model, const std::vector<Element>& pts) {
  int best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      best = std::max(best, distance(model, pts[i], pts[j]));
    }
  }
  return best;
}

// Positions within a path that are epsilon-close to t * o (closeO) and to
// t * f * o (closeF), per candidate t. A forward barrier witness is a row with
// min(closeO) <= max(closeF).
struct BarrierRow {
  std::vector<int> closeO;
  std::vector<int> closeF;
};

std::vector<BarrierRow> barrierRows(const GroupModel& model,
                                    const std::vector<Element>& path, const Element& f,
                                    int epsilon,
                                    std::vector<Element>* candidates = nullptr) {
  std::unordered_map<Element, BarrierRow, ElementHash> table;
  std::vector<Element> ballE;
  forEachBallElement(model, epsilon, [&](const Element& u) { ballE.push_back(u); });
  const Element fInv = invert(model, f);
  for (int i = 0; i < static_cast<int>(path.size()); ++i) {
    for (const auto& u : ballE) {
      Element t = multiply(model, path[i], u);
      table[t].closeO.push_back(i);
      Element tPre = multiply(model, t, fInv);
      table[tPre].closeF.push_back(i);
    }
  }
  std::vector<BarrierRow> rows;
  for (auto& [t, row] : table) {
    if (row.closeO.empty() || row.closeF.empty()) continue;
    if (candidates) candidates->push_back(t);
    rows.push_back(std::move(row));
  }
  return rows;
}

// Subword occurrences of f in w whose full span lies inside vertex window
// [lo, hi]; on prefix geodesics an occurrence at i is exactly an epsilon = 0
// barrier with t = prefix(i).
std::vector<int> matchPositions(const std::vector<Letter>& w, const std::vector<Letter>& f,
                                int lo, int hi) {
  std::vector<int> out;
  const int fl = static_cast<int>(f.size());
  for (int i = lo; i + fl <= hi; ++i) {
    bool ok = true;
    for (int k = 0; k < fl; ++k) {
      if (w[i + k] != f[k]) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(i);
  }
  return out;
}

// Rows for the trimmed window [M, n - M] of the prefix geodesic of w,
// positions rebased to the window. Fast path at epsilon = 0.
std::vector<BarrierRow> rowsForWord(const GroupModel& model, const std::vector<Letter>& w,
                                    const BarrierSpec& spec) {
  const int n = static_cast<int>(w.size());
  const int lo = spec.M;
  const int hi = n - spec.M;
  std::vector<BarrierRow> rows;
  if (hi < lo) return rows;
  if (spec.epsilon == 0) {
    for (int m : matchPositions(w, spec.f.word, lo, hi)) {
      BarrierRow row;
      row.closeO.push_back(m - lo);
      row.closeF.push_back(m - lo + spec.f.length());
      rows.push_back(std::move(row));
    }
    return rows;
  }
  std::vector<Element> verts;
  Element cur;
  cur.modelSig = model.signature();
  cur.word.assign(w.begin(), w.begin() + lo);
  verts.push_back(cur);
  for (int i = lo; i < hi; ++i) {
    cur.word.push_back(w[i]);
    verts.push_back(cur);
  }
  return barrierRows(model, verts, spec.f, spec.epsilon);
}

bool rowsHaveBarrier(const std::vector<BarrierRow>& rows) {
  for (const auto& row : rows) {
    if (row.closeO.front() <= row.closeF.back()) return true;
  }
  return false;
}

// Greedy leftmost maximal barrier-free intervals over window vertex indices
// [0, hi], vertex disjoint, each of at least minLength edges; returns covered
// edge total.
long long greedyCoverage(const std::vector<BarrierRow>& rows, int hi, int minLength) {
  auto blocked = [&](int i, int j) {
    for (const auto& row : rows) {
      auto a = std::lower_bound(row.closeO.begin(), row.closeO.end(), i);
      if (a == row.closeO.end() || *a > j) continue;
      auto b = std::upper_bound(row.closeF.begin(), row.closeF.end(), j);
      if (b == row.closeF.begin()) continue;
      int last = *(b - 1);
      if (last >= i && *a <= last) return true;
    }
    return false;
  };
  long long covered = 0;
  int i = 0;
  while (i <= hi) {
    int j = i;
    while (j < hi && !blocked(i, j + 1)) ++j;
    if (j - i >= minLength) {
      covered += j - i;
      i = j + 1;
    } else {
      ++i;
    }
  }
  return covered;
}

void validateBarrierSpec(const GroupModel& model, const BarrierSpec& spec) {
  checkPair(model, spec.f, "barrier element");
  if (spec.f.isIdentity()) throw std::invalid_argument("barrier element must be nontrivial");
  if (spec.epsilon < 0) throw std::invalid_argument("epsilon must be >= 0");
  if (spec.M < 0) throw std::invalid_argument("M must be >= 0");
}

GrowthFit fitOverWindow(const std::vector<double>& xs, const std::vector<double>& ys,
                        int lo, int hi) {
  GrowthFit fit;
  fit.windowLo = lo;
  fit.windowHi = hi;
  if (xs.size() < 2) {
    fit.degenerate = true;
    return fit;
  }
  bool constant = true;
  for (double y : ys) {
    if (y != ys.front()) constant = false;
  }
  if (constant) {
    fit.degenerate = true;
    return fit;
  }
  GrowthFit inner = fitLogSlope(xs, ys);
  inner.windowLo = lo;
  inner.windowHi = hi;
  return inner;
}

template <typename PerWord>
void runSharded(const GroupModel& model, int maxLen, int shardCount, BudgetCounter& budget,
                const PerWord& perWord) {
  if (shardCount <= 1) {
    walkBall(model, maxLen, 0, 1, budget,
             [&](const std::vector<Letter>& w) { perWord(0, w); });
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(shardCount);
  for (int s = 0; s < shardCount; ++s) {
    threads.emplace_back([&, s] {
      try {
        walkBall(model, maxLen, s, shardCount, budget,
                 [&](const std::vector<Letter>& w) { perWord(s, w); });
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

}  // namespace

AxisSet makeAxis(const GroupModel& model, const Element& f, const Element& translate,
                 int radius, int reverserSearchRadius) {
  checkPair(model, f, "axis element");
  checkPair(model, translate, "axis translate");
  if (radius < 0) throw std::invalid_argument("radius must be >= 0");
  if (reverserSearchRadius < 0) {
    throw std::invalid_argument("reverser search radius must be >= 0");
  }
  AxisSet axis;
  axis.modelSig = model.signature();
  axis.base = f;
  axis.translate = translate;
  axis.radius = radius;
  axis.root = primitiveRoot(model, f).first;
  // Free groups are bi-orderable, so no element conjugates the root to its
  // inverse; the search is only meaningful in free products.
  if (model.kind() == ModelKind::FreeProduct) {
    const Element rootInv = invert(model, axis.root);
    std::optional<Element> found;
    forEachBallElement(model, reverserSearchRadius, [&](const Element& u) {
      if (found || u.isIdentity()) return;
      if (conjugate(model, u, axis.root) == rootInv) found = u;
    });
    axis.reverser = found;
  }
  const long long tau0 = stableLength(model, axis.root);
  std::vector<Element> branches = {identity(model)};
  if (axis.reverser) branches.push_back(*axis.reverser);
  for (const auto& branch : branches) {
    const Element tb = multiply(model, translate, branch);
    const long long kmax =
        (radius + tb.length() + axis.root.length()) / std::max<long long>(1, tau0) + 2;
    for (long long k = -kmax; k <= kmax; ++k) {
      Element pt = multiply(model, tb, power(model, axis.root, k));
      if (pt.length() > radius) continue;
      if (axis.pointSet.insert(pt).second) axis.points.push_back(pt);
    }
  }
  return axis;
}

ProjectionResult project(const GroupModel& model, const Element& x, const AxisSet& axis) {
  checkPair(model, x, "projected point");
  if (axis.modelSig != model.signature()) {
    throw std::invalid_argument("axis belongs to a different model");
  }
  if (axis.points.empty()) throw std::invalid_argument("axis has no materialized points");
  ProjectionResult result;
  result.distance = std::numeric_limits<int>::max();
  for (const auto& pt : axis.points) {
    int d = distance(model, x, pt);
    if (d < result.distance) {
      result.distance = d;
      result.points.clear();
      result.points.push_back(pt);
    } else if (d == result.distance) {
      result.points.push_back(pt);
    }
  }
  // Any orbit point outside the materialized ball is at distance > radius
  // from o, hence further from x than the found minimum only when the radius
  // dominates |x| + min; otherwise the minimum is uncertified.
  if (x.length() + result.distance > axis.radius) {
    throw MaterializationError(x.length() + result.distance, axis.radius);
  }
  return result;
}

int projectionDiameter(const GroupModel& model, const std::vector<Element>& a,
                       const AxisSet& axis) {
  std::vector<Element> cloud;
  std::unordered_set<Element, ElementHash> seen;
  for (const auto& x : a) {
    ProjectionResult pr = project(model, x, axis);
    for (auto& pt : pr.points) {
      if (seen.insert(pt).second) cloud.push_back(std::move(pt));
    }
  }
  return diameterOf(model, cloud);
}

std::optional<BarrierWitness> findBarrier(const GroupModel& model,
                                          const std::vector<Element>& path,
                                          const BarrierSpec& spec) {
  validateBarrierSpec(model, spec);
  if (path.empty()) throw std::invalid_argument("path must be nonempty");
  for (const auto& v : path) checkPair(model, v, "path vertex");
  std::vector<Element> candidates;
  std::vector<BarrierRow> rows = barrierRows(model, path, spec.f, spec.epsilon, &candidates);
  std::optional<BarrierWitness> best;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    int posO = rows[r].closeO.front();
    int posF = rows[r].closeF.back();
    if (posO > posF) continue;
    if (!best || shortlexLess(candidates[r], best->t)) {
      best = BarrierWitness{candidates[r], posO, posF};
    }
  }
  return best;
}

ContractionAudit contractionAudit(const GroupModel& model, const AxisSet& axis,
                                  int sampleRadius, const EnumerationOptions& options) {
  if (axis.modelSig != model.signature()) {
    throw std::invalid_argument("axis belongs to a different model");
  }
  if (sampleRadius < 0) throw std::invalid_argument("sample radius must be >= 0");
  if (axis.points.empty()) throw std::invalid_argument("axis has no materialized points");
  BudgetCounter budget(options.budget);

  const int P = static_cast<int>(axis.points.size());
  std::unordered_map<Element, int, ElementHash> ptIdx;
  for (int i = 0; i < P; ++i) ptIdx.emplace(axis.points[i], i);
  std::vector<int> ptDist(static_cast<std::size_t>(P) * P, 0);
  for (int i = 0; i < P; ++i) {
    for (int j = i + 1; j < P; ++j) {
      int d = distance(model, axis.points[i], axis.points[j]);
      ptDist[static_cast<std::size_t>(i) * P + j] = d;
      ptDist[static_cast<std::size_t>(j) * P + i] = d;
    }
  }
  auto spanOf = [&](const std::vector<int>& idx) {
    int best = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = i + 1; j < idx.size(); ++j) {
        best = std::max(best, ptDist[static_cast<std::size_t>(idx[i]) * P + idx[j]]);
      }
    }
    return best;
  };

  struct Entry {
    int dist;
    std::vector<int> argmin;
  };
  std::unordered_map<Element, Entry, ElementHash> cache;
  auto projOf = [&](const Element& x) -> const Entry& {
    auto it = cache.find(x);
    if (it != cache.end()) return it->second;
    Entry e;
    e.dist = std::numeric_limits<int>::max();
    for (int i = 0; i < P; ++i) {
      int d = distance(model, x, axis.points[i]);
      if (d < e.dist) {
        e.dist = d;
        e.argmin.clear();
        e.argmin.push_back(i);
      } else if (d == e.dist) {
        e.argmin.push_back(i);
      }
    }
    if (x.length() + e.dist > axis.radius) {
      throw MaterializationError(x.length() + e.dist, axis.radius);
    }
    return cache.emplace(x, std::move(e)).first->second;
  };

  ContractionAudit audit;
  auto consider = [&](const Element& a, const Element& b, int dist, int span) {
    int score = std::min(dist, span);
    if (score > audit.cEmp) {
      audit.cEmp = score;
      audit.witnessA = a;
      audit.witnessB = b;
      audit.witnessDistance = dist;
      audit.witnessSpan = span;
    }
  };

  forEachBallElement(model, sampleRadius, [&](const Element& v) {
    budget.tick();
    ++audit.samples;
    const Entry& e = projOf(v);
    // min(dist, span) can only beat the current max when dist does.
    if (e.dist > audit.cEmp) consider(v, v, e.dist, spanOf(e.argmin));
  });

  const int pairRadius = std::min(sampleRadius, 6);
  std::vector<Element> ball;
  forEachBallElement(model, pairRadius, [&](const Element& v) { ball.push_back(v); });
  for (std::size_t i = 0; i < ball.size(); ++i) {
    for (std::size_t j = i + 1; j < ball.size(); ++j) {
      budget.tick();
      ++audit.samples;
      const Element w = multiply(model, invert(model, ball[i]), ball[j]);
      Element cur = ball[i];
      int dmin = projOf(cur).dist;
      std::vector<const Entry*> entries = {&projOf(cur)};
      for (Letter x : w.word) {
        Element step;
        step.modelSig = model.signature();
        step.word.assign(1, x);
        cur = multiply(model, cur, step);
        const Entry& e = projOf(cur);
        dmin = std::min(dmin, e.dist);
        entries.push_back(&e);
      }
      if (dmin <= audit.cEmp) continue;
      std::vector<int> unionIdx;
      for (const Entry* e : entries) {
        unionIdx.insert(unionIdx.end(), e->argmin.begin(), e->argmin.end());
      }
      std::sort(unionIdx.begin(), unionIdx.end());
      unionIdx.erase(std::unique(unionIdx.begin(), unionIdx.end()), unionIdx.end());
      consider(ball[i], ball[j], dmin, spanOf(unionIdx));
    }
  }
  return audit;
}

IntersectionAudit boundedIntersectionAudit(const GroupModel& model, const Element& f,
                                           int sampleRadius,
                                           const EnumerationOptions& options) {
  checkPair(model, f, "axis element");
  if (sampleRadius < 0) throw std::invalid_argument("sample radius must be >= 0");
  BudgetCounter budget(options.budget);

  const int inner = sampleRadius + 2 * f.length() + 2;
  const int outer = 2 * inner + sampleRadius + 2;
  std::vector<Element> reps;
  forEachBallElement(model, sampleRadius, [&](const Element& t) {
    for (const auto& kept : reps) {
      if (inElementarySubgroup(model, multiply(model, invert(model, kept), t), f)) return;
    }
    reps.push_back(t);
  });

  std::vector<AxisSet> near, far;
  near.reserve(reps.size());
  far.reserve(reps.size());
  for (const auto& t : reps) {
    near.push_back(makeAxis(model, f, t, inner));
    far.push_back(makeAxis(model, f, t, outer));
  }

  IntersectionAudit audit;
  audit.axisCount = static_cast<int>(reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (std::size_t j = 0; j < reps.size(); ++j) {
      if (i == j) continue;
      budget.tick();
      ++audit.samples;
      int diam = projectionDiameter(model, near[i].points, far[j]);
      if (diam > audit.bEmp) {
        audit.bEmp = diam;
        audit.witnessT = reps[i];
        audit.witnessTPrime = reps[j];
      }
    }
  }
  return audit;
}

BarrierCensus barrierFreeCensus(const GroupModel& model, const BarrierSpec& spec,
                                int maxRadius, const EnumerationOptions& options) {
  validateBarrierSpec(model, spec);
  if (maxRadius < 0) throw std::invalid_argument("maxRadius must be >= 0");
  const int shardCount = std::max(1, options.shards);
  BudgetCounter budget(options.budget);

  std::vector<std::vector<std::uint64_t>> totals(shardCount,
                                                 std::vector<std::uint64_t>(maxRadius + 1, 0));
  std::vector<std::vector<std::uint64_t>> freeAt(shardCount,
                                                 std::vector<std::uint64_t>(maxRadius + 1, 0));
  runSharded(model, maxRadius, shardCount, budget,
             [&](int shard, const std::vector<Letter>& w) {
               const int n = static_cast<int>(w.size());
               ++totals[shard][n];
               if (!rowsHaveBarrier(rowsForWord(model, w, spec))) ++freeAt[shard][n];
             });

  BarrierCensus census;
  census.spec = spec;
  census.totals.assign(maxRadius + 1, 0);
  census.barrierFree.assign(maxRadius + 1, 0);
  census.totals[0] = 1;
  census.barrierFree[0] = 1;  // the empty path carries no barrier
  for (int s = 0; s < shardCount; ++s) {
    for (int n = 1; n <= maxRadius; ++n) {
      census.totals[n] += totals[s][n];
      census.barrierFree[n] += freeAt[s][n];
    }
  }
  census.fractions.assign(maxRadius + 1, 0.0);
  for (int n = 0; n <= maxRadius; ++n) {
    census.fractions[n] = census.totals[n] == 0
                              ? 0.0
                              : static_cast<double>(census.barrierFree[n]) /
                                    static_cast<double>(census.totals[n]);
  }
  const int lo = (maxRadius + 1) / 2;
  std::vector<double> xs, ys;
  for (int n = std::max(1, lo); n <= maxRadius; ++n) {
    if (census.fractions[n] <= 0.0) continue;
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(census.fractions[n]));
  }
  census.fractionFit = fitOverWindow(xs, ys, std::max(1, lo), maxRadius);
  return census;
}

FractionalBarrierCensus fractionalBarrierCensus(const GroupModel& model,
                                                const BarrierSpec& spec, double theta,
                                                int minLength, int maxRadius,
                                                const EnumerationOptions& options) {
  validateBarrierSpec(model, spec);
  if (!(theta > 0.0) || theta > 1.0) throw std::invalid_argument("theta must be in (0, 1]");
  if (minLength < 1) throw std::invalid_argument("minimum interval length must be >= 1");
  if (maxRadius < 0) throw std::invalid_argument("maxRadius must be >= 0");
  const int shardCount = std::max(1, options.shards);
  BudgetCounter budget(options.budget);

  std::vector<std::vector<std::uint64_t>> totals(shardCount,
                                                 std::vector<std::uint64_t>(maxRadius + 1, 0));
  std::vector<std::vector<std::uint64_t>> good(shardCount,
                                               std::vector<std::uint64_t>(maxRadius + 1, 0));
  runSharded(model, maxRadius, shardCount, budget,
             [&](int shard, const std::vector<Letter>& w) {
               const int n = static_cast<int>(w.size());
               ++totals[shard][n];
               const int hi = n - 2 * spec.M;
               long long covered =
                   hi < 0 ? 0 : greedyCoverage(rowsForWord(model, w, spec), hi, minLength);
               if (static_cast<double>(covered) + 1e-9 >= theta * n) ++good[shard][n];
             });

  FractionalBarrierCensus census;
  census.spec = spec;
  census.theta = theta;
  census.minLength = minLength;
  census.totals.assign(maxRadius + 1, 0);
  census.satisfied.assign(maxRadius + 1, 0);
  census.totals[0] = 1;
  census.satisfied[0] = 1;
  for (int s = 0; s < shardCount; ++s) {
    for (int n = 1; n <= maxRadius; ++n) {
      census.totals[n] += totals[s][n];
      census.satisfied[n] += good[s][n];
    }
  }
  census.fractions.assign(maxRadius + 1, 0.0);
  for (int n = 0; n <= maxRadius; ++n) {
    census.fractions[n] = census.totals[n] == 0
                              ? 0.0
                              : static_cast<double>(census.satisfied[n]) /
                                    static_cast<double>(census.totals[n]);
  }
  const int lo = std::max(1, (maxRadius + 1) / 2);
  std::vector<double> xs, ys;
  for (int n = lo; n <= maxRadius; ++n) {
    if (census.satisfied[n] == 0) continue;
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(static_cast<double>(census.satisfied[n])));
  }
  census.countFit = fitOverWindow(xs, ys, lo, maxRadius);
  return census;
}

namespace {

struct WitnessFrame {
  AxisLine line;
  long long tau = 0;
  long long s0 = 0;
  long long e0 = 0;
};

// Axis X_j = g^j * t1 * Ax(f) sized so that every projection of the witness
// vertices is certified: radius >= |x| + d(x, X_j) for all segment vertices x.
AxisSet blockAxis(const GroupModel& model, const AdmissiblePathWitness& witness, int j,
                  int vmax) {
  Element tj = multiply(model, power(model, witness.g, j), witness.axisTranslate);
  int radius = 2 * vmax + tj.length() + 1;
  return makeAxis(model, witness.axisBase, tj, radius);
}

int maxVertexLength(const AdmissiblePathWitness& witness) {
  int vmax = 0;
  for (const auto& seg : witness.pSegments) {
    for (const auto& v : seg) vmax = std::max(vmax, v.length());
  }
  for (const auto& seg : witness.qSegments) {
    for (const auto& v : seg) vmax = std::max(vmax, v.length());
  }
  return vmax;
}

}  // namespace

AdmissiblePathWitness buildAdmissibleWitness(const GroupModel& model, const Element& t1,
                                             const Element& f, int m, const Element& t2,
                                             long long D, int window) {
  checkPair(model, t1, "t1");
  checkPair(model, f, "f");
  checkPair(model, t2, "t2");
  if (D < 1) throw std::invalid_argument("D must be >= 1");
  if (window < 1) throw std::invalid_argument("window must be >= 1");

  const Element g =
      multiply(model, multiply(model, t1, power(model, f, m)), t2);
  const long long tau = stableLength(model, g);
  if (tau == 0) throw std::domain_error("g = t1 f^m t2 is torsion or trivial");

  AdmissiblePathWitness witness;
  witness.g = g;
  witness.axisBase = f;
  witness.axisTranslate = t1;
  witness.D = D;
  witness.windowLo = -window;
  witness.windowHi = window;

  AxisLine line = makeLine(model, g);
  const int xRadius =
      static_cast<int>(line.conj.length() + 3 * tau) + t1.length() + f.length() + 8;
  AxisSet x0 = makeAxis(model, f, t1, xRadius);

  std::vector<long long> hits;
  for (long long j = -tau; j <= 2 * tau; ++j) {
    if (x0.pointSet.count(line.vertexAt(model, j))) hits.push_back(j);
  }
  long long s0 = std::numeric_limits<long long>::min();
  for (long long h : hits) {
    if (h >= 0) {
      s0 = h;
      break;
    }
  }
  if (s0 == std::numeric_limits<long long>::min()) {
    throw std::domain_error("axis intersection misses the fundamental window");
  }
  long long e0 = s0;
  for (long long h : hits) {
    if (h > e0 && h <= s0 + tau) e0 = h;
  }
  if (e0 - s0 < D) throw std::domain_error("p_0 shorter than D");

  auto segment = [&](long long from, long long to) {
    std::vector<Element> seg;
    for (long long j = from; j <= to; ++j) seg.push_back(line.vertexAt(model, j));
    return seg;
  };
  for (int i = witness.windowLo; i <= witness.windowHi; ++i) {
    witness.qSegments.push_back(segment(e0 + (i - 1) * tau, s0 + i * tau));
    witness.pSegments.push_back(segment(s0 + i * tau, e0 + i * tau));
  }

  // The stored tau is the measured projection bound: the largest projection
  // diameter of any q_i onto a neighboring axis.
  const int vmax = maxVertexLength(witness);
  std::map<int, AxisSet> axes;
  long long measured = 0;
  for (int i = witness.windowLo; i <= witness.windowHi; ++i) {
    const auto& q = witness.qSegments[i - witness.windowLo];
    for (int j = i - 1; j <= i + 1; ++j) {
      auto it = axes.find(j);
      if (it == axes.end()) it = axes.emplace(j, blockAxis(model, witness, j, vmax)).first;
      measured = std::max(measured,
                          static_cast<long long>(projectionDiameter(model, q, it->second)));
    }
  }
  witness.tau = measured;
  return witness;
}

AdmissibleReport validateAdmissible(const GroupModel& model,
                                    const AdmissiblePathWitness& witness) {
  checkPair(model, witness.g, "witness g");
  checkPair(model, witness.axisBase, "witness axis base");
  checkPair(model, witness.axisTranslate, "witness axis translate");
  const int blocks = witness.windowHi - witness.windowLo + 1;
  if (witness.windowLo > 0 || witness.windowHi < 0 || blocks < 1 ||
      witness.pSegments.size() != static_cast<std::size_t>(blocks) ||
      witness.qSegments.size() != static_cast<std::size_t>(blocks)) {
    throw std::invalid_argument("witness window and segment counts disagree");
  }
  for (const auto& seg : witness.pSegments) {
    if (seg.size() < 2) throw std::invalid_argument("p segment needs at least one edge");
  }
  for (const auto& seg : witness.qSegments) {
    if (seg.empty()) throw std::invalid_argument("q segment must be nonempty");
  }
  if (witness.D < 1) throw std::invalid_argument("D must be >= 1");
  if (witness.tau < 0) throw std::invalid_argument("tau must be >= 0");

  const int vmax = maxVertexLength(witness);
  std::map<int, AxisSet> axes;
  auto axisAt = [&](int j) -> const AxisSet& {
    auto it = axes.find(j);
    if (it == axes.end()) it = axes.emplace(j, blockAxis(model, witness, j, vmax)).first;
    return it->second;
  };
  auto isGeodesic = [&](const std::vector<Element>& seg) {
    for (std::size_t k = 0; k + 1 < seg.size(); ++k) {
      if (distance(model, seg[k], seg[k + 1]) != 1) return false;
    }
    return distance(model, seg.front(), seg.back()) ==
           static_cast<int>(seg.size()) - 1;
  };

  AdmissibleReport report;
  report.cond1 = true;
  for (int i = witness.windowLo; i <= witness.windowHi; ++i) {
    const auto& p = witness.pSegments[i - witness.windowLo];
    const AxisSet& xi = axisAt(i);
    if (static_cast<long long>(p.size()) - 1 < witness.D) {
      report.cond1 = false;
      if (report.firstFailure.empty()) report.firstFailure = "p segment shorter than D";
    }
    if (!isGeodesic(p)) {
      report.cond1 = false;
      if (report.firstFailure.empty()) report.firstFailure = "p segment is not geodesic";
    }
    if (!xi.pointSet.count(p.front()) || !xi.pointSet.count(p.back())) {
      report.cond1 = false;
      if (report.firstFailure.empty()) report.firstFailure = "p endpoints leave the axis";
    }
  }

  report.cond2 = true;
  for (int i = witness.windowLo; i <= witness.windowHi; ++i) {
    const auto& q = witness.qSegments[i - witness.windowLo];
    if (!isGeodesic(q)) {
      report.cond2 = false;
      if (report.firstFailure.empty()) report.firstFailure = "q segment is not geodesic";
    }
    for (int j = i - 1; j <= i + 1; ++j) {
      if (projectionDiameter(model, q, axisAt(j)) > witness.tau) {
        report.cond2 = false;
        if (report.firstFailure.empty()) {
          report.firstFailure = "q projection exceeds tau";
        }
      }
    }
  }

  report.cond3 = true;
  auto failCond3 = [&](const char* why) {
    report.cond3 = false;
    if (report.firstFailure.empty()) report.firstFailure = why;
  };
  for (int i = witness.windowLo; i <= witness.windowHi; ++i) {
    const auto& q = witness.qSegments[i - witness.windowLo];
    const auto& p = witness.pSegments[i - witness.windowLo];
    if (q.back() != p.front()) failCond3("q and p blocks do not chain");
    if (i > witness.windowLo &&
        witness.pSegments[i - 1 - witness.windowLo].back() != q.front()) {
      failCond3("consecutive blocks do not chain");
    }
    const Element gi = power(model, witness.g, i);
    const auto& q0 = witness.qSegments[-witness.windowLo];
    const auto& p0 = witness.pSegments[-witness.windowLo];
    if (q.size() != q0.size() || p.size() != p0.size()) {
      failCond3("blocks are not g-translates of block 0");
      continue;
    }
    for (std::size_t k = 0; k < q.size(); ++k) {
      if (q[k] != multiply(model, gi, q0[k])) {
        failCond3("q block is not the g^i translate of q_0");
        break;
      }
    }
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] != multiply(model, gi, p0[k])) {
        failCond3("p block is not the g^i translate of p_0");
        break;
      }
    }
  }

  const auto& q0 = witness.qSegments[-witness.windowLo];
  const auto& p0 = witness.pSegments[-witness.windowLo];
  report.lengthDefect =
      std::llabs(stableLength(model, witness.g) -
                 (static_cast<long long>(p0.size()) - 1 +
                  static_cast<long long>(q0.size()) - 1));
  long long eps = 0;
  for (int i = witness.windowLo; i <= witness.windowHi; ++i) {
    for (const auto& v : witness.pSegments[i - witness.windowLo]) {
      eps = std::max<long long>(eps, project(model, v, axisAt(i)).distance);
    }
    for (const auto& v : witness.qSegments[i - witness.windowLo]) {
      eps = std::max<long long>(
          eps, std::min(project(model, v, axisAt(i - 1)).distance,
                        project(model, v, axisAt(i)).distance));
    }
  }
  report.measuredEpsilon = eps;
  return report;
}

AdmissiblePathWitness mutateAdmissible(const GroupModel& model,
                                       const AdmissiblePathWitness& witness,
                                       AdmissibleMutation kind) {
  checkPair(model, witness.g, "witness g");
  AdmissiblePathWitness out = witness;
  const int idx0 = -witness.windowLo;
  const auto& p0 = witness.pSegments[idx0];
  const long long lenP0 = static_cast<long long>(p0.size()) - 1;
  switch (kind) {
    case AdmissibleMutation::BumpD:
      out.D = lenP0 + 1;
      return out;
    case AdmissibleMutation::DetourQ: {
      if (lenP0 <= witness.tau) {
        throw std::domain_error("p_0 too short to force a projection violation");
      }
      // Walk p_0 forward and back before handing off to it: the detoured q_i
      // projects onto X_i with diameter >= len(p_0) > tau.
      std::vector<Element> q0 = witness.qSegments[idx0];
      for (std::size_t k = 1; k < p0.size(); ++k) q0.push_back(p0[k]);
      for (std::size_t k = p0.size() - 1; k-- > 0;) q0.push_back(p0[k]);
      for (int i = witness.windowLo; i <= witness.windowHi; ++i) {
        const Element gi = power(model, witness.g, i);
        auto& qi = out.qSegments[i - witness.windowLo];
        qi.clear();
        for (const auto& v : q0) qi.push_back(multiply(model, gi, v));
      }
      return out;
    }
    case AdmissibleMutation::ShiftP: {
      if (witness.windowHi < 1) {
        throw std::domain_error("shift mutation needs a block at index 1");
      }
      const Element root = primitiveRoot(model, witness.axisBase).first;
      const Element t1g = multiply(model, witness.g, witness.axisTranslate);
      const Element slide = conjugate(model, t1g, root);
      const int idx1 = 1 - witness.windowLo;
      for (auto& v : out.pSegments[idx1]) v = multiply(model, slide, v);
      for (auto& v : out.qSegments[idx1]) v = multiply(model, slide, v);
      return out;
    }
  }
  throw std::invalid_argument("unknown mutation kind");
}

StableAxisAudit stableAxisAudit(const GroupModel& model, const Element& g, int R,
                                int lineRange) {
  checkPair(model, g, "audited element");
  if (R < 0) throw std::invalid_argument("R must be >= 0");
  if (lineRange < 1) throw std::invalid_argument("line range must be >= 1");
  const long long tau = stableLength(model, g);
  if (tau == 0) throw std::domain_error("stable axis audit needs a nontorsion element");

  AxisLine line = makeLine(model, g);
  std::vector<Element> fuzz;
  forEachBallElement(model, R, [&](const Element& u) { fuzz.push_back(u); });

  StableAxisAudit audit;
  audit.bound = 2LL * R;
  for (long long j = -lineRange * tau; j <= lineRange * tau; ++j) {
    const Element v = line.vertexAt(model, j);
    for (const auto& u : fuzz) {
      const Element x = multiply(model, v, u);
      const Element moved = multiply(model, multiply(model, invert(model, x), g), x);
      const long long dg = moved.length();
      ++audit.samples;
      if (dg < 3LL * R) {
        ++audit.preconditionViolations;
        continue;
      }
      audit.maxDefect = std::max(audit.maxDefect, std::llabs(tau - dg));
    }
  }
  audit.pass = audit.maxDefect <= audit.bound;
  return audit;
}

LinearDriftCensus linearDriftCensus(const GroupModel& model, const Element& f, int m,
                                    double theta1, double theta2, int epsilon,
                                    int maxRadius, const EnumerationOptions& options) {
  checkPair(model, f, "drift element");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (theta1 < 0.0 || theta1 > 1.0 || theta2 < 0.0 || theta2 > 1.0) {
    throw std::invalid_argument("theta parameters must lie in [0, 1]");
  }
  if (epsilon < 0) throw std::invalid_argument("epsilon must be >= 0");
  if (maxRadius < 1) throw std::invalid_argument("maxRadius must be >= 1");
  if (stableLength(model, f) == 0) {
    throw std::domain_error("drift census needs a nontorsion f");
  }
  const Element fm = power(model, f, m);
  if (fm.isIdentity()) throw std::domain_error("f^m is trivial");
  const int shardCount = std::max(1, options.shards);
  BudgetCounter budget(options.budget);

  struct Tally {
    std::vector<std::uint64_t> total, c1, c2, c3, conj;
  };
  std::vector<Tally> tallies(shardCount);
  for (auto& t : tallies) {
    t.total.assign(maxRadius + 1, 0);
    t.c1.assign(maxRadius + 1, 0);
    t.c2.assign(maxRadius + 1, 0);
    t.c3.assign(maxRadius + 1, 0);
    t.conj.assign(maxRadius + 1, 0);
  }

  const bool product = model.kind() == ModelKind::FreeProduct;
  runSharded(model, maxRadius, shardCount, budget,
             [&](int shard, const std::vector<Letter>& w) {
               auto& tally = tallies[shard];
               const int n = static_cast<int>(w.size());
               ++tally.total[n];
               Element g;
               g.modelSig = model.signature();
               g.word = w;
               auto [core, conj] = cyclicReduce(model, g);
               const long long tau =
                   (product && core.length() <= 1) ? 0 : core.length();
               const bool c1 = static_cast<double>(tau) >= (1.0 - theta1) * n - 1e-9;
               bool c2 = false, c3 = false;
               if (tau > 0) {
                 long long dLine;
                 if (!product) {
                   dLine = conj.length();
                 } else {
                   AxisLine line;
                   line.conj = conj;
                   line.core = core;
                   line.coreInv = invert(model, core);
                   line.period = core.length();
                   dLine = std::numeric_limits<long long>::max();
                   const long long pad = 2LL * conj.length() + 1;
                   for (long long j = -pad; j <= tau + pad; ++j) {
                     dLine = std::min<long long>(dLine,
                                                 line.vertexAt(model, j).length());
                   }
                 }
                 c2 = static_cast<double>(dLine) <= theta2 * n + 1e-9;
                 if (epsilon == 0) {
                   // Period-shifted subword search along the axis line.
                   std::vector<Letter> buf;
                   while (static_cast<long long>(buf.size()) <
                          tau + fm.length()) {
                     buf.insert(buf.end(), core.word.begin(), core.word.end());
                   }
                   c3 = !matchPositions(buf, fm.word, 0,
                                        static_cast<int>(tau) + fm.length())
                             .empty();
                 } else {
                   AxisLine line;
                   line.conj = conj;
                   line.core = core;
                   line.coreInv = invert(model, core);
                   line.period = core.length();
                   std::vector<Element> windowPath;
                   const long long hiPos = tau + fm.length() + 2LL * epsilon;
                   for (long long j = 0; j <= hiPos; ++j) {
                     windowPath.push_back(line.vertexAt(model, j));
                   }
                   c3 = rowsHaveBarrier(
                       barrierRows(model, windowPath, fm, epsilon));
                 }
               }
               if (c1) ++tally.c1[n];
               if (c2) ++tally.c2[n];
               if (c3) ++tally.c3[n];
               if (c1 && c2 && c3) ++tally.conj[n];
             });

  LinearDriftCensus census;
  census.totals.assign(maxRadius + 1, 0);
  census.clause1.assign(maxRadius + 1, 0);
  census.clause2.assign(maxRadius + 1, 0);
  census.clause3.assign(maxRadius + 1, 0);
  census.conjunction.assign(maxRadius + 1, 0);
  census.totals[0] = 1;  // identity: no axis, all clauses fail
  for (const auto& tally : tallies) {
    for (int n = 1; n <= maxRadius; ++n) {
      census.totals[n] += tally.total[n];
      census.clause1[n] += tally.c1[n];
      census.clause2[n] += tally.c2[n];
      census.clause3[n] += tally.c3[n];
      census.conjunction[n] += tally.conj[n];
    }
  }
  census.fractions.assign(maxRadius + 1, 0.0);
  for (int n = 0; n <= maxRadius; ++n) {
    census.fractions[n] = census.totals[n] == 0
                              ? 0.0
                              : static_cast<double>(census.conjunction[n]) /
                                    static_cast<double>(census.totals[n]);
  }
  std::vector<double> xs, ys;
  for (int n = 1; n <= maxRadius; ++n) {
    const double gap = 1.0 - census.fractions[n];
    if (gap <= 0.0) continue;
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(gap));
  }
  census.gapFit = fitOverWindow(xs, ys, 1, maxRadius);
  return census;
}

}  // namespace conjgrowth
