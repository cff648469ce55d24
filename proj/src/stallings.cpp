#include "conjgrowth/stallings.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace conjgrowth {

namespace {

struct RawEdge {
  int u;
  Letter x;
  int v;
};

}  // namespace

SubgroupAutomaton SubgroupAutomaton::build(const GroupModel& model,
                                           const std::vector<Element>& generators) {
  if (model.kind() != ModelKind::Free) {
    throw std::invalid_argument("subgroup automata support free-group models only");
  }
  std::vector<RawEdge> raw;
  int nStates = 1;  // state 0 is the basepoint
  for (const auto& gen : generators) {
    if (gen.modelSig != model.signature()) {
      throw std::invalid_argument("generator from a different model");
    }
    if (gen.isIdentity()) continue;
    int cur = 0;
    for (std::size_t i = 0; i < gen.word.size(); ++i) {
      int next = (i + 1 == gen.word.size()) ? 0 : nStates++;
      raw.push_back({cur, gen.word[i], next});
      cur = next;
    }
  }

  std::vector<int> parent(nStates);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int s) {
    while (parent[s] != s) {
      parent[s] = parent[parent[s]];
      s = parent[s];
    }
    return s;
  };

  // Fold to a fixpoint: whenever one state carries two equal-label edges to
  // different states, merge the targets. Each pass scans both edge directions.
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::pair<int, Letter>, int> seen;
    auto visit = [&](int u, Letter x, int v) {
      auto key = std::make_pair(u, x);
      auto it = seen.find(key);
      if (it == seen.end()) {
        seen.emplace(key, v);
      } else if (it->second != v) {
        parent[find(it->second)] = find(v);
        changed = true;
      }
    };
    for (const auto& e : raw) {
      visit(find(e.u), e.x, find(e.v));
      visit(find(e.v), model.inverseLetter(e.x), find(e.u));
    }
  }

  std::vector<int> index(nStates, -1);
  int live = 0;
  index[find(0)] = live++;
  for (int s = 0; s < nStates; ++s) {
    if (find(s) == s && index[s] < 0) index[s] = live++;
  }

  SubgroupAutomaton out;
  out.modelSig_ = model.signature();
  out.alphabet_ = model.alphabetSize();
  out.trans_.assign(live, std::vector<int>(model.alphabetSize(), -1));
  for (const auto& e : raw) {
    int u = index[find(e.u)];
    int v = index[find(e.v)];
    out.trans_[u][e.x] = v;
    out.trans_[v][model.inverseLetter(e.x)] = u;
  }
  return out;
}

bool SubgroupAutomaton::contains(const Element& h) const {
  if (h.modelSig != modelSig_) {
    throw std::invalid_argument("element from a different model");
  }
  int s = 0;
  for (Letter x : h.word) {
    s = trans_[s][x];
    if (s < 0) return false;
  }
  return s == 0;
}

namespace {

// Capped distance from v to the subgroup orbit H o: BFS over the ambient ball
// of radius cap around v with automaton membership tests. Returns cap + 1 when
// every vertex within the cap lies outside H o.
int cappedOrbitDistance(const GroupModel& model, const SubgroupAutomaton& aut,
                        const Element& v, int cap) {
  if (aut.contains(v)) return 0;
  if (cap == 0) return 1;
  std::vector<Element> frontier{v};
  std::vector<Element> seen{v};
  for (int depth = 1; depth <= cap; ++depth) {
    std::vector<Element> next;
    for (const auto& u : frontier) {
      for (Letter x = 0; x < model.alphabetSize(); ++x) {
        Element w = u;
        if (!w.word.empty() && x == model.inverseLetter(w.word.back())) {
          w.word.pop_back();
        } else {
          w.word.push_back(x);
        }
        if (std::find(seen.begin(), seen.end(), w) != seen.end()) continue;
        if (aut.contains(w)) return depth;
        seen.push_back(w);
        next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  return cap + 1;
}

}  // namespace

SccReport sccEstimate(const GroupModel& model, const std::vector<Element>& generators,
                      int M1, int M2, int maxRadius,
                      const EnumerationOptions& options) {
  if (model.kind() != ModelKind::Free) {
    throw std::invalid_argument("sccEstimate supports free-group models only");
  }
  if (M1 < 0 || M2 < 0 || maxRadius < 1) {
    throw std::invalid_argument("need M1, M2 >= 0 and maxRadius >= 1");
  }
  SubgroupAutomaton aut = SubgroupAutomaton::build(model, generators);

  SccReport rep;
  rep.M1 = M1;
  rep.M2 = M2;
  rep.maxRadius = maxRadius;
  rep.subgroupSphere.assign(maxRadius + 1, 0);
  rep.escapeSphere.assign(maxRadius + 1, 0);

  BudgetCounter budget(options.budget);

  // DFS over reduced loop words of the automaton = elements of H by ambient
  // length. Last-letter constraint keeps the traced word freely reduced.
  std::vector<Letter> word;
  std::function<void(int)> dfs = [&](int state) {
    if (static_cast<int>(word.size()) >= maxRadius) return;
    Letter last = word.empty() ? kNoLetter : word.back();
    for (Letter x = 0; x < model.alphabetSize(); ++x) {
      if (last != kNoLetter && x == model.inverseLetter(last)) continue;
      int next = aut.transitions()[state][x];
      if (next < 0) continue;
      word.push_back(x);
      budget.tick();
      if (next == 0) {
        const int L = static_cast<int>(word.size());
        ++rep.subgroupSphere[L];
        Element h = identity(model);
        h.word = word;
        auto verts = geodesicVertices(model, h);
        std::vector<int> dcap(L + 1);
        for (int i = 0; i <= L; ++i) {
          dcap[i] = cappedOrbitDistance(model, aut, verts[i], M1);
        }
        bool inO = false;
        // Windows of >= 2 edges: all interior vertices strictly outside
        // the closed M1-neighborhood of H o.
        for (int i = 0; i <= std::min(M2, L) && !inO; ++i) {
          int firstBad = L + 1;
          for (int q = i + 1; q <= L; ++q) {
            if (dcap[q] <= M1) {
              firstBad = q;
              break;
            }
          }
          int maxJ = std::min(firstBad, L);
          int minJ = std::max(L - M2, i + 2);
          if (maxJ >= minJ) inO = true;
        }
        // Single-edge windows: both endpoints at distance >= M1 (edge
        // interiors approach the endpoint distances).
        for (int i = 0; !inO && i + 1 <= L && i <= M2; ++i) {
          if (i + 1 < L - M2) continue;
          if (dcap[i] >= M1 && dcap[i + 1] >= M1) inO = true;
        }
        if (inO) ++rep.escapeSphere[L];
      }
      dfs(next);
      word.pop_back();
    }
  };
  dfs(0);

  rep.subgroupTotal = std::accumulate(rep.subgroupSphere.begin(),
                                      rep.subgroupSphere.end(), std::uint64_t{0});
  rep.escapeTotal = std::accumulate(rep.escapeSphere.begin(), rep.escapeSphere.end(),
                                    std::uint64_t{0});

  auto fitCumulative = [&](const std::vector<std::uint64_t>& sphere, GrowthFit& out,
                           bool includeIdentity) {
    std::vector<std::uint64_t> ball(sphere.size());
    std::uint64_t acc = includeIdentity ? 1 : 0;
    for (std::size_t i = 0; i < sphere.size(); ++i) {
      acc += sphere[i];
      ball[i] = acc;
    }
    const int lo = (maxRadius + 1) / 2;
    std::vector<double> xs, ys;
    bool constant = true;
    for (int n = lo; n <= maxRadius; ++n) {
      if (ball[n] == 0) continue;
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log(static_cast<double>(ball[n])));
      if (ball[n] != ball[lo]) constant = false;
    }
    if (xs.size() < 2 || constant) {
      out.degenerate = true;
      out.windowLo = lo;
      out.windowHi = maxRadius;
      return;
    }
    out = fitLogSlope(xs, ys);
    out.windowLo = lo;
    out.windowHi = maxRadius;
  };
  fitCumulative(rep.subgroupSphere, rep.ambient, true);
  if (rep.escapeTotal == 0) {
    rep.escapeEmpty = true;
    rep.escape.degenerate = true;
  } else {
    fitCumulative(rep.escapeSphere, rep.escape, false);
  }
  rep.exponentGap = rep.ambient.deltaHat - rep.escape.deltaHat;
  return rep;
}

}  // namespace conjgrowth
