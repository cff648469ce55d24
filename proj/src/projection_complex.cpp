#include "conjgrowth/projection_complex.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace conjgrowth {

namespace {

void checkModel(const GroupModel& model, const ProjectionComplexGraph& complex) {
  if (complex.modelSig != model.signature()) {
    throw std::invalid_argument("complex belongs to a different model");
  }
}

void checkVertex(const ProjectionComplexGraph& complex, int v, const char* what) {
  if (v < 0 || v >= static_cast<int>(complex.vertices.size())) {
    throw std::invalid_argument(std::string(what) + " is out of range");
  }
}

std::vector<int> mergeGates(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

ProjectionComplexGraph buildComplex(const GroupModel& model, const Element& f, int K,
                                    int windowRadius, const EnumerationOptions& options) {
  if (K <= 0) throw std::invalid_argument("K must be positive");
  if (windowRadius < 0) throw std::invalid_argument("window radius must be >= 0");
  if (f.modelSig != model.signature()) {
    throw std::invalid_argument("f belongs to a different model");
  }
  if (stableLength(model, f) == 0) {
    throw std::domain_error("projection complex needs a nontorsion f");
  }
  BudgetCounter budget(options.budget);

  ProjectionComplexGraph complex;
  complex.modelSig = model.signature();
  complex.f = f;
  complex.K = K;
  complex.windowRadius = windowRadius;
  complex.sourceRadius = 2 * windowRadius + 3 * f.length() + 4;
  const int axisRadius = 2 * complex.sourceRadius + windowRadius + 2;

  forEachBallElement(model, windowRadius, [&](const Element& t) {
    budget.tick();
    for (const auto& kept : complex.translates) {
      if (inElementarySubgroup(model, multiply(model, invert(model, kept), t), f)) {
        return;
      }
    }
    complex.translates.push_back(t);
  });

  const int n = static_cast<int>(complex.translates.size());
  complex.vertices.reserve(n);
  for (const auto& t : complex.translates) {
    complex.vertices.push_back(makeAxis(model, f, t, axisRadius));
  }

  complex.pointDist.resize(n);
  for (int x = 0; x < n; ++x) {
    const auto& pts = complex.vertices[x].points;
    const int P = static_cast<int>(pts.size());
    complex.pointDist[x].assign(static_cast<std::size_t>(P) * P, 0);
    for (int i = 0; i < P; ++i) {
      for (int j = i + 1; j < P; ++j) {
        int d = distance(model, pts[i], pts[j]);
        complex.pointDist[x][static_cast<std::size_t>(i) * P + j] = d;
        complex.pointDist[x][static_cast<std::size_t>(j) * P + i] = d;
      }
    }
  }

  std::vector<std::vector<Element>> sources(n);
  for (int v = 0; v < n; ++v) {
    for (const auto& pt : complex.vertices[v].points) {
      if (pt.length() <= complex.sourceRadius) sources[v].push_back(pt);
    }
  }

  complex.gates.assign(n, std::vector<std::vector<int>>(n));
  for (int x = 0; x < n; ++x) {
    const auto& pts = complex.vertices[x].points;
    const int P = static_cast<int>(pts.size());
    for (int v = 0; v < n; ++v) {
      if (v == x) continue;
      budget.tick();
      std::set<int> gate;
      for (const auto& s : sources[v]) {
        int best = std::numeric_limits<int>::max();
        std::vector<int> argmin;
        for (int i = 0; i < P; ++i) {
          int d = distance(model, s, pts[i]);
          if (d < best) {
            best = d;
            argmin.assign(1, i);
          } else if (d == best) {
            argmin.push_back(i);
          }
        }
        if (s.length() + best > complex.vertices[x].radius) {
          throw MaterializationError(s.length() + best, complex.vertices[x].radius);
        }
        gate.insert(argmin.begin(), argmin.end());
      }
      complex.gates[x][v].assign(gate.begin(), gate.end());
    }
  }

  complex.adjacency.assign(n, {});
  for (int v = 0; v < n; ++v) {
    for (int w = v + 1; w < n; ++w) {
      bool blocked = false;
      for (int x = 0; x < n && !blocked; ++x) {
        if (x == v || x == w) continue;
        if (gateDiameter(complex, x, v, w) >= K) blocked = true;
      }
      if (!blocked) {
        complex.adjacency[v].push_back(w);
        complex.adjacency[w].push_back(v);
      }
    }
  }
  for (auto& nbrs : complex.adjacency) std::sort(nbrs.begin(), nbrs.end());

  complex.distances.assign(n, std::vector<int>(n, -1));
  for (int s = 0; s < n; ++s) {
    auto& dist = complex.distances[s];
    dist[s] = 0;
    std::queue<int> frontier;
    frontier.push(s);
    while (!frontier.empty()) {
      int cur = frontier.front();
      frontier.pop();
      for (int nb : complex.adjacency[cur]) {
        if (dist[nb] < 0) {
          dist[nb] = dist[cur] + 1;
          frontier.push(nb);
        }
      }
    }
  }
  return complex;
}

int gateDiameter(const ProjectionComplexGraph& complex, int x, int v, int w) {
  checkVertex(complex, x, "axis vertex");
  checkVertex(complex, v, "vertex v");
  checkVertex(complex, w, "vertex w");
  if (x == v || x == w) {
    throw std::invalid_argument("gate diameter needs a third vertex");
  }
  const std::vector<int> merged = mergeGates(complex.gates[x][v], complex.gates[x][w]);
  const int P = static_cast<int>(complex.vertices[x].points.size());
  int best = 0;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    for (std::size_t j = i + 1; j < merged.size(); ++j) {
      best = std::max(best,
                      complex.pointDist[x][static_cast<std::size_t>(merged[i]) * P +
                                           merged[j]]);
    }
  }
  return best;
}

std::vector<int> intervalSet(const ProjectionComplexGraph& complex, int v, int w, int K) {
  if (K <= 0) throw std::invalid_argument("K must be positive");
  checkVertex(complex, v, "vertex v");
  checkVertex(complex, w, "vertex w");
  if (v == w) throw std::invalid_argument("interval set needs distinct vertices");
  std::vector<int> out;
  for (int x = 0; x < static_cast<int>(complex.vertices.size()); ++x) {
    if (x == v || x == w) continue;
    if (gateDiameter(complex, x, v, w) >= K) out.push_back(x);
  }
  return out;
}

int findVertex(const GroupModel& model, const ProjectionComplexGraph& complex,
               const Element& t) {
  checkModel(model, complex);
  if (t.modelSig != model.signature()) {
    throw std::invalid_argument("t belongs to a different model");
  }
  for (int i = 0; i < static_cast<int>(complex.translates.size()); ++i) {
    if (inElementarySubgroup(
            model, multiply(model, invert(model, complex.translates[i]), t),
            complex.f)) {
      return i;
    }
  }
  return -1;
}

LoxodromicProbe loxodromicTest(const GroupModel& model,
                               const ProjectionComplexGraph& complex, const Element& g,
                               int Nmax, int Kprime) {
  checkModel(model, complex);
  if (g.modelSig != model.signature()) {
    throw std::invalid_argument("g belongs to a different model");
  }
  if (Nmax < 0) throw std::invalid_argument("Nmax must be >= 0");
  if (Kprime < 0) throw std::invalid_argument("Kprime must be >= 0");

  LoxodromicProbe probe;
  probe.g = g;
  probe.Kprime = Kprime;
  probe.baseVertex = findVertex(model, complex, identity(model));
  if (probe.baseVertex < 0) {
    throw std::domain_error("complex window does not contain the base vertex");
  }
  const Element tb = complex.translates[probe.baseVertex];
  for (int N = 0; N <= Nmax; ++N) {
    const Element fwd = multiply(model, power(model, g, N), tb);
    const Element bwd = multiply(model, power(model, g, -N), tb);
    const int vPos = findVertex(model, complex, fwd);
    const int vNeg = findVertex(model, complex, bwd);
    if (vPos < 0 || vNeg < 0) {
      throw std::domain_error("window too small to contain g^N translates");
    }
    probe.separations.push_back(complex.distances[vNeg][vPos]);
  }
  probe.verdict =
      probe.separations.back() < 0 || probe.separations.back() > Kprime;
  return probe;
}

AcylindricityProbe acylindricityProbe(const GroupModel& model,
                                      const ProjectionComplexGraph& complex, int D,
                                      int moverRadius, const EnumerationOptions& options) {
  checkModel(model, complex);
  if (D < 0) throw std::invalid_argument("D must be >= 0");
  if (moverRadius < 0) throw std::invalid_argument("mover radius must be >= 0");
  BudgetCounter budget(options.budget);

  const int n = static_cast<int>(complex.vertices.size());
  std::vector<Element> movers;
  forEachBallElement(model, moverRadius, [&](const Element& u) { movers.push_back(u); });

  // image[m][v]: window vertex of movers[m] * t_v, or -1 once it escapes.
  std::vector<std::vector<int>> image(movers.size(), std::vector<int>(n, -1));
  for (std::size_t m = 0; m < movers.size(); ++m) {
    for (int v = 0; v < n; ++v) {
      budget.tick();
      image[m][v] =
          findVertex(model, complex, multiply(model, movers[m], complex.translates[v]));
    }
  }

  int maxSeparation = 0;
  for (int v = 0; v < n; ++v) {
    for (int w = v + 1; w < n; ++w) {
      maxSeparation = std::max(maxSeparation, complex.distances[v][w]);
    }
  }

  AcylindricityProbe probe;
  probe.D = D;
  probe.moverRadius = moverRadius;
  for (int r = 0; r <= maxSeparation; ++r) probe.radii.push_back(r);
  probe.counts.assign(probe.radii.size(), 0);

  for (int v = 0; v < n; ++v) {
    for (int w = v + 1; w < n; ++w) {
      const int sep = complex.distances[v][w];
      if (sep == 0) continue;
      ++probe.samples;
      std::uint64_t count = 0;
      for (std::size_t m = 0; m < movers.size(); ++m) {
        budget.tick();
        const int iv = image[m][v];
        const int iw = image[m][w];
        if (iv < 0 || iw < 0) continue;
        const int dv = complex.distances[v][iv];
        const int dw = complex.distances[w][iw];
        if (dv < 0 || dw < 0) continue;
        if (dv <= D && dw <= D) ++count;
      }
      // An unreachable pair separates more than any finite R.
      const int reach = sep < 0 ? maxSeparation + 1 : sep;
      for (int r = 0; r <= maxSeparation; ++r) {
        if (reach > r) probe.counts[r] = std::max(probe.counts[r], count);
      }
    }
  }
  return probe;
}

KernelBoundReport kernelBoundProbe(const GroupModel& model,
                                   const std::vector<Element>& sample, int searchRadius) {
  if (searchRadius < 0) throw std::invalid_argument("search radius must be >= 0");
  KernelBoundReport report;
  for (const auto& g : sample) {
    if (g.modelSig != model.signature()) {
      throw std::invalid_argument("sample element belongs to a different model");
    }
    ElementaryGroupReport er = elementarySubgroup(model, g, searchRadius);
    const int size = static_cast<int>(er.kernelElements.size());
    ++report.samples;
    if (size > report.maxKernel) {
      report.maxKernel = size;
      report.witness = g;
    }
  }
  return report;
}

std::string formatComplexAdjacency(const ProjectionComplexGraph& complex) {
  std::ostringstream out;
  for (std::size_t v = 0; v < complex.adjacency.size(); ++v) {
    out << v << ':';
    for (int nb : complex.adjacency[v]) out << ' ' << nb;
    out << '\n';
  }
  return out.str();
}

std::string complexMetadataJson(const GroupModel& model,
                                const ProjectionComplexGraph& complex) {
  checkModel(model, complex);
  std::size_t edges = 0;
  for (const auto& nbrs : complex.adjacency) edges += nbrs.size();
  std::ostringstream out;
  out << "{\"K\":" << complex.K << ",\"windowRadius\":" << complex.windowRadius
      << ",\"sourceRadius\":" << complex.sourceRadius << ",\"f\":\""
      << formatElement(model, complex.f) << "\",\"vertices\":"
      << complex.vertices.size() << ",\"edges\":" << edges / 2 << "}";
  return out.str();
}

}  // namespace conjgrowth
