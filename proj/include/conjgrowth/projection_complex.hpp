#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conjgrowth/contracting.hpp"
#include "conjgrowth/enumeration.hpp"
#include "conjgrowth/group_model.hpp"

namespace conjgrowth {

// Finite window of the projection complex over translates t * Ax(f), t in
// ball(windowRadius), deduplicated by coset t * E(f). Vertices v, w are
// adjacent iff no third window vertex x sees both with projection diameter
// >= K. Axis point sets are materialized large enough that every projection
// of a source point (length <= sourceRadius) is certified; gates[x][v] holds
// the projection of vertex v onto the axis of x as sorted point indices.
struct ProjectionComplexGraph {
  std::uint64_t modelSig = 0;
  Element f;
  int K = 0;
  int windowRadius = 0;
  int sourceRadius = 0;
  std::vector<Element> translates;
  std::vector<AxisSet> vertices;
  std::vector<std::vector<std::vector<int>>> gates;
  std::vector<std::vector<int>> pointDist;  // flattened per-vertex matrices
  std::vector<std::vector<int>> adjacency;  // sorted neighbor lists
  std::vector<std::vector<int>> distances;  // all-pairs BFS; -1 unreachable
};

ProjectionComplexGraph buildComplex(const GroupModel& model, const Element& f, int K,
                                    int windowRadius,
                                    const EnumerationOptions& options = {});

// X_K(v, w): window vertices x distinct from v, w whose axis sees v union w
// with projection diameter >= K. Monotone nonincreasing in K; symmetric in
// (v, w). Throws std::invalid_argument for v = w or out-of-range indices.
std::vector<int> intervalSet(const ProjectionComplexGraph& complex, int v, int w, int K);

// Projection diameter of vertex v union vertex w on the axis of x, from the
// precomputed gates. Exposed for audits.
int gateDiameter(const ProjectionComplexGraph& complex, int x, int v, int w);

// Window vertex whose coset contains t, or -1 when t E(f) left the window.
int findVertex(const GroupModel& model, const ProjectionComplexGraph& complex,
               const Element& t);

// Tracks d_P(g^-N X, g^N X) for N = 0..Nmax from the base vertex (coset of
// the identity translate). verdict records whether the final separation
// exceeds Kprime; vertices outside the window raise std::domain_error.
struct LoxodromicProbe {
  Element g;
  int baseVertex = 0;
  int Kprime = 0;
  std::vector<int> separations;  // -1 marks graph-disconnected pairs
  bool verdict = false;
};

LoxodromicProbe loxodromicTest(const GroupModel& model,
                               const ProjectionComplexGraph& complex, const Element& g,
                               int Nmax, int Kprime);

// Empirical acylindricity table: for each R, the largest number of movers
// g in ball(moverRadius) with d_P(x, gx) <= D and d_P(y, gy) <= D over window
// vertex pairs x, y at graph distance > R. Movers whose action leaves the
// window are skipped. Counts are nonincreasing in R by construction.
struct AcylindricityProbe {
  int D = 0;
  int moverRadius = 0;
  std::vector<int> radii;
  std::vector<std::uint64_t> counts;
  std::uint64_t samples = 0;
};

AcylindricityProbe acylindricityProbe(const GroupModel& model,
                                      const ProjectionComplexGraph& complex, int D,
                                      int moverRadius,
                                      const EnumerationOptions& options = {});

// Max finite kernel size over the sampled elements: for each nontorsion g the
// bounded search of elementarySubgroup reports the kernel of E(g) -> Z.
// Torsion or identity samples throw std::domain_error.
struct KernelBoundReport {
  int maxKernel = 0;
  Element witness;
  int samples = 0;
};

KernelBoundReport kernelBoundProbe(const GroupModel& model,
                                   const std::vector<Element>& sample, int searchRadius);

// Plain adjacency list, one "v: n1 n2 ..." line per vertex.
std::string formatComplexAdjacency(const ProjectionComplexGraph& complex);

// One-line JSON metadata: K, window radius, f, vertex and edge counts.
std::string complexMetadataJson(const GroupModel& model,
                                const ProjectionComplexGraph& complex);

}  // namespace conjgrowth
