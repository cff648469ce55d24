#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "conjgrowth/enumeration.hpp"
#include "conjgrowth/group_model.hpp"

namespace conjgrowth {

class MaterializationError : public std::runtime_error {
 public:
  MaterializationError(int required, int radius)
      : std::runtime_error("axis materialized to radius " + std::to_string(radius) +
                           " but the query needs " + std::to_string(required)),
        required(required),
        radius(radius) {}
  int required;
  int radius;
};

// Coarse axis of a nontorsion element: the orbit points {translate * u * o}
// for u in E(base), materialized within the given radius around o. In free
// groups E(base) = <root> exactly; free products can add one
// orientation-reversing branch (found by bounded search).
struct AxisSet {
  std::uint64_t modelSig = 0;
  Element base;
  Element root;
  Element translate;
  std::optional<Element> reverser;
  int radius = 0;
  std::vector<Element> points;
  std::unordered_set<Element, ElementHash> pointSet;
};

AxisSet makeAxis(const GroupModel& model, const Element& f, const Element& translate,
                 int radius, int reverserSearchRadius = 8);

struct ProjectionResult {
  std::vector<Element> points;  // nearest-point set, deduplicated
  int distance = 0;
};

// Exact nearest-point projection onto the materialized axis. Throws
// MaterializationError when the radius cannot certify the minimum, i.e. when
// d(o, x) + distance + 1 exceeds the materialization radius.
ProjectionResult project(const GroupModel& model, const Element& x, const AxisSet& axis);

int projectionDiameter(const GroupModel& model, const std::vector<Element>& a,
                       const AxisSet& axis);

struct BarrierSpec {
  Element f;
  int epsilon = 2;
  int M = 0;
};

struct BarrierWitness {
  Element t;
  int positionO = 0;  // earliest path index epsilon-close to t*o
  int positionF = 0;  // latest path index epsilon-close to t*f*o
};

// Scans epsilon-neighborhoods of the path vertices for t with
// max(d(t*o, path), d(t*f*o, path)) <= epsilon, oriented forward: some
// epsilon-close index for t*o precedes some epsilon-close index for t*f*o.
// Among qualifying witnesses the shortlex-least t is returned.
std::optional<BarrierWitness> findBarrier(const GroupModel& model,
                                          const std::vector<Element>& path,
                                          const BarrierSpec& spec);

// Least C consistent with the contraction audit over single vertices in
// ball(sampleRadius) and geodesic pairs in ball(min(sampleRadius, 6)): each
// sample gamma forces C >= min(d(gamma, X), diam proj(gamma)).
struct ContractionAudit {
  int cEmp = 0;
  Element witnessA;
  Element witnessB;
  int witnessDistance = 0;
  int witnessSpan = 0;
  std::uint64_t samples = 0;
};

ContractionAudit contractionAudit(const GroupModel& model, const AxisSet& axis,
                                  int sampleRadius,
                                  const EnumerationOptions& options = {});

// Max over distinct translate pairs t*Ax(f) != t'*Ax(f), t and t' in
// ball(sampleRadius), of diam proj_{X'}(points of X).
struct IntersectionAudit {
  int bEmp = 0;
  int axisCount = 0;
  Element witnessT;
  Element witnessTPrime;
  std::uint64_t samples = 0;
};

IntersectionAudit boundedIntersectionAudit(const GroupModel& model, const Element& f,
                                           int sampleRadius,
                                           const EnumerationOptions& options = {});

// Per-radius fraction of sphere elements whose geodesic between B(o, M) and
// B(g o, M) carries no (epsilon, f)-barrier. fractionFit fits log fraction
// over the largest half of the radii with positive fractions.
struct BarrierCensus {
  BarrierSpec spec;
  std::vector<std::uint64_t> totals;
  std::vector<std::uint64_t> barrierFree;
  std::vector<double> fractions;
  GrowthFit fractionFit;
};

BarrierCensus barrierFreeCensus(const GroupModel& model, const BarrierSpec& spec,
                                int maxRadius, const EnumerationOptions& options = {});

// Fraction of sphere elements admitting vertex-disjoint barrier-free
// subpaths of [o, g o], each of at least L edges, covering at least
// theta * d(o, g o) edges in total. Intervals are chosen greedily from the
// left, each extended maximally. theta = 1, L = 1 recovers barrierFreeCensus.
struct FractionalBarrierCensus {
  BarrierSpec spec;
  double theta = 1.0;
  int minLength = 1;
  std::vector<std::uint64_t> totals;
  std::vector<std::uint64_t> satisfied;
  std::vector<double> fractions;
  GrowthFit countFit;  // log satisfied counts over the largest half
};

FractionalBarrierCensus fractionalBarrierCensus(const GroupModel& model,
                                                const BarrierSpec& spec, double theta,
                                                int minLength, int maxRadius,
                                                const EnumerationOptions& options = {});

// Periodic admissible path data for g = t1 * f^m * t2. Segments live on the
// canonical axis line of g; X_i = g^i * t1 * Ax(f). Window [windowLo,
// windowHi] indexes the stored (q_i, p_i) blocks; the path chains as
// ... q_i p_i q_{i+1} p_{i+1} ...
struct AdmissiblePathWitness {
  Element g;
  Element axisBase;        // f
  Element axisTranslate;   // t1
  long long D = 0;
  long long tau = 0;       // projection bound parameter measured at build time
  int windowLo = 0;
  int windowHi = 0;
  std::vector<std::vector<Element>> pSegments;
  std::vector<std::vector<Element>> qSegments;
};

// Builds the witness by intersecting the canonical axis line of g with
// X_0 = t1 * Ax(f): p_0 spans the intersection clipped to one period, q_0 the
// complementary arc. Throws std::domain_error when g degenerates (torsion,
// identity) or p_0 cannot reach length D.
AdmissiblePathWitness buildAdmissibleWitness(const GroupModel& model, const Element& t1,
                                             const Element& f, int m, const Element& t2,
                                             long long D = 4, int window = 1);

struct AdmissibleReport {
  bool cond1 = false;  // each p_i geodesic, length >= D, endpoints on X_i
  bool cond2 = false;  // each q_i geodesic with tau-bounded projections to
                       // X_{i-1}, X_i, X_{i+1}
  bool cond3 = false;  // continuity and q_i p_i = g^i (q_0 p_0)
  long long lengthDefect = -1;   // | tau[g] - len(p_0) - len(q_0) |
  long long measuredEpsilon = 0; // axis entry/exit offset from p_i endpoints
  std::string firstFailure;
  bool pass() const { return cond1 && cond2 && cond3; }
};

AdmissibleReport validateAdmissible(const GroupModel& model,
                                    const AdmissiblePathWitness& witness);

enum class AdmissibleMutation {
  BumpD,     // raises D past len(p_0): condition (1) must fail
  DetourQ,   // equivariant non-geodesic detour of q_i along X_i: (2) must fail
  ShiftP,    // shifts the period-1 block off g * (block 0): (3) must fail
};

// Deterministic corruption targeting one condition. Throws std::domain_error
// when the witness is too degenerate for the requested kind.
AdmissiblePathWitness mutateAdmissible(const GroupModel& model,
                                       const AdmissiblePathWitness& witness,
                                       AdmissibleMutation kind);

// Samples x = v * u with v on the canonical axis line of g (positions within
// lineRange periods of 0) and |u| <= R, comparing d(x, g x) with tau[g].
// Samples with d(x, g x) < 3R violate the audit precondition and are reported
// but not scored. Throws std::domain_error for torsion or identity g.
struct StableAxisAudit {
  long long maxDefect = 0;
  long long bound = 0;  // 2R
  long long samples = 0;
  long long preconditionViolations = 0;
  bool pass = true;     // maxDefect <= 2R over qualifying samples
};

StableAxisAudit stableAxisAudit(const GroupModel& model, const Element& g, int R,
                                int lineRange = 3);

// Per-radius fractions of sphere elements satisfying (1) tau[g] >=
// (1 - theta1) n, (2) d(o, canonical axis line) <= theta2 n, (3) the axis
// line carries an (epsilon, f^m)-barrier, and their conjunction. gapFit fits
// log(1 - conjunction fraction) where the gap is positive.
struct LinearDriftCensus {
  std::vector<std::uint64_t> totals;
  std::vector<std::uint64_t> clause1;
  std::vector<std::uint64_t> clause2;
  std::vector<std::uint64_t> clause3;
  std::vector<std::uint64_t> conjunction;
  std::vector<double> fractions;  // conjunction / total
  GrowthFit gapFit;
};

LinearDriftCensus linearDriftCensus(const GroupModel& model, const Element& f, int m,
                                    double theta1, double theta2, int epsilon,
                                    int maxRadius,
                                    const EnumerationOptions& options = {});

}  // namespace conjgrowth
