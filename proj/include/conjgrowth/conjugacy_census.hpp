#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "conjgrowth/enumeration.hpp"
#include "conjgrowth/group_model.hpp"

namespace conjgrowth {

struct ConjugacyCensusOptions {
  EnumerationOptions enumeration;
  // classIndex is materialized only when maxRadius <= indexCap.
  int indexCap = 12;
};

// Cumulative class counts by pointed and stable length. Index n covers
// classes with the relevant length <= n. countsPointed includes the identity
// class (classesAtLength[0] = 1 keeps the other convention recoverable);
// the stable-capped arrays require 0 < tau <= n and pointed length <= n, so
// they exclude the identity and all torsion classes.
struct ConjugacyCensus {
  std::uint64_t modelSig = 0;
  int maxRadius = 0;
  std::vector<std::uint64_t> countsPointed;
  std::vector<std::uint64_t> countsStableCapped;
  std::vector<std::uint64_t> primitivePointed;
  std::vector<std::uint64_t> primitiveStableCapped;
  std::vector<std::uint64_t> classesAtLength;  // classes with pointed length == n
  std::unordered_map<Element, ConjugacyRecord, ElementHash> classIndex;
  bool indexBuilt = false;
};

// Enumerates classes intrinsically: DFS over cyclically reduced words keeping
// one representative (the lex-least rotation) per rotation orbit. Never
// classifies ball elements pairwise.
ConjugacyCensus buildConjugacyCensus(const GroupModel& model, int maxRadius,
                                     const ConjugacyCensusOptions& options = {});

// e(n) = n * count(n) / exp(deltaHat * n) for each of the four count arrays,
// in the order pointed, stableCapped, primitivePointed, primitiveStableCapped.
// e(0) = 0 by convention; min/max/ratio are taken over [windowLo, windowHi].
struct EnvelopeReport {
  double deltaHat = 0.0;
  int windowLo = 0;
  int windowHi = 0;
  std::array<std::vector<double>, 4> curves;
  std::array<double, 4> windowMin{};
  std::array<double, 4> windowMax{};
  std::array<double, 4> ratio{};  // windowMax / windowMin
};

EnvelopeReport envelopeCheck(const ConjugacyCensus& census, double deltaHat,
                             int windowLo, int windowHi);

// Primitive fractions per radius. pointedRatio divides by the class count
// without the identity class so that radius 1 reports exactly 1; stableRatio
// divides the stable-capped arrays as stored. decayFit fits
// log(1 - pointedRatio) against n over the radii where the gap is positive.
struct RatioCurve {
  std::vector<double> pointedRatio;
  std::vector<double> stableRatio;
  GrowthFit decayFit;
};

RatioCurve primitiveRatioCurve(const ConjugacyCensus& census);

struct RotationWitness {
  bool distinct = false;
  int firstIndex = -1;   // coinciding rotation pair when !distinct
  int secondIndex = -1;
};

// For cyclically reduced nonidentity g: are all len(g) rotations pairwise
// distinct? Holds iff g is primitive. Throws std::invalid_argument when g is
// not cyclically reduced, std::domain_error on the identity.
RotationWitness rotationDistinctness(const GroupModel& model, const Element& g);

struct AnnulusMultiplicity {
  std::vector<Element> reps;                // canonical representative per class
  std::vector<std::uint64_t> memberCounts;  // members with length in [n-delta, n+delta]
  double maxOverN = 0.0;                    // max memberCounts / n
};

// Counts class members inside the annulus by breadth-first search over
// single-letter conjugations within the length cap n + delta.
AnnulusMultiplicity classAnnulusMultiplicity(const GroupModel& model, int n, int delta,
                                             const std::vector<Element>& sampleClasses,
                                             const EnumerationOptions& options = {});

}  // namespace conjgrowth
