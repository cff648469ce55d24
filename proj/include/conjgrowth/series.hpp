#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <vector>

#include "conjgrowth/enumeration.hpp"
#include "conjgrowth/group_model.hpp"

namespace conjgrowth {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

enum class SeriesKind {
  Sphere,
  Ball,
  ConjugacyPointed,
  ConjugacyPrimitive,
  ConjugacyStableCapped,
};

const char* seriesKindName(SeriesKind kind);
SeriesKind parseSeriesKind(const std::string& name);

// Exact coefficients for n = 0..maxN. Sphere and ball counts come from
// integer transfer-matrix iteration over the letter graph; the conjugacy
// kinds are Burnside sums over its closed walks (necklace counts), plus the
// torsion classes of free products at n = 1. Agrees with the enumeration
// and conjugacy census modules wherever those are feasible, and reaches the
// 20+ terms the DFS censuses cannot.
//   Sphere / Ball           #S(o,n) and #B(o,n)
//   ConjugacyPointed        classes with pointed length exactly n (identity at 0)
//   ConjugacyPrimitive      primitive classes with tau exactly n
//   ConjugacyStableCapped   classes with 0 < tau exactly n
std::vector<BigInt> seriesCoefficients(const GroupModel& model, SeriesKind kind,
                                       int maxN, const EnumerationOptions& options = {});

// c_n = coefficients[0]*c_{n-1} + ... + coefficients[order-1]*c_{n-order},
// holding exactly for every n >= order within the data.
struct Recurrence {
  int order = 0;
  std::vector<BigRational> coefficients;
};

bool recurrenceHolds(const std::vector<BigInt>& coefficients, const Recurrence& recurrence);

// Minimal-order recurrence fitting the full tail, by exact rational
// elimination; std::nullopt when no order <= maxOrder fits. Requires at
// least 2*maxOrder + 2 terms (throws std::invalid_argument otherwise,
// never a silent "none").
std::optional<Recurrence> rationalityProbe(const std::vector<BigInt>& coefficients,
                                           int maxOrder);

// Fixed wording; a non-detection is reported as evidence, not a claim.
std::string formatRationalityVerdict(const std::optional<Recurrence>& recurrence,
                                     int maxOrder, std::size_t terms);

struct EnvelopeStats {
  int windowLo = 0;
  int windowHi = 0;
  std::vector<double> values;  // n * c_n * exp(-deltaHat * n) for n in the window
  double minValue = 0.0;
  double maxValue = 0.0;
  double ratio = 0.0;  // maxValue / minValue; +inf when the minimum is 0
};

EnvelopeStats envelopeFit(const std::vector<BigInt>& coefficients, double deltaHat,
                          int windowLo, int windowHi);

struct SeriesReport {
  SeriesKind kind = SeriesKind::Sphere;
  std::vector<BigInt> coefficients;
  std::optional<Recurrence> recurrence;
  int probedOrder = 0;
  double deltaHat = 0.0;  // log-slope fit over the window
  EnvelopeStats envelope;
};

SeriesReport buildSeriesReport(const GroupModel& model, SeriesKind kind, int maxN,
                               int maxOrder, int windowLo, int windowHi,
                               const EnumerationOptions& options = {});

std::string seriesReportJson(const SeriesReport& report);

}  // namespace conjgrowth
