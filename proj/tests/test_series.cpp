#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "conjgrowth/conjugacy_census.hpp"
#include "conjgrowth/enumeration.hpp"
#include "conjgrowth/group_model.hpp"
#include "conjgrowth/series.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace conjgrowth;

namespace {

std::vector<std::uint64_t> asU64(const std::vector<BigInt>& values) {
  std::vector<std::uint64_t> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v.convert_to<std::uint64_t>());
  return out;
}

// Cumulative census columns carry identity/torsion conventions in slot 0, so
// exact-length comparisons difference them and start at n = 1.
std::vector<std::uint64_t> differenced(const std::vector<std::uint64_t>& cumulative) {
  std::vector<std::uint64_t> out;
  for (std::size_t n = 1; n < cumulative.size(); ++n)
    out.push_back(cumulative[n] - cumulative[n - 1]);
  return out;
}

std::vector<std::uint64_t> tail(const std::vector<std::uint64_t>& values) {
  return {values.begin() + 1, values.end()};
}

std::vector<BigInt> toBig(const std::vector<long long>& values) {
  return {values.begin(), values.end()};
}

void checkSeriesAgainstCensuses(const GroupModel& model, int maxN) {
  CensusTable balls = buildCensus(model, maxN, 1);
  CHECK(asU64(seriesCoefficients(model, SeriesKind::Sphere, maxN)) == balls.sphereCounts);
  CHECK(asU64(seriesCoefficients(model, SeriesKind::Ball, maxN)) == balls.ballCounts);

  ConjugacyCensus classes = buildConjugacyCensus(model, maxN);
  auto pointed = asU64(seriesCoefficients(model, SeriesKind::ConjugacyPointed, maxN));
  CHECK(pointed == classes.classesAtLength);
  CHECK(tail(pointed) == differenced(classes.countsPointed));
  auto primitive = asU64(seriesCoefficients(model, SeriesKind::ConjugacyPrimitive, maxN));
  CHECK(primitive.front() == 0);
  CHECK(tail(primitive) == differenced(classes.primitivePointed));
  auto stable = asU64(seriesCoefficients(model, SeriesKind::ConjugacyStableCapped, maxN));
  CHECK(stable.front() == 0);
  CHECK(tail(stable) == differenced(classes.countsStableCapped));
  CHECK(tail(primitive) == differenced(classes.primitiveStableCapped));
}

}  // namespace

TEST_CASE("series coefficients match the censuses") {
  checkSeriesAgainstCensuses(GroupModel::free(2), 11);
  checkSeriesAgainstCensuses(GroupModel::freeProduct({2, 3}), 12);
  checkSeriesAgainstCensuses(GroupModel::freeProduct({2, 4}), 10);
}

TEST_CASE("series coefficients extend past census reach") {
  GroupModel f2 = GroupModel::free(2);
  auto spheres = seriesCoefficients(f2, SeriesKind::Sphere, 20);
  CHECK(spheres[5] == 324);
  CHECK(spheres[20] == BigInt("4649045868"));
  auto ball = seriesCoefficients(f2, SeriesKind::Ball, 20);
  CHECK(ball[20] == BigInt("6973568801"));

  auto pointed = seriesCoefficients(f2, SeriesKind::ConjugacyPointed, 20);
  CHECK(pointed[0] == 1);
  CHECK(pointed[1] == 4);
  CHECK(pointed[2] == 8);
  CHECK(pointed[3] == 12);
  CHECK(pointed[6] == 132);
  CHECK(pointed[19] == BigInt("61171660"));
  CHECK(pointed[20] == BigInt("174342218"));
  auto primitive = seriesCoefficients(f2, SeriesKind::ConjugacyPrimitive, 20);
  CHECK(primitive[2] == 4);
  CHECK(primitive[20] == BigInt("174336264"));
  auto stable = seriesCoefficients(f2, SeriesKind::ConjugacyStableCapped, 20);
  for (int n = 1; n <= 20; ++n) CHECK(stable[n] == pointed[n]);

  GroupModel z23 = GroupModel::freeProduct({2, 3});
  auto zPointed = seriesCoefficients(z23, SeriesKind::ConjugacyPointed, 14);
  CHECK(zPointed[1] == z23.alphabetSize());
  std::vector<std::uint64_t> zExpected = {1, 3, 2, 0, 3, 0, 4, 0, 6, 0, 8, 0, 14, 0, 20};
  CHECK(asU64(zPointed) == zExpected);
  GroupModel z24 = GroupModel::freeProduct({2, 4});
  auto wPointed = seriesCoefficients(z24, SeriesKind::ConjugacyPointed, 10);
  std::vector<std::uint64_t> wExpected = {1, 4, 3, 0, 6, 0, 11, 0, 24, 0, 51};
  CHECK(asU64(wPointed) == wExpected);
}

TEST_CASE("sphere and ball sequences satisfy short recurrences") {
  GroupModel f2 = GroupModel::free(2);
  auto spheres = seriesCoefficients(f2, SeriesKind::Sphere, 8);
  CHECK_FALSE(rationalityProbe(spheres, 1).has_value());
  auto rec = rationalityProbe(spheres, 2);
  REQUIRE(rec.has_value());
  CHECK(rec->order == 2);
  CHECK(rec->coefficients == std::vector<BigRational>{BigRational(3), BigRational(0)});
  CHECK(recurrenceHolds(spheres, *rec));
  CHECK(formatRationalityVerdict(rec, 2, static_cast<int>(spheres.size())) ==
        "linear recurrence of order 2 on 9 terms: c[n] = 3*c[n-1] + 0*c[n-2]");

  auto ball = seriesCoefficients(f2, SeriesKind::Ball, 8);
  auto ballRec = rationalityProbe(ball, 2);
  REQUIRE(ballRec.has_value());
  CHECK(ballRec->coefficients == std::vector<BigRational>{BigRational(4), BigRational(-3)});

  GroupModel z23 = GroupModel::freeProduct({2, 3});
  auto zSpheres = seriesCoefficients(z23, SeriesKind::Sphere, 10);
  CHECK_FALSE(rationalityProbe(zSpheres, 2).has_value());
  auto zRec = rationalityProbe(zSpheres, 3);
  REQUIRE(zRec.has_value());
  CHECK(zRec->order == 3);
  CHECK(zRec->coefficients ==
        std::vector<BigRational>{BigRational(0), BigRational(2), BigRational(0)});
  auto zBall = seriesCoefficients(z23, SeriesKind::Ball, 10);
  auto zBallRec = rationalityProbe(zBall, 3);
  REQUIRE(zBallRec.has_value());
  CHECK(zBallRec->coefficients ==
        std::vector<BigRational>{BigRational(1), BigRational(2), BigRational(-2)});

  Recurrence wrong{2, {BigRational(3), BigRational(1)}};
  CHECK_FALSE(recurrenceHolds(spheres, wrong));
}

TEST_CASE("conjugacy sequences defeat the rationality probe") {
  GroupModel f2 = GroupModel::free(2);
  auto pointed = seriesCoefficients(f2, SeriesKind::ConjugacyPointed, 19);
  auto probe = rationalityProbe(pointed, 6);
  CHECK_FALSE(probe.has_value());
  CHECK(formatRationalityVerdict(probe, 6, static_cast<int>(pointed.size())) ==
        "no linear recurrence of order ≤ 6 on 20 terms");
  auto longer = seriesCoefficients(f2, SeriesKind::ConjugacyPointed, 20);
  CHECK_FALSE(rationalityProbe(longer, 6).has_value());

  auto primitive = seriesCoefficients(f2, SeriesKind::ConjugacyPrimitive, 13);
  CHECK_FALSE(rationalityProbe(primitive, 6).has_value());
  auto stable = seriesCoefficients(f2, SeriesKind::ConjugacyStableCapped, 13);
  CHECK_FALSE(rationalityProbe(stable, 6).has_value());

  GroupModel z23 = GroupModel::freeProduct({2, 3});
  auto zPointed = seriesCoefficients(z23, SeriesKind::ConjugacyPointed, 14);
  CHECK_FALSE(rationalityProbe(zPointed, 3).has_value());
}

TEST_CASE("planted linear recurrences are recovered") {
  std::mt19937 rng(20250815u);
  for (int trial = 0; trial < 50; ++trial) {
    int order = 1 + static_cast<int>(rng() % 5);
    std::vector<BigRational> q(order);
    for (auto& qi : q) {
      int num = static_cast<int>(rng() % 7) - 3;
      int den = 1 + static_cast<int>(rng() % 2);
      qi = BigRational(num, den);
    }
    std::vector<BigRational> seq(order);
    bool anyNonzero = false;
    for (auto& s : seq) {
      int v = static_cast<int>(rng() % 9) - 4;
      s = v;
      anyNonzero = anyNonzero || v != 0;
    }
    if (!anyNonzero) seq[0] = 1;
    while (seq.size() < 16) {
      BigRational next(0);
      for (int i = 0; i < order; ++i) next += q[i] * seq[seq.size() - 1 - i];
      seq.push_back(next);
    }
    BigInt common(1);
    for (const auto& s : seq)
      common = boost::multiprecision::lcm(common, boost::multiprecision::denominator(s));
    std::vector<BigInt> scaled;
    for (const auto& s : seq) {
      BigRational t = s * BigRational(common);
      REQUIRE(boost::multiprecision::denominator(t) == 1);
      scaled.push_back(boost::multiprecision::numerator(t));
    }
    auto found = rationalityProbe(scaled, 5);
    REQUIRE(found.has_value());
    CHECK(found->order <= order);
    CHECK(recurrenceHolds(scaled, *found));
  }
}

TEST_CASE("probe handles simple closed forms") {
  auto constant = toBig({7, 7, 7, 7, 7, 7});
  auto rec = rationalityProbe(constant, 2);
  REQUIRE(rec.has_value());
  CHECK(rec->order == 1);
  CHECK(rec->coefficients == std::vector<BigRational>{BigRational(1)});

  auto zeros = toBig({0, 0, 0, 0, 0, 0});
  auto zRec = rationalityProbe(zeros, 2);
  REQUIRE(zRec.has_value());
  CHECK(zRec->order == 1);
  CHECK(zRec->coefficients == std::vector<BigRational>{BigRational(0)});

  auto fib = toBig({1, 1, 2, 3, 5, 8, 13, 21});
  CHECK_FALSE(rationalityProbe(fib, 1).has_value());
  auto fRec = rationalityProbe(fib, 3);
  REQUIRE(fRec.has_value());
  CHECK(fRec->order == 2);
  CHECK(fRec->coefficients == std::vector<BigRational>{BigRational(1), BigRational(1)});
}

TEST_CASE("envelope normalization brackets the primitive series") {
  GroupModel f2 = GroupModel::free(2);
  auto primitive = seriesCoefficients(f2, SeriesKind::ConjugacyPrimitive, 12);
  EnvelopeStats stats = envelopeFit(primitive, std::log(3.0), 1, 12);
  REQUIRE(stats.values.size() == 12);
  CHECK(stats.values[0] == doctest::Approx(4.0 / 3.0));
  CHECK(stats.minValue == doctest::Approx(8.0 / 9.0));
  CHECK(stats.maxValue == doctest::Approx(4.0 / 3.0));
  CHECK(stats.ratio == doctest::Approx(1.5));
  for (double v : stats.values) {
    CHECK(v >= 0.88);
    CHECK(v <= 1.34);
  }

  // Zero coefficients inside the window drive the ratio to infinity.
  EnvelopeStats withZero = envelopeFit(primitive, std::log(3.0), 0, 12);
  CHECK(withZero.minValue == 0.0);
  CHECK(std::isinf(withZero.ratio));
}

TEST_CASE("envelope normalization on exact geometric input") {
  std::vector<BigInt> geometric;
  BigInt p(1);
  for (int n = 0; n <= 10; ++n, p *= 3) geometric.push_back(p);
  EnvelopeStats stats = envelopeFit(geometric, std::log(3.0), 2, 10);
  REQUIRE(stats.values.size() == 9);
  for (std::size_t i = 0; i < stats.values.size(); ++i)
    CHECK(stats.values[i] == doctest::Approx(2.0 + static_cast<double>(i)));
  CHECK(stats.ratio == doctest::Approx(5.0));

  EnvelopeStats point = envelopeFit(geometric, std::log(3.0), 7, 7);
  CHECK(point.minValue == point.maxValue);
  CHECK(point.ratio == doctest::Approx(1.0));

  std::vector<BigInt> scaled;
  for (const auto& c : geometric) scaled.push_back(7 * c);
  EnvelopeStats scaledStats = envelopeFit(scaled, std::log(3.0), 2, 10);
  for (std::size_t i = 0; i < stats.values.size(); ++i)
    CHECK(scaledStats.values[i] == doctest::Approx(7.0 * stats.values[i]));
  CHECK(scaledStats.ratio == doctest::Approx(stats.ratio));
}

TEST_CASE("series report serializes every block") {
  GroupModel f2 = GroupModel::free(2);
  SeriesReport report = buildSeriesReport(f2, SeriesKind::Sphere, 10, 2, 5, 10);
  CHECK(report.kind == SeriesKind::Sphere);
  REQUIRE(report.recurrence.has_value());
  CHECK(report.recurrence->order == 2);
  CHECK(report.deltaHat == doctest::Approx(std::log(3.0)).epsilon(1e-6));

  nlohmann::json j = nlohmann::json::parse(seriesReportJson(report));
  CHECK(j["kind"] == "sphere");
  CHECK(j["coefficients"].size() == 11);
  CHECK(j["coefficients"][10] == "78732");
  CHECK(j["recurrence"]["order"] == 2);
  CHECK(j["recurrence"]["coefficients"][0] == "3");
  CHECK(j["envelope"]["values"].size() == 6);
  double ratio = j["envelope"]["ratio"].get<double>();
  CHECK(ratio == doctest::Approx(2.0));

  SeriesReport pointedReport =
      buildSeriesReport(f2, SeriesKind::ConjugacyPointed, 19, 6, 10, 19);
  CHECK_FALSE(pointedReport.recurrence.has_value());
  CHECK(pointedReport.deltaHat > 1.0);
  CHECK(pointedReport.deltaHat < std::log(3.0));
  nlohmann::json jp = nlohmann::json::parse(seriesReportJson(pointedReport));
  CHECK(jp["recurrence"].is_null());
  CHECK(jp["verdict"] == "no linear recurrence of order ≤ 6 on 20 terms");
}

TEST_CASE("series round trips kind names") {
  for (SeriesKind kind :
       {SeriesKind::Sphere, SeriesKind::Ball, SeriesKind::ConjugacyPointed,
        SeriesKind::ConjugacyPrimitive, SeriesKind::ConjugacyStableCapped})
    CHECK(parseSeriesKind(seriesKindName(kind)) == kind);
  CHECK_THROWS_AS(parseSeriesKind("bogus"), std::invalid_argument);
}

TEST_CASE("series guards reject bad inputs") {
  GroupModel f2 = GroupModel::free(2);
  CHECK_THROWS_AS(seriesCoefficients(f2, SeriesKind::Sphere, -1), std::invalid_argument);
  CHECK_THROWS_AS(seriesCoefficients(GroupModel::free(1), SeriesKind::Sphere, 4),
                  std::invalid_argument);

  EnumerationOptions tiny;
  tiny.budget = 3;
  CHECK_THROWS_AS(seriesCoefficients(f2, SeriesKind::Sphere, 10, tiny),
                  EnumerationBudgetError);

  auto spheres = seriesCoefficients(f2, SeriesKind::Sphere, 13);
  CHECK_THROWS_AS(rationalityProbe(spheres, 0), std::invalid_argument);
  CHECK_THROWS_WITH_AS(rationalityProbe(toBig({1, 2, 3, 4, 5}), 2),
                       "insufficient data: rationality probe needs at least "
                       "2*maxOrder + 2 terms",
                       std::invalid_argument);
  std::vector<BigInt> thirteen(spheres.begin(), spheres.begin() + 13);
  CHECK_THROWS_AS(rationalityProbe(thirteen, 6), std::invalid_argument);
  std::vector<BigInt> fourteen(spheres.begin(), spheres.begin() + 14);
  CHECK(rationalityProbe(fourteen, 6).has_value());

  CHECK_THROWS_AS(envelopeFit(spheres, 1.0, -1, 5), std::invalid_argument);
  CHECK_THROWS_AS(envelopeFit(spheres, 1.0, 3, 14), std::invalid_argument);
  CHECK_THROWS_AS(envelopeFit(spheres, 1.0, 7, 4), std::invalid_argument);
}
