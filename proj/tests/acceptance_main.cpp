// Final acceptance gate: one line per criterion, nonzero exit on any failure.
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "conjgrowth/conjugacy_census.hpp"
#include "conjgrowth/contracting.hpp"
#include "conjgrowth/enumeration.hpp"
#include "conjgrowth/group_model.hpp"
#include "conjgrowth/projection_complex.hpp"
#include "conjgrowth/series.hpp"

using namespace conjgrowth;

namespace {

struct Gate {
  int failures = 0;
  void report(int index, const std::string& label, bool ok,
              const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " [" << (index < 10 ? " " : "") << index
              << "] " << label;
    if (!detail.empty()) std::cout << " -- " << detail;
    std::cout << '\n';
    if (!ok) ++failures;
  }
};

std::vector<std::uint64_t> asU64(const std::vector<BigInt>& values) {
  std::vector<std::uint64_t> out;
  for (const auto& v : values) out.push_back(v.convert_to<std::uint64_t>());
  return out;
}

struct BruteClassCounts {
  std::vector<std::uint64_t> pointed;         // classes with pointed length == n
  std::vector<std::uint64_t> stable;          // nontorsion classes with tau == n
  std::vector<std::uint64_t> primitivePointed;
  std::vector<std::uint64_t> primitiveStable;
};

// Classifies every ball element through the canonical-form route only; shares
// no traversal or pruning with the census walker.
BruteClassCounts bruteClassify(const GroupModel& model, int maxRadius) {
  BruteClassCounts counts;
  counts.pointed.assign(maxRadius + 1, 0);
  counts.stable.assign(maxRadius + 1, 0);
  counts.primitivePointed.assign(maxRadius + 1, 0);
  counts.primitiveStable.assign(maxRadius + 1, 0);
  counts.pointed[0] = 1;  // identity class
  std::unordered_map<Element, ConjugacyRecord, ElementHash> classes;
  BudgetCounter budget(200000000ULL);
  walkBall(model, maxRadius, 0, 1, budget, [&](const std::vector<Letter>& word) {
    Element g;
    g.modelSig = model.signature();
    g.word = word;
    ConjugacyRecord rec = conjugacyCanonical(model, g);
    classes.emplace(rec.canonicalRep, rec);
  });
  for (const auto& [rep, rec] : classes) {
    if (rec.pointedLength <= maxRadius)
      ++counts.pointed[static_cast<std::size_t>(rec.pointedLength)];
    if (rec.tau > 0 && rec.tau <= maxRadius) {
      ++counts.stable[static_cast<std::size_t>(rec.tau)];
      if (rec.isPrimitive) {
        ++counts.primitiveStable[static_cast<std::size_t>(rec.tau)];
        ++counts.primitivePointed[static_cast<std::size_t>(rec.pointedLength)];
      }
    }
  }
  return counts;
}

std::vector<std::uint64_t> differenced(const std::vector<std::uint64_t>& cumulative) {
  std::vector<std::uint64_t> out;
  for (std::size_t n = 1; n < cumulative.size(); ++n)
    out.push_back(cumulative[n] - cumulative[n - 1]);
  return out;
}

std::vector<std::uint64_t> tail(const std::vector<std::uint64_t>& values) {
  return {values.begin() + 1, values.end()};
}

Element randomReducedWord(const GroupModel& model, int maxLen, std::mt19937_64& rng) {
  const int len = static_cast<int>(rng() % (maxLen + 1));
  std::vector<Letter> word;
  for (int i = 0; i < len; ++i) {
    std::vector<Letter> allowed;
    for (Letter x = 0; x < model.alphabetSize(); ++x) {
      if (!word.empty()) {
        if (model.kind() == ModelKind::Free && x == model.inverseLetter(word.back()))
          continue;
        if (model.kind() == ModelKind::FreeProduct && model.sameFactor(x, word.back()))
          continue;
      }
      allowed.push_back(x);
    }
    word.push_back(allowed[rng() % allowed.size()]);
  }
  return normalize(model, word);
}

std::string describeCounts(std::uint64_t got, std::uint64_t want) {
  std::ostringstream out;
  out << got << " of " << want;
  return out.str();
}

}  // namespace

int main() {
  Gate gate;
  std::cout.setf(std::ios::fixed);
  std::cout.precision(6);

  GroupModel f2 = GroupModel::free(2);
  GroupModel z23 = GroupModel::freeProduct({2, 3});

  // 1. Exact counts: closed-form balls and the product sphere recurrence.
  CensusTable f2Balls = buildCensus(f2, 13, 1);
  CensusTable z23Balls = buildCensus(z23, 20, 1);
  {
    bool ok = true;
    std::uint64_t power = 1;
    for (int n = 0; n <= 13; ++n, power *= 3)
      ok = ok && f2Balls.ballCounts[n] == 2 * power - 1;
    auto zSeries = asU64(seriesCoefficients(z23, SeriesKind::Sphere, 20));
    ok = ok && z23Balls.sphereCounts == zSeries;
    for (int n = 3; n <= 20; ++n)
      ok = ok && z23Balls.sphereCounts[n] == 2 * z23Balls.sphereCounts[n - 2];
    gate.report(1, "exact ball counts and sphere recurrence", ok,
                "free rank 2 to 13, product 2*3 to 20");
  }

  // 2. Fitted growth exponents.
  {
    const double dF = growthExponent(f2Balls).deltaHat;
    const double dZ = growthExponent(z23Balls).deltaHat;
    const double errF = std::abs(dF - std::log(3.0));
    const double errZ = std::abs(dZ - 0.5 * std::log(2.0));
    std::ostringstream detail;
    detail << "|err| = " << errF << ", " << errZ;
    gate.report(2, "growth exponents within 0.01", errF <= 0.01 && errZ <= 0.01,
                detail.str());
  }

  // 3. Three independent conjugacy-counting routes agree exactly to n = 8.
  {
    bool ok = true;
    for (const GroupModel& model : {f2, z23}) {
      ConjugacyCensus census = buildConjugacyCensus(model, 8);
      BruteClassCounts brute = bruteClassify(model, 8);
      ok = ok && census.classesAtLength == brute.pointed;
      ok = ok && differenced(census.countsStableCapped) == tail(brute.stable);
      ok = ok && differenced(census.primitivePointed) == tail(brute.primitivePointed);
      ok = ok &&
           differenced(census.primitiveStableCapped) == tail(brute.primitiveStable);
      auto pointed = asU64(seriesCoefficients(model, SeriesKind::ConjugacyPointed, 8));
      auto primitive =
          asU64(seriesCoefficients(model, SeriesKind::ConjugacyPrimitive, 8));
      auto stable =
          asU64(seriesCoefficients(model, SeriesKind::ConjugacyStableCapped, 8));
      ok = ok && pointed == census.classesAtLength;
      ok = ok && tail(primitive) == differenced(census.primitivePointed);
      ok = ok && tail(stable) == differenced(census.countsStableCapped);
    }
    gate.report(3, "census, canonical-form, and necklace counts agree to n = 8", ok,
                "both models, all five curves");
  }

  // 4. Primitive envelope n * count * exp(-delta n) stays within ratio 4.
  ConjugacyCensus conjF2 = buildConjugacyCensus(f2, 14);
  {
    auto primitive = seriesCoefficients(f2, SeriesKind::ConjugacyPrimitive, 14);
    bool exact = true;
    BigInt running = 0;
    for (int n = 0; n <= 14; ++n) {
      running += primitive[n];
      exact = exact && running == BigInt(conjF2.primitivePointed[n]);
    }
    double lo = 1e300, hi = 0.0;
    for (int n = 6; n <= 14; ++n) {
      const double v = n * static_cast<double>(conjF2.primitivePointed[n]) *
                       std::exp(-n * std::log(3.0));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    std::ostringstream detail;
    detail << "ratio " << hi / lo;
    gate.report(4, "primitive envelope ratio <= 4 on [6,14], counts exact",
                exact && lo > 0.0 && hi / lo <= 4.0, detail.str());
  }

  // 5. Primitive complement bounded by c * n * 3^(-n/2); c fitted on [6,10]
  // and required to cover [6,14].
  {
    auto gap = [&](int n) {
      return 1.0 - static_cast<double>(conjF2.primitivePointed[n]) /
                       static_cast<double>(conjF2.countsPointed[n]);
    };
    auto bound = [](int n) { return n * std::pow(3.0, -0.5 * n); };
    double c = 0.0;
    for (int n = 6; n <= 10; ++n) c = std::max(c, gap(n) / bound(n));
    bool holds = c > 0.0;
    for (int n = 6; n <= 14; ++n) holds = holds && gap(n) <= c * bound(n) + 1e-12;
    std::ostringstream detail;
    detail << "c = " << c;
    gate.report(5, "primitive complement <= c*n*3^(-n/2) on [6,14]", holds,
                detail.str());
  }

  // 6. Stable length equals pointed length for every nontorsion class.
  {
    bool ok = true;
    std::uint64_t checked = 0;
    for (const GroupModel& model : {f2, z23}) {
      ConjugacyCensus census = buildConjugacyCensus(model, 10);
      ok = ok && census.indexBuilt;
      for (const auto& [rep, rec] : census.classIndex) {
        if (rec.tau == 0) continue;
        ok = ok && rec.pointedLength == rec.tau;
        ++checked;
      }
    }
    gate.report(6, "stable equals pointed length for nontorsion classes", ok,
                std::to_string(checked) + " classes at n <= 10, both models");
  }

  // 7. Barrier-free census: exact small value, monotone fractions, decay rate.
  {
    BarrierSpec spec{parseElement(f2, "a b"), 0, 0};
    BarrierCensus census = barrierFreeCensus(f2, spec, 12);
    bool ok = census.barrierFree[2] == 11 && census.totals[2] == 12;
    for (int n = 4; n < 12; ++n)
      ok = ok && census.fractions[n + 1] <= census.fractions[n] + 1e-12;
    const double lambda = std::exp(census.fractionFit.deltaHat);
    ok = ok && lambda <= 0.97;
    std::ostringstream detail;
    detail << "fraction(2) = 11/12, lambda = " << lambda;
    gate.report(7, "barrier-free fractions decay", ok, detail.str());
  }

  // 8. Admissible-path suite: 100 random witnesses validate with zero length
  // defect; 100 single-condition corruptions all fail.
  {
    std::mt19937_64 rng(20240817u);
    const Element fPlus = parseElement(f2, "a b");
    const Element fMinus = parseElement(f2, "a b'");
    int witnesses = 0;
    int validPasses = 0;
    int zeroDefects = 0;
    int mutationsApplied = 0;
    int mutationsRejected = 0;
    int attempts = 0;
    while (witnesses < 100 && attempts < 5000) {
      ++attempts;
      const Element& f = (rng() % 2 == 0) ? fPlus : fMinus;
      const int m = 3 + static_cast<int>(rng() % 4);
      Element t1 = randomReducedWord(f2, 4, rng);
      Element t2 = randomReducedWord(f2, 4, rng);
      AdmissiblePathWitness witness;
      try {
        witness = buildAdmissibleWitness(f2, t1, f, m, t2);
      } catch (const std::domain_error&) {
        continue;
      }
      AdmissibleReport report = validateAdmissible(f2, witness);
      if (report.pass()) ++validPasses;
      if (report.lengthDefect == 0) ++zeroDefects;
      const AdmissibleMutation kinds[] = {AdmissibleMutation::BumpD,
                                          AdmissibleMutation::DetourQ,
                                          AdmissibleMutation::ShiftP};
      AdmissibleMutation kind = kinds[witnesses % 3];
      std::optional<AdmissiblePathWitness> mutated;
      try {
        mutated = mutateAdmissible(f2, witness, kind);
      } catch (const std::domain_error&) {
        mutated = mutateAdmissible(f2, witness, AdmissibleMutation::BumpD);
      }
      ++mutationsApplied;
      if (!validateAdmissible(f2, *mutated).pass()) ++mutationsRejected;
      ++witnesses;
    }
    const bool ok = witnesses == 100 && validPasses == 100 && zeroDefects == 100 &&
                    mutationsApplied == 100 && mutationsRejected == 100;
    std::ostringstream detail;
    detail << "passes " << describeCounts(validPasses, 100) << ", rejected mutations "
           << describeCounts(mutationsRejected, 100);
    gate.report(8, "admissible witnesses validate; corruptions fail", ok,
                detail.str());
  }

  // 9. Primitive classes with tau = n have exactly n members of length n.
  {
    ConjugacyCensus census = buildConjugacyCensus(f2, 10);
    bool ok = census.indexBuilt;
    std::uint64_t classesChecked = 0;
    for (int n = 1; n <= 10 && ok; ++n) {
      std::vector<Element> reps;
      for (const auto& [rep, rec] : census.classIndex)
        if (rec.isPrimitive && rec.tau == n) reps.push_back(rep);
      AnnulusMultiplicity annulus = classAnnulusMultiplicity(f2, n, 0, reps);
      for (std::uint64_t count : annulus.memberCounts)
        ok = ok && count == static_cast<std::uint64_t>(n);
      ok = ok && std::abs(annulus.maxOverN - 1.0) < 1e-12;
      classesChecked += reps.size();
    }
    gate.report(9, "primitive classes have exactly n members at length n", ok,
                std::to_string(classesChecked) + " classes to n = 10");
  }

  // 10. Projection complex diagnostics.
  {
    ProjectionComplexGraph w4 = buildComplex(f2, parseElement(f2, "a b"), 2, 4);
    bool monotone = true;
    const int grid[] = {1, 2, 3, 4, 6, 10};
    const int V = static_cast<int>(w4.vertices.size());
    for (int v = 0; v < V && monotone; ++v) {
      for (int w = 0; w < V && monotone; ++w) {
        if (v == w) continue;
        std::size_t previous = std::numeric_limits<std::size_t>::max();
        for (int K : grid) {
          const std::size_t size = intervalSet(w4, v, w, K).size();
          monotone = monotone && size <= previous;
          previous = size;
        }
      }
    }

    ProjectionComplexGraph w2 = buildComplex(f2, parseElement(f2, "a"), 1, 2);
    AcylindricityProbe acyl = acylindricityProbe(f2, w2, 1, 2);
    bool decay = !acyl.counts.empty();
    for (std::size_t i = 1; i < acyl.counts.size(); ++i)
      decay = decay && acyl.counts[i] <= acyl.counts[i - 1];

    bool kernels = true;
    for (const GroupModel& model : {f2, z23}) {
      std::vector<Element> sample;
      const int cap = model.kind() == ModelKind::Free ? 3 : 4;
      for (int n = 1; n <= cap; ++n)
        for (const Element& g : sphereElements(model, n))
          if (!isTorsion(model, g)) sample.push_back(g);
      KernelBoundReport kernel = kernelBoundProbe(model, sample, 8);
      kernels = kernels && kernel.maxKernel == 1;
    }
    std::ostringstream detail;
    detail << V << " window vertices; kernel max 1";
    gate.report(10, "interval monotonicity, acylindricity decay, trivial kernels",
                monotone && decay && kernels, detail.str());
  }

  // 11. Rationality probe: planted recurrences, the sphere recurrence, and no
  // short recurrence for the pointed conjugacy series.
  {
    std::mt19937 rng(424243u);
    int recovered = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const int order = 1 + static_cast<int>(rng() % 5);
      std::vector<BigRational> q(order);
      for (auto& qi : q)
        qi = BigRational(static_cast<int>(rng() % 7) - 3, 1 + static_cast<int>(rng() % 2));
      std::vector<BigRational> seq(order);
      bool any = false;
      for (auto& s : seq) {
        const int v = static_cast<int>(rng() % 9) - 4;
        s = v;
        any = any || v != 0;
      }
      if (!any) seq[0] = 1;
      while (seq.size() < 16) {
        BigRational next(0);
        for (int i = 0; i < order; ++i) next += q[i] * seq[seq.size() - 1 - i];
        seq.push_back(next);
      }
      BigInt common(1);
      for (const auto& s : seq)
        common = boost::multiprecision::lcm(common, boost::multiprecision::denominator(s));
      std::vector<BigInt> scaled;
      for (const auto& s : seq)
        scaled.push_back(boost::multiprecision::numerator(s * BigRational(common)));
      auto found = rationalityProbe(scaled, 5);
      if (found && found->order <= order && recurrenceHolds(scaled, *found))
        ++recovered;
    }

    auto spheres = seriesCoefficients(f2, SeriesKind::Sphere, 10);
    auto sphereRec = rationalityProbe(spheres, 2);
    const bool sphereOk =
        sphereRec && sphereRec->order == 2 &&
        sphereRec->coefficients ==
            std::vector<BigRational>{BigRational(3), BigRational(0)} &&
        recurrenceHolds(spheres, *sphereRec);

    auto pointed = seriesCoefficients(f2, SeriesKind::ConjugacyPointed, 19);
    auto pointedRec = rationalityProbe(pointed, 6);
    const bool pointedOk =
        !pointedRec.has_value() &&
        formatRationalityVerdict(pointedRec, 6, pointed.size()) ==
            "no linear recurrence of order ≤ 6 on 20 terms";

    std::ostringstream detail;
    detail << "planted " << describeCounts(recovered, 50);
    gate.report(11, "rationality probe: planted found, sphere found, pointed none",
                recovered == 50 && sphereOk && pointedOk, detail.str());
  }

  // 12. Censuses are identical across shard counts 1, 4, 16.
  {
    bool ok = true;
    BarrierSpec spec{parseElement(f2, "a b"), 0, 0};
    for (int shards : {4, 16}) {
      EnumerationOptions opts;
      opts.shards = shards;
      CensusTable balls = buildCensus(f2, 9, 1, opts);
      ok = ok && balls.sphereCounts == buildCensus(f2, 9, 1).sphereCounts &&
           balls.ballCounts == buildCensus(f2, 9, 1).ballCounts;
      ConjugacyCensusOptions copts;
      copts.enumeration = opts;
      ConjugacyCensus conj = buildConjugacyCensus(f2, 9, copts);
      ConjugacyCensus base = buildConjugacyCensus(f2, 9);
      ok = ok && conj.countsPointed == base.countsPointed &&
           conj.countsStableCapped == base.countsStableCapped &&
           conj.primitivePointed == base.primitivePointed &&
           conj.primitiveStableCapped == base.primitiveStableCapped &&
           conj.classesAtLength == base.classesAtLength;
      ok = ok && barrierFreeCensus(f2, spec, 8, opts).barrierFree ==
                     barrierFreeCensus(f2, spec, 8).barrierFree;
      ok = ok && fractionalBarrierCensus(f2, spec, 0.5, 2, 7, opts).satisfied ==
                     fractionalBarrierCensus(f2, spec, 0.5, 2, 7).satisfied;
      ok = ok &&
           linearDriftCensus(f2, spec.f, 2, 0.5, 0.25, 0, 6, opts).conjunction ==
               linearDriftCensus(f2, spec.f, 2, 0.5, 0.25, 0, 6).conjunction;
    }
    gate.report(12, "censuses identical across shard counts 1, 4, 16", ok,
                "ball, conjugacy, barrier, fractional, drift");
  }

  std::cout << (gate.failures == 0 ? "ALL CRITERIA PASSED"
                                   : std::to_string(gate.failures) + " CRITERIA FAILED")
            << '\n';
  return gate.failures == 0 ? 0 : 1;
}
