#include "conjgrowth/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "conjgrowth/conjugacy_census.hpp"
#include "conjgrowth/contracting.hpp"
#include "conjgrowth/enumeration.hpp"
#include "conjgrowth/projection_complex.hpp"
#include "conjgrowth/series.hpp"
#include "conjgrowth/stallings.hpp"
#include "json.hpp"

namespace conjgrowth {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& knownKinds() {
  static const std::vector<std::string> kinds = {
      "model-info",     "census-balls",       "census-conjugacy",
      "census-barriers", "census-fractional",  "census-drift",
      "audit-contraction", "admissible",       "complex-build",
      "complex-loxodromic", "complex-acyl",    "series",
      "scc-estimate"};
  return kinds;
}

json fitJson(const GrowthFit& fit) {
  return json{{"deltaHat", fit.deltaHat},
              {"maxAbsResidual", fit.maxAbsResidual},
              {"degenerate", fit.degenerate},
              {"sublinearTrend", fit.sublinearTrend},
              {"windowLo", fit.windowLo},
              {"windowHi", fit.windowHi}};
}

void atomicWrite(const fs::path& path, const std::string& body) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << body;
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string formatDouble(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

struct Artifacts {
  json results;
  std::string csv;   // written as <id>.csv when nonempty
  std::string text;  // written as <id>.txt when nonempty
};

void requireRange(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid config: " + what);
}

void validate(const ExperimentConfig& c) {
  requireRange(std::find(knownKinds().begin(), knownKinds().end(), c.kind) !=
                   knownKinds().end(),
               "unknown experiment kind \"" + c.kind + "\"");
  requireRange(!c.id.empty(), "empty experiment id");
  requireRange(c.id.find('/') == std::string::npos &&
                   c.id.find('\\') == std::string::npos && c.id != "." &&
                   c.id != "..",
               "experiment id must be a plain file stem");
  requireRange(c.maxRadius >= 0, "maxRadius must be >= 0");
  requireRange(c.budget >= 1, "budget must be >= 1");
  requireRange(c.shards >= 1, "shards must be >= 1");
  requireRange(c.annulusWidth >= 1, "annulusWidth must be >= 1");
  requireRange(c.epsilon >= 0, "epsilon must be >= 0");
  requireRange(c.barrierM >= 0, "M must be >= 0");
  requireRange(c.theta > 0.0 && c.theta <= 1.0, "theta must lie in (0, 1]");
  requireRange(c.theta1 >= 0.0 && c.theta1 <= 1.0, "theta1 must lie in [0, 1]");
  requireRange(c.theta2 >= 0.0 && c.theta2 <= 1.0, "theta2 must lie in [0, 1]");
  requireRange(c.minLength >= 1, "L must be >= 1");
  requireRange(c.m >= 1, "m must be >= 1");
  requireRange(c.trials >= 0, "trials must be >= 0");
  requireRange(c.tLength >= 0, "tLength must be >= 0");
  requireRange(c.K >= 0, "K must be >= 0");
  requireRange(c.windowRadius >= 0, "windowRadius must be >= 0");
  requireRange(c.nMax >= 0, "Nmax must be >= 0");
  requireRange(c.kPrime >= 0, "Kprime must be >= 0");
  requireRange(c.acylD >= 0, "D must be >= 0");
  requireRange(c.acylR >= 0, "moverRadius must be >= 0");
  requireRange(c.kernelRadius >= 0, "kernelRadius must be >= 0");
  requireRange(c.searchRadius >= 1, "searchRadius must be >= 1");
  requireRange(c.maxN >= 0, "maxN must be >= 0");
  requireRange(c.maxOrder >= 1, "maxOrder must be >= 1");
  requireRange(c.M1 >= 0, "M1 must be >= 0");
  requireRange(c.M2 >= 0, "M2 must be >= 0");
}

Element parseConfigElement(const GroupModel& model, const std::string& text,
                           const std::string& flag) {
  try {
    return parseElement(model, text);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("invalid config: " + flag + " \"" + text +
                                "\": " + e.what());
  }
}

std::vector<Element> parseElementList(const GroupModel& model, const std::string& text,
                                      const std::string& flag) {
  std::vector<Element> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const auto b = item.find_last_not_of(" \t");
    out.push_back(parseConfigElement(model, item.substr(a, b - a + 1), flag));
  }
  if (out.empty())
    throw std::invalid_argument("invalid config: " + flag + " lists no elements");
  return out;
}

// Letterwise uniform reduced word; the successor constraint keeps the word in
// normal form so length is exactly the drawn value.
Element randomReducedWord(const GroupModel& model, int maxLen, std::mt19937_64& rng) {
  const int len = maxLen > 0 ? static_cast<int>(rng() % (maxLen + 1)) : 0;
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

Artifacts runModelInfo(const GroupModel& model) {
  Artifacts art;
  json letters = json::array();
  for (Letter x = 0; x < model.alphabetSize(); ++x) letters.push_back(model.letterToken(x));
  art.results = json{{"spec", model.specString()},
                     {"kind", model.kind() == ModelKind::Free ? "free" : "product"},
                     {"alphabetSize", model.alphabetSize()},
                     {"letters", letters},
                     {"elementary", model.isElementaryModel()}};
  if (model.kind() == ModelKind::Free)
    art.results["rank"] = model.rank();
  else
    art.results["orders"] = model.orders();
  return art;
}

Artifacts runCensusBalls(const GroupModel& model, const ExperimentConfig& c,
                         const EnumerationOptions& opts) {
  CensusTable table = buildCensus(model, c.maxRadius, c.annulusWidth, opts);
  GrowthFit fit = growthExponent(table);
  std::ostringstream csv;
  csv << "n,sphere,ball,annulus\n";
  for (std::size_t n = 0; n < table.sphereCounts.size(); ++n)
    csv << n << ',' << table.sphereCounts[n] << ',' << table.ballCounts[n] << ','
        << table.annulusCounts[n] << '\n';
  Artifacts art;
  art.csv = csv.str();
  art.results = json{{"sphere", table.sphereCounts},
                     {"ball", table.ballCounts},
                     {"annulus", table.annulusCounts},
                     {"annulusWidth", table.annulusWidth},
                     {"fit", fitJson(fit)}};
  return art;
}

Artifacts runCensusConjugacy(const GroupModel& model, const ExperimentConfig& c,
                             const EnumerationOptions& opts) {
  ConjugacyCensusOptions copts;
  copts.enumeration = opts;
  ConjugacyCensus census = buildConjugacyCensus(model, c.maxRadius, copts);
  RatioCurve ratio = primitiveRatioCurve(census);
  GrowthFit fit = growthExponent(buildCensus(model, c.maxRadius, 1, opts));
  const int lo = c.windowLo >= 0 ? c.windowLo : std::max(1, c.maxRadius / 2);
  const int hi = c.windowHi >= 0 ? std::min(c.windowHi, c.maxRadius) : c.maxRadius;
  EnvelopeReport envelope = envelopeCheck(census, fit.deltaHat, lo, hi);

  std::ostringstream csv;
  csv << "n,pointed,stable_capped,primitive_pointed,primitive_stable_capped,e\n";
  for (int n = 0; n <= census.maxRadius; ++n) {
    const double gap = n == 0 ? 0.0 : 1.0 - ratio.pointedRatio[n];
    csv << n << ',' << census.countsPointed[n] << ',' << census.countsStableCapped[n]
        << ',' << census.primitivePointed[n] << ',' << census.primitiveStableCapped[n]
        << ',' << formatDouble(gap) << '\n';
  }
  Artifacts art;
  art.csv = csv.str();
  art.results = json{{"pointed", census.countsPointed},
                     {"stableCapped", census.countsStableCapped},
                     {"primitivePointed", census.primitivePointed},
                     {"primitiveStableCapped", census.primitiveStableCapped},
                     {"classesAtLength", census.classesAtLength},
                     {"pointedRatio", ratio.pointedRatio},
                     {"stableRatio", ratio.stableRatio},
                     {"decayFit", fitJson(ratio.decayFit)},
                     {"deltaHat", fit.deltaHat},
                     {"envelope",
                      json{{"windowLo", envelope.windowLo},
                           {"windowHi", envelope.windowHi},
                           {"curves", envelope.curves},
                           {"windowMin", envelope.windowMin},
                           {"windowMax", envelope.windowMax},
                           {"ratio", envelope.ratio}}}};
  return art;
}

std::string rateCsv(const std::vector<std::uint64_t>& satisfied,
                    const std::vector<std::uint64_t>& totals,
                    const std::vector<double>& fractions, double fittedRate) {
  std::ostringstream csv;
  csv << "n,satisfied,total,fraction,fitted_rate\n";
  for (std::size_t n = 0; n < totals.size(); ++n)
    csv << n << ',' << satisfied[n] << ',' << totals[n] << ','
        << formatDouble(fractions[n]) << ',' << formatDouble(fittedRate) << '\n';
  return csv.str();
}

Artifacts runCensusBarriers(const GroupModel& model, const ExperimentConfig& c,
                            const EnumerationOptions& opts) {
  BarrierSpec spec{parseConfigElement(model, c.f, "--f"), c.epsilon, c.barrierM};
  BarrierCensus census = barrierFreeCensus(model, spec, c.maxRadius, opts);
  const double rate = std::exp(census.fractionFit.deltaHat);
  Artifacts art;
  art.csv = rateCsv(census.barrierFree, census.totals, census.fractions, rate);
  art.results = json{{"f", formatElement(model, spec.f)},
                     {"epsilon", spec.epsilon},
                     {"M", spec.M},
                     {"totals", census.totals},
                     {"barrierFree", census.barrierFree},
                     {"fractions", census.fractions},
                     {"fittedRate", rate},
                     {"fractionFit", fitJson(census.fractionFit)}};
  return art;
}

Artifacts runCensusFractional(const GroupModel& model, const ExperimentConfig& c,
                              const EnumerationOptions& opts) {
  BarrierSpec spec{parseConfigElement(model, c.f, "--f"), c.epsilon, c.barrierM};
  FractionalBarrierCensus census =
      fractionalBarrierCensus(model, spec, c.theta, c.minLength, c.maxRadius, opts);
  const double rate = std::exp(census.countFit.deltaHat);
  Artifacts art;
  art.csv = rateCsv(census.satisfied, census.totals, census.fractions, rate);
  art.results = json{{"f", formatElement(model, spec.f)},
                     {"epsilon", spec.epsilon},
                     {"M", spec.M},
                     {"theta", census.theta},
                     {"L", census.minLength},
                     {"totals", census.totals},
                     {"satisfied", census.satisfied},
                     {"fractions", census.fractions},
                     {"fittedRate", rate},
                     {"countFit", fitJson(census.countFit)}};
  return art;
}

Artifacts runCensusDrift(const GroupModel& model, const ExperimentConfig& c,
                         const EnumerationOptions& opts) {
  Element f = parseConfigElement(model, c.f, "--f");
  LinearDriftCensus census = linearDriftCensus(model, f, c.m, c.theta1, c.theta2,
                                               c.epsilon, c.maxRadius, opts);
  const double rate = std::exp(census.gapFit.deltaHat);
  Artifacts art;
  art.csv = rateCsv(census.conjunction, census.totals, census.fractions, rate);
  art.results = json{{"f", formatElement(model, f)},
                     {"m", c.m},
                     {"theta1", c.theta1},
                     {"theta2", c.theta2},
                     {"epsilon", c.epsilon},
                     {"totals", census.totals},
                     {"clause1", census.clause1},
                     {"clause2", census.clause2},
                     {"clause3", census.clause3},
                     {"conjunction", census.conjunction},
                     {"fractions", census.fractions},
                     {"fittedRate", rate},
                     {"gapFit", fitJson(census.gapFit)}};
  return art;
}

Artifacts runAuditContraction(const GroupModel& model, const ExperimentConfig& c,
                              const EnumerationOptions& opts) {
  Element f = parseConfigElement(model, c.f, "--f");
  const int axisRadius = 4 * c.maxRadius + 3 * f.length() + 4;
  AxisSet axis = makeAxis(model, f, identity(model), axisRadius);
  ContractionAudit audit = contractionAudit(model, axis, c.maxRadius, opts);
  const int intersectionRadius = std::min(c.maxRadius, 4);
  IntersectionAudit inter = boundedIntersectionAudit(model, f, intersectionRadius, opts);
  Artifacts art;
  art.results = json{
      {"f", formatElement(model, f)},
      {"sampleRadius", c.maxRadius},
      {"cEmp", audit.cEmp},
      {"witnessA", formatElement(model, audit.witnessA)},
      {"witnessB", formatElement(model, audit.witnessB)},
      {"witnessDistance", audit.witnessDistance},
      {"witnessSpan", audit.witnessSpan},
      {"samples", audit.samples},
      {"intersection", json{{"radius", intersectionRadius},
                            {"bEmp", inter.bEmp},
                            {"axisCount", inter.axisCount},
                            {"witnessT", formatElement(model, inter.witnessT)},
                            {"witnessTPrime", formatElement(model, inter.witnessTPrime)},
                            {"samples", inter.samples}}}};
  return art;
}

Artifacts runAdmissible(const GroupModel& model, const ExperimentConfig& c) {
  Element f = parseConfigElement(model, c.f, "--f");
  std::mt19937_64 rng(c.seed);
  int built = 0;
  int degenerate = 0;
  int passes = 0;
  long long maxDefect = 0;
  int mutationsTried = 0;
  int mutationsRejected = 0;
  int mutationsSkipped = 0;
  const int attemptCap = 50 * std::max(c.trials, 1);
  for (int attempt = 0; built < c.trials && attempt < attemptCap; ++attempt) {
    Element t1 = randomReducedWord(model, c.tLength, rng);
    Element t2 = randomReducedWord(model, c.tLength, rng);
    AdmissiblePathWitness witness;
    try {
      witness = buildAdmissibleWitness(model, t1, f, c.m, t2);
    } catch (const std::domain_error&) {
      ++degenerate;
      continue;
    }
    ++built;
    AdmissibleReport report = validateAdmissible(model, witness);
    if (report.pass()) ++passes;
    maxDefect = std::max(maxDefect, report.lengthDefect);
    for (AdmissibleMutation kind : {AdmissibleMutation::BumpD, AdmissibleMutation::DetourQ,
                                    AdmissibleMutation::ShiftP}) {
      try {
        AdmissiblePathWitness mutated = mutateAdmissible(model, witness, kind);
        ++mutationsTried;
        if (!validateAdmissible(model, mutated).pass()) ++mutationsRejected;
      } catch (const std::domain_error&) {
        ++mutationsSkipped;
      }
    }
  }
  if (built < c.trials)
    throw std::domain_error("admissible witness construction kept degenerating; "
                            "lower --m or shorten --t-length");
  Artifacts art;
  art.results = json{{"f", formatElement(model, f)},
                     {"m", c.m},
                     {"tLength", c.tLength},
                     {"trials", built},
                     {"degenerateRetries", degenerate},
                     {"passes", passes},
                     {"maxLengthDefect", maxDefect},
                     {"mutationsTried", mutationsTried},
                     {"mutationsRejected", mutationsRejected},
                     {"mutationsSkipped", mutationsSkipped}};
  return art;
}

bool windowConnected(const ProjectionComplexGraph& complex) {
  for (const auto& row : complex.distances)
    for (int d : row)
      if (d < 0) return false;
  return true;
}

// K = 0 asks for the smallest threshold whose window graph is connected.
// Blocking weakens as K grows, so the scan is monotone.
ProjectionComplexGraph resolveComplex(const GroupModel& model, const Element& f,
                                      const ExperimentConfig& c,
                                      const EnumerationOptions& opts, int* chosenK) {
  if (c.K > 0) {
    *chosenK = c.K;
    return buildComplex(model, f, c.K, c.windowRadius, opts);
  }
  constexpr int kAutoCap = 16;
  for (int K = 1; K <= kAutoCap; ++K) {
    ProjectionComplexGraph complex = buildComplex(model, f, K, c.windowRadius, opts);
    if (windowConnected(complex)) {
      *chosenK = K;
      return complex;
    }
  }
  throw std::domain_error("no K <= 16 connects the window; pass --K explicitly");
}

Artifacts runComplexBuild(const GroupModel& model, const ExperimentConfig& c,
                          const EnumerationOptions& opts) {
  Element f = parseConfigElement(model, c.f, "--f");
  int chosenK = 0;
  ProjectionComplexGraph complex = resolveComplex(model, f, c, opts, &chosenK);
  Artifacts art;
  art.text = formatComplexAdjacency(complex);
  art.results = json::parse(complexMetadataJson(model, complex));
  art.results["autoK"] = c.K <= 0;
  return art;
}

Artifacts runComplexLoxodromic(const GroupModel& model, const ExperimentConfig& c,
                               const EnumerationOptions& opts) {
  Element f = parseConfigElement(model, c.f, "--f");
  Element g = parseConfigElement(model, c.g, "--g");
  int chosenK = 0;
  ProjectionComplexGraph complex = resolveComplex(model, f, c, opts, &chosenK);
  LoxodromicProbe probe = loxodromicTest(model, complex, g, c.nMax, c.kPrime);
  Artifacts art;
  art.results = json{{"f", formatElement(model, f)},
                     {"g", formatElement(model, g)},
                     {"K", chosenK},
                     {"Nmax", c.nMax},
                     {"Kprime", probe.Kprime},
                     {"baseVertex", probe.baseVertex},
                     {"separations", probe.separations},
                     {"verdict", probe.verdict}};
  return art;
}

Artifacts runComplexAcyl(const GroupModel& model, const ExperimentConfig& c,
                         const EnumerationOptions& opts) {
  Element f = parseConfigElement(model, c.f, "--f");
  int chosenK = 0;
  ProjectionComplexGraph complex = resolveComplex(model, f, c, opts, &chosenK);
  AcylindricityProbe probe = acylindricityProbe(model, complex, c.acylD, c.acylR, opts);
  std::ostringstream csv;
  csv << "R,count\n";
  for (std::size_t i = 0; i < probe.radii.size(); ++i)
    csv << probe.radii[i] << ',' << probe.counts[i] << '\n';
  Artifacts art;
  art.csv = csv.str();
  art.results = json{{"f", formatElement(model, f)},
                     {"K", chosenK},
                     {"D", probe.D},
                     {"moverRadius", probe.moverRadius},
                     {"radii", probe.radii},
                     {"counts", probe.counts},
                     {"samples", probe.samples}};
  if (c.kernelRadius > 0) {
    std::vector<Element> sample;
    for (int n = 1; n <= c.kernelRadius; ++n)
      for (const Element& g : sphereElements(model, n, opts))
        if (!isTorsion(model, g)) sample.push_back(g);
    KernelBoundReport kernel = kernelBoundProbe(model, sample, c.searchRadius);
    art.results["kernel"] = json{{"maxKernel", kernel.maxKernel},
                                 {"witness", formatElement(model, kernel.witness)},
                                 {"samples", kernel.samples},
                                 {"sampleRadius", c.kernelRadius},
                                 {"searchRadius", c.searchRadius}};
  }
  return art;
}

Artifacts runSeries(const GroupModel& model, const ExperimentConfig& c,
                    const EnumerationOptions& opts) {
  SeriesKind kind = parseSeriesKind(c.seriesKind);
  const int lo = c.windowLo >= 0 ? c.windowLo : std::max(1, c.maxN / 2);
  const int hi = c.windowHi >= 0 ? std::min(c.windowHi, c.maxN) : c.maxN;
  SeriesReport report = buildSeriesReport(model, kind, c.maxN, c.maxOrder, lo, hi, opts);
  Artifacts art;
  art.results = json::parse(seriesReportJson(report));
  return art;
}

Artifacts runSccEstimate(const GroupModel& model, const ExperimentConfig& c,
                         const EnumerationOptions& opts) {
  std::vector<Element> generators = parseElementList(model, c.generators, "--generators");
  SccReport report = sccEstimate(model, generators, c.M1, c.M2, c.maxRadius, opts);
  std::ostringstream csv;
  csv << "n,subgroup_sphere,escape_sphere\n";
  for (std::size_t n = 0; n < report.subgroupSphere.size(); ++n)
    csv << n << ',' << report.subgroupSphere[n] << ',' << report.escapeSphere[n] << '\n';
  Artifacts art;
  art.csv = csv.str();
  json gens = json::array();
  for (const Element& g : generators) gens.push_back(formatElement(model, g));
  art.results = json{{"generators", gens},
                     {"M1", report.M1},
                     {"M2", report.M2},
                     {"subgroupSphere", report.subgroupSphere},
                     {"escapeSphere", report.escapeSphere},
                     {"subgroupTotal", report.subgroupTotal},
                     {"escapeTotal", report.escapeTotal},
                     {"ambientFit", fitJson(report.ambient)},
                     {"escapeFit", fitJson(report.escape)},
                     {"exponentGap", report.exponentGap},
                     {"escapeEmpty", report.escapeEmpty}};
  return art;
}

Artifacts dispatch(const GroupModel& model, const ExperimentConfig& c,
                   const EnumerationOptions& opts) {
  if (c.kind == "model-info") return runModelInfo(model);
  if (model.isElementaryModel())
    throw std::invalid_argument("model " + model.specString() +
                                " is elementary; censuses and probes need a "
                                "nonelementary model");
  if (c.kind == "census-balls") return runCensusBalls(model, c, opts);
  if (c.kind == "census-conjugacy") return runCensusConjugacy(model, c, opts);
  if (c.kind == "census-barriers") return runCensusBarriers(model, c, opts);
  if (c.kind == "census-fractional") return runCensusFractional(model, c, opts);
  if (c.kind == "census-drift") return runCensusDrift(model, c, opts);
  if (c.kind == "audit-contraction") return runAuditContraction(model, c, opts);
  if (c.kind == "admissible") return runAdmissible(model, c);
  if (c.kind == "complex-build") return runComplexBuild(model, c, opts);
  if (c.kind == "complex-loxodromic") return runComplexLoxodromic(model, c, opts);
  if (c.kind == "complex-acyl") return runComplexAcyl(model, c, opts);
  if (c.kind == "series") return runSeries(model, c, opts);
  if (c.kind == "scc-estimate") return runSccEstimate(model, c, opts);
  throw std::invalid_argument("invalid config: unknown experiment kind \"" + c.kind +
                              "\"");
}

}  // namespace

std::string configJson(const ExperimentConfig& c) {
  json j{{"kind", c.kind},
         {"id", c.id},
         {"model", c.modelSpec},
         {"outDir", c.outDir},
         {"maxRadius", c.maxRadius},
         {"budget", c.budget},
         {"shards", c.shards},
         {"seed", c.seed},
         {"annulusWidth", c.annulusWidth},
         {"f", c.f},
         {"epsilon", c.epsilon},
         {"M", c.barrierM},
         {"theta", c.theta},
         {"theta1", c.theta1},
         {"theta2", c.theta2},
         {"L", c.minLength},
         {"m", c.m},
         {"trials", c.trials},
         {"tLength", c.tLength},
         {"K", c.K},
         {"windowRadius", c.windowRadius},
         {"g", c.g},
         {"Nmax", c.nMax},
         {"Kprime", c.kPrime},
         {"D", c.acylD},
         {"moverRadius", c.acylR},
         {"kernelRadius", c.kernelRadius},
         {"searchRadius", c.searchRadius},
         {"seriesKind", c.seriesKind},
         {"maxN", c.maxN},
         {"maxOrder", c.maxOrder},
         {"windowLo", c.windowLo},
         {"windowHi", c.windowHi},
         {"generators", c.generators},
         {"M1", c.M1},
         {"M2", c.M2}};
  return j.dump();
}

int runExperiment(const ExperimentConfig& config) {
  try {
    ExperimentConfig c = config;
    if (c.id.empty()) c.id = c.kind;
    validate(c);
    GroupModel model = GroupModel::fromSpec(c.modelSpec);
    EnumerationOptions opts;
    opts.budget = c.budget;
    opts.shards = c.shards;
    Artifacts art = dispatch(model, c, opts);

    json report{{"id", c.id},
                {"kind", c.kind},
                {"seed", c.seed},
                {"config", json::parse(configJson(c))},
                {"results", art.results}};
    fs::path dir(c.outDir.empty() ? "." : c.outDir);
    fs::create_directories(dir);
    atomicWrite(dir / (c.id + ".json"), report.dump(2) + "\n");
    if (!art.csv.empty()) atomicWrite(dir / (c.id + ".csv"), art.csv);
    if (!art.text.empty()) atomicWrite(dir / (c.id + ".txt"), art.text);
    return kExitOk;
  } catch (const EnumerationBudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const MaterializationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

std::string emitReport(const std::vector<std::string>& fragmentPaths) {
  json bundle = json::object();
  for (const std::string& path : fragmentPaths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read fragment " + path);
    json fragment;
    try {
      fragment = json::parse(in);
    } catch (const json::parse_error& e) {
      throw std::invalid_argument("fragment " + path + " is not JSON: " + e.what());
    }
    if (!fragment.is_object() || !fragment.contains("id") ||
        !fragment["id"].is_string())
      throw std::invalid_argument("fragment " + path + " lacks an experiment id");
    const std::string id = fragment["id"].get<std::string>();
    if (bundle.contains(id)) throw IdCollisionError(id);
    bundle[id] = fragment;
  }
  return bundle.dump(2) + "\n";
}

}  // namespace conjgrowth
