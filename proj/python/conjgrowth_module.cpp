#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "conjgrowth/conjugacy_census.hpp"
#include "conjgrowth/contracting.hpp"
#include "conjgrowth/enumeration.hpp"
#include "conjgrowth/group_model.hpp"
#include "conjgrowth/projection_complex.hpp"
#include "conjgrowth/series.hpp"

namespace py = pybind11;
using namespace conjgrowth;

namespace {

py::object pyBig(const BigInt& v) {
  return py::module_::import("builtins").attr("int")(v.str());
}

py::list pyBigList(const std::vector<BigInt>& values) {
  py::list out;
  for (const auto& v : values) out.append(pyBig(v));
  return out;
}

std::vector<BigInt> bigFromPy(const py::sequence& values) {
  std::vector<BigInt> out;
  for (const auto& item : values)
    out.emplace_back(py::str(item).cast<std::string>());
  return out;
}

EnumerationOptions makeOptions(std::uint64_t budget, int shards) {
  EnumerationOptions options;
  options.budget = budget;
  options.shards = shards;
  return options;
}

py::dict fitDict(const GrowthFit& fit) {
  py::dict out;
  out["delta_hat"] = fit.deltaHat;
  out["max_abs_residual"] = fit.maxAbsResidual;
  out["degenerate"] = fit.degenerate;
  out["sublinear_trend"] = fit.sublinearTrend;
  out["window"] = py::make_tuple(fit.windowLo, fit.windowHi);
  return out;
}

py::dict recordDict(const GroupModel& model, const ConjugacyRecord& rec) {
  py::dict out;
  out["canonical"] = formatElement(model, rec.canonicalRep);
  out["tau"] = rec.tau;
  out["pointed_length"] = rec.pointedLength;
  out["primitive"] = rec.isPrimitive;
  out["root"] = formatElement(model, rec.root);
  out["exponent"] = rec.exponent;
  return out;
}

}  // namespace

PYBIND11_MODULE(conjgrowth, m) {
  m.doc() = "censuses and probes for conjugacy growth in free and free-product groups";

  py::register_exception<EnumerationBudgetError>(m, "BudgetError");
  py::register_exception<MaterializationError>(m, "MaterializationError");

  py::class_<GroupModel>(m, "GroupModel")
      .def_static("free", &GroupModel::free, py::arg("rank"))
      .def_static("free_product",
                  [](const std::vector<int>& orders) { return GroupModel::freeProduct(orders); },
                  py::arg("orders"))
      .def_static("from_spec", &GroupModel::fromSpec, py::arg("spec"))
      .def_property_readonly("spec", &GroupModel::specString)
      .def_property_readonly("alphabet_size", &GroupModel::alphabetSize)
      .def_property_readonly("elementary", &GroupModel::isElementaryModel)
      .def_property_readonly("letters",
                             [](const GroupModel& model) {
                               std::vector<std::string> out;
                               for (Letter x = 0; x < model.alphabetSize(); ++x)
                                 out.push_back(model.letterToken(x));
                               return out;
                             })
      .def("__repr__", [](const GroupModel& model) {
        return "GroupModel('" + model.specString() + "')";
      });

  m.def("reduce", [](const GroupModel& model, const std::string& text) {
    return formatElement(model, parseElement(model, text));
  });
  m.def("multiply", [](const GroupModel& model, const std::string& a, const std::string& b) {
    return formatElement(model, multiply(model, parseElement(model, a), parseElement(model, b)));
  });
  m.def("invert", [](const GroupModel& model, const std::string& g) {
    return formatElement(model, invert(model, parseElement(model, g)));
  });
  m.def("power", [](const GroupModel& model, const std::string& g, long long k) {
    return formatElement(model, power(model, parseElement(model, g), k));
  });
  m.def("conjugate", [](const GroupModel& model, const std::string& t, const std::string& g) {
    return formatElement(model, conjugate(model, parseElement(model, t), parseElement(model, g)));
  });
  m.def("distance", [](const GroupModel& model, const std::string& g, const std::string& h) {
    return distance(model, parseElement(model, g), parseElement(model, h));
  });
  m.def("length", [](const GroupModel& model, const std::string& g) {
    return parseElement(model, g).length();
  });
  m.def("is_torsion", [](const GroupModel& model, const std::string& g) {
    return isTorsion(model, parseElement(model, g));
  });
  m.def("stable_length", [](const GroupModel& model, const std::string& g) {
    return stableLength(model, parseElement(model, g));
  });
  m.def("conjugacy_class", [](const GroupModel& model, const std::string& g) {
    return recordDict(model, conjugacyCanonical(model, parseElement(model, g)));
  });

  m.def(
      "ball_census",
      [](const GroupModel& model, int maxRadius, int annulusWidth, std::uint64_t budget,
         int shards) {
        CensusTable table = buildCensus(model, maxRadius, annulusWidth,
                                        makeOptions(budget, shards));
        py::dict out;
        out["radii"] = table.radii;
        out["sphere"] = table.sphereCounts;
        out["ball"] = table.ballCounts;
        out["annulus"] = table.annulusCounts;
        out["fit"] = fitDict(growthExponent(table));
        return out;
      },
      py::arg("model"), py::arg("max_radius"), py::arg("annulus_width") = 1,
      py::arg("budget") = 100000000ULL, py::arg("shards") = 1);

  m.def(
      "conjugacy_census",
      [](const GroupModel& model, int maxRadius, std::uint64_t budget, int shards) {
        ConjugacyCensusOptions options;
        options.enumeration = makeOptions(budget, shards);
        ConjugacyCensus census = buildConjugacyCensus(model, maxRadius, options);
        py::dict out;
        out["pointed"] = census.countsPointed;
        out["stable_capped"] = census.countsStableCapped;
        out["primitive_pointed"] = census.primitivePointed;
        out["primitive_stable_capped"] = census.primitiveStableCapped;
        out["classes_at_length"] = census.classesAtLength;
        return out;
      },
      py::arg("model"), py::arg("max_radius"), py::arg("budget") = 100000000ULL,
      py::arg("shards") = 1);

  m.def(
      "class_annulus_multiplicity",
      [](const GroupModel& model, int n, int delta, const std::vector<std::string>& reps) {
        std::vector<Element> parsed;
        for (const auto& rep : reps) parsed.push_back(parseElement(model, rep));
        AnnulusMultiplicity result = classAnnulusMultiplicity(model, n, delta, parsed);
        py::dict out;
        out["member_counts"] = result.memberCounts;
        out["max_over_n"] = result.maxOverN;
        return out;
      },
      py::arg("model"), py::arg("n"), py::arg("delta"), py::arg("reps"));

  m.def(
      "contraction_audit",
      [](const GroupModel& model, const std::string& f, int sampleRadius, int axisRadius) {
        Element base = parseElement(model, f);
        AxisSet axis = makeAxis(model, base, identity(model), axisRadius);
        ContractionAudit audit = contractionAudit(model, axis, sampleRadius);
        py::dict out;
        out["c_emp"] = audit.cEmp;
        out["samples"] = audit.samples;
        out["witness"] = py::make_tuple(formatElement(model, audit.witnessA),
                                        formatElement(model, audit.witnessB));
        return out;
      },
      py::arg("model"), py::arg("f"), py::arg("sample_radius") = 4,
      py::arg("axis_radius") = 32);

  m.def(
      "barrier_census",
      [](const GroupModel& model, const std::string& f, int epsilon, int M, int maxRadius,
         std::uint64_t budget, int shards) {
        BarrierSpec spec{parseElement(model, f), epsilon, M};
        BarrierCensus census =
            barrierFreeCensus(model, spec, maxRadius, makeOptions(budget, shards));
        py::dict out;
        out["totals"] = census.totals;
        out["barrier_free"] = census.barrierFree;
        out["fractions"] = census.fractions;
        out["fit"] = fitDict(census.fractionFit);
        return out;
      },
      py::arg("model"), py::arg("f"), py::arg("epsilon"), py::arg("M"),
      py::arg("max_radius"), py::arg("budget") = 100000000ULL, py::arg("shards") = 1);

  m.def(
      "fractional_barrier_census",
      [](const GroupModel& model, const std::string& f, int epsilon, int M, double theta,
         int minLength, int maxRadius, std::uint64_t budget, int shards) {
        BarrierSpec spec{parseElement(model, f), epsilon, M};
        FractionalBarrierCensus census = fractionalBarrierCensus(
            model, spec, theta, minLength, maxRadius, makeOptions(budget, shards));
        py::dict out;
        out["totals"] = census.totals;
        out["satisfied"] = census.satisfied;
        out["fractions"] = census.fractions;
        out["fit"] = fitDict(census.countFit);
        return out;
      },
      py::arg("model"), py::arg("f"), py::arg("epsilon"), py::arg("M"), py::arg("theta"),
      py::arg("min_length"), py::arg("max_radius"), py::arg("budget") = 100000000ULL,
      py::arg("shards") = 1);

  m.def(
      "linear_drift_census",
      [](const GroupModel& model, const std::string& f, int m, double theta1, double theta2,
         int epsilon, int maxRadius, std::uint64_t budget, int shards) {
        LinearDriftCensus census = linearDriftCensus(model, parseElement(model, f), m,
                                                     theta1, theta2, epsilon, maxRadius,
                                                     makeOptions(budget, shards));
        py::dict out;
        out["totals"] = census.totals;
        out["clause1"] = census.clause1;
        out["clause2"] = census.clause2;
        out["clause3"] = census.clause3;
        out["conjunction"] = census.conjunction;
        out["fractions"] = census.fractions;
        return out;
      },
      py::arg("model"), py::arg("f"), py::arg("m"), py::arg("theta1"), py::arg("theta2"),
      py::arg("epsilon"), py::arg("max_radius"), py::arg("budget") = 100000000ULL,
      py::arg("shards") = 1);

  m.def(
      "admissible_check",
      [](const GroupModel& model, const std::string& t1, const std::string& f, int m,
         const std::string& t2) {
        AdmissiblePathWitness witness = buildAdmissibleWitness(
            model, parseElement(model, t1), parseElement(model, f), m,
            parseElement(model, t2));
        AdmissibleReport report = validateAdmissible(model, witness);
        py::dict out;
        out["g"] = formatElement(model, witness.g);
        out["tau"] = witness.tau;
        out["pass"] = report.pass();
        out["conditions"] = py::make_tuple(report.cond1, report.cond2, report.cond3);
        out["length_defect"] = report.lengthDefect;
        out["first_failure"] = report.firstFailure;
        py::list mutations;
        for (AdmissibleMutation kind : {AdmissibleMutation::BumpD, AdmissibleMutation::DetourQ,
                                        AdmissibleMutation::ShiftP}) {
          try {
            AdmissiblePathWitness mutated = mutateAdmissible(model, witness, kind);
            mutations.append(validateAdmissible(model, mutated).pass());
          } catch (const std::domain_error&) {
            mutations.append(py::none());
          }
        }
        out["mutations_pass"] = mutations;
        return out;
      },
      py::arg("model"), py::arg("t1"), py::arg("f"), py::arg("m"), py::arg("t2"));

  m.def(
      "build_complex",
      [](const GroupModel& model, const std::string& f, int K, int windowRadius) {
        ProjectionComplexGraph complex =
            buildComplex(model, parseElement(model, f), K, windowRadius);
        py::dict out;
        out["vertex_count"] = complex.vertices.size();
        std::size_t edges = 0;
        for (const auto& row : complex.adjacency) edges += row.size();
        out["edge_count"] = edges / 2;
        out["adjacency"] = complex.adjacency;
        out["K"] = complex.K;
        return out;
      },
      py::arg("model"), py::arg("f"), py::arg("K"), py::arg("window_radius"));

  m.def(
      "loxodromic_test",
      [](const GroupModel& model, const std::string& f, int K, int windowRadius,
         const std::string& g, int nMax, int kPrime) {
        ProjectionComplexGraph complex =
            buildComplex(model, parseElement(model, f), K, windowRadius);
        LoxodromicProbe probe =
            loxodromicTest(model, complex, parseElement(model, g), nMax, kPrime);
        py::dict out;
        out["separations"] = probe.separations;
        out["verdict"] = probe.verdict;
        return out;
      },
      py::arg("model"), py::arg("f"), py::arg("K"), py::arg("window_radius"), py::arg("g"),
      py::arg("n_max"), py::arg("k_prime"));

  m.def(
      "kernel_bound",
      [](const GroupModel& model, const std::vector<std::string>& sample, int searchRadius) {
        std::vector<Element> parsed;
        for (const auto& g : sample) parsed.push_back(parseElement(model, g));
        KernelBoundReport report = kernelBoundProbe(model, parsed, searchRadius);
        py::dict out;
        out["max_kernel"] = report.maxKernel;
        out["witness"] = formatElement(model, report.witness);
        out["samples"] = report.samples;
        return out;
      },
      py::arg("model"), py::arg("sample"), py::arg("search_radius") = 8);

  m.def(
      "series",
      [](const GroupModel& model, const std::string& kind, int maxN) {
        return pyBigList(seriesCoefficients(model, parseSeriesKind(kind), maxN));
      },
      py::arg("model"), py::arg("kind"), py::arg("max_n"));

  m.def(
      "rationality_probe",
      [](const py::sequence& coefficients, int maxOrder) -> py::object {
        std::vector<BigInt> terms = bigFromPy(coefficients);
        std::optional<Recurrence> found = rationalityProbe(terms, maxOrder);
        py::dict out;
        out["verdict"] = formatRationalityVerdict(found, maxOrder, terms.size());
        if (!found) {
          out["order"] = py::none();
          out["coefficients"] = py::none();
          out["holds"] = py::none();
          return out;
        }
        out["order"] = found->order;
        std::vector<std::string> coeffs;
        for (const auto& c : found->coefficients) coeffs.push_back(c.str());
        out["coefficients"] = coeffs;
        out["holds"] = recurrenceHolds(terms, *found);
        return out;
      },
      py::arg("coefficients"), py::arg("max_order"));
}
