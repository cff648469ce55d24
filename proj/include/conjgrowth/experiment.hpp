#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "conjgrowth/group_model.hpp"

namespace conjgrowth {

// Exit statuses shared by runExperiment and the command-line driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;    // unexpected internal error
inline constexpr int kExitUsage = 2;      // config rejected before enumeration
inline constexpr int kExitBudget = 3;     // enumeration budget exceeded
inline constexpr int kExitCollision = 4;  // report fragments with duplicate ids

class IdCollisionError : public std::runtime_error {
 public:
  explicit IdCollisionError(const std::string& id)
      : std::runtime_error("duplicate experiment id: " + id), id(id) {}
  std::string id;
};

// One experiment = one subcommand invocation. Every field has a usable
// default so a config can be built incrementally from flags; validation per
// kind happens inside runExperiment before any enumeration starts. The whole
// resolved struct is echoed into every output so each artifact reproduces
// itself.
struct ExperimentConfig {
  std::string kind;
  std::string id;  // output key and file stem; defaults to kind when empty
  std::string modelSpec = "free:2";
  std::string outDir = ".";

  // Enumeration scale and safety rails.
  int maxRadius = 8;
  std::uint64_t budget = 100000000ULL;
  int shards = 1;
  std::uint64_t seed = 0;

  // Ball census.
  int annulusWidth = 1;

  // Barrier and drift censuses; admissible and contraction probes.
  std::string f = "a b";
  int epsilon = 0;
  int barrierM = 0;
  double theta = 1.0;
  double theta1 = 0.5;
  double theta2 = 0.25;
  int minLength = 1;
  int m = 3;
  int trials = 100;
  int tLength = 4;

  // Projection complex. K = 0 selects the smallest threshold whose window
  // graph is connected and reports it.
  int K = 0;
  int windowRadius = 3;
  std::string g = "b a";
  int nMax = 2;
  int kPrime = 1;
  int acylD = 1;
  int acylR = 2;
  int kernelRadius = 4;
  int searchRadius = 8;

  // Series analysis.
  std::string seriesKind = "sphere";
  int maxN = 12;
  int maxOrder = 6;
  int windowLo = -1;  // negative: derived from maxN or maxRadius
  int windowHi = -1;

  // Subgroup growth comparison.
  std::string generators = "a a,b b";
  int M1 = 2;
  int M2 = 2;
};

std::string configJson(const ExperimentConfig& config);

// Runs one experiment end to end and writes <outDir>/<id>.json, plus
// <id>.csv for tabular kinds and <id>.txt for the complex adjacency graph.
// Files are written to a temporary name and renamed, so readers never see a
// partial artifact. Outputs are deterministic functions of (config, seed);
// nothing is written when the config is rejected. Returns a kExit status and
// prints the failure reason to stderr on nonzero.
int runExperiment(const ExperimentConfig& config);

// Merges single-experiment JSON fragments into one bundle keyed by id.
// Throws std::invalid_argument on unreadable or malformed fragments and
// IdCollisionError when two fragments share an id.
std::string emitReport(const std::vector<std::string>& fragmentPaths);

}  // namespace conjgrowth
