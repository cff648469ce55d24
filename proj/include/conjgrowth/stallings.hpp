#pragma once

#include <cstdint>
#include <vector>

#include "conjgrowth/enumeration.hpp"
#include "conjgrowth/group_model.hpp"

namespace conjgrowth {

// Folded core graph of a finitely generated subgroup of a free group
// (Stallings automaton). State 0 is the basepoint; transitions are total
// functions state x letter -> state or -1, with the inverse-edge convention
// trans[u][x] = v iff trans[v][x^-1] = u.
class SubgroupAutomaton {
 public:
  static SubgroupAutomaton build(const GroupModel& model,
                                 const std::vector<Element>& generators);

  bool contains(const Element& h) const;
  int stateCount() const { return static_cast<int>(trans_.size()); }
  int basepoint() const { return 0; }
  const std::vector<std::vector<int>>& transitions() const { return trans_; }
  std::uint64_t modelSignature() const { return modelSig_; }

 private:
  std::vector<std::vector<int>> trans_;  // stateCount x alphabetSize
  std::uint64_t modelSig_ = 0;
  int alphabet_ = 0;
};

struct SccReport {
  GrowthFit ambient;                          // fit for #(H ball(n))
  GrowthFit escape;                           // fit for #(O ball(n))
  std::vector<std::uint64_t> subgroupSphere;  // per ambient radius 0..maxRadius
  std::vector<std::uint64_t> escapeSphere;
  std::uint64_t subgroupTotal = 0;
  std::uint64_t escapeTotal = 0;
  double exponentGap = 0.0;
  bool escapeEmpty = false;
  int M1 = 0;
  int M2 = 0;
  int maxRadius = 0;
};

// Enumerates h in H up to ambient length maxRadius via reduced loops of the
// automaton, classifies each into the statistically-convex escape set
// O_{M1,M2}, and fits growth exponents for both families. Free-group models
// only. Membership in O: some sub-geodesic [v_i, v_j] of the unique geodesic
// [o, h o] with i <= M2 and j >= L - M2 has its interior outside the closed
// M1-neighborhood of H o; for a single edge (j = i+1) this degenerates to both
// endpoints being at distance >= M1, and single points never qualify.
SccReport sccEstimate(const GroupModel& model, const std::vector<Element>& generators,
                      int M1, int M2, int maxRadius,
                      const EnumerationOptions& options = {});

}  // namespace conjgrowth
