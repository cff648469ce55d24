#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace conjgrowth {

// Letters are small integer ids. For a free group of rank k, generator j maps to
// 2j and its inverse to 2j+1. For a free product of cyclic factors Z/m_0 * Z/m_1 * ...,
// the nontrivial powers of factor i occupy a contiguous block: power p (1 <= p < m_i)
// maps to offset_i + p - 1 where offset_i = sum_{j<i} (m_j - 1). Integer order on ids
// realizes the documented alphabet order (a < a' < b < b', s < t < t^2).
using Letter = std::int32_t;
constexpr Letter kNoLetter = -1;

enum class ModelKind { Free, FreeProduct };

class GroupModel {
 public:
  static GroupModel free(int rank);
  static GroupModel freeProduct(std::vector<int> orders);
  // Accepts "free:K" or "product:M1,M2,...".
  static GroupModel fromSpec(const std::string& spec);

  ModelKind kind() const { return kind_; }
  int rank() const { return rank_; }
  const std::vector<int>& orders() const { return orders_; }
  int factorCount() const;
  int alphabetSize() const { return alphabet_; }
  std::uint64_t signature() const { return sig_; }
  std::string specString() const;
  // free(1) has linear growth and no contracting elements; censuses reject it.
  bool isElementaryModel() const { return kind_ == ModelKind::Free && rank_ == 1; }

  int factorOf(Letter x) const;
  // Free: +1 or -1. FreeProduct: 1..order-1.
  int powerOf(Letter x) const;
  int factorOrder(int factor) const;
  // power is reduced mod the factor order; returns kNoLetter when it reduces to 0.
  Letter makeLetter(int factor, long long power) const;
  Letter inverseLetter(Letter x) const;
  bool sameFactor(Letter x, Letter y) const;
  // Product of two letters of the same factor; kNoLetter if they cancel.
  Letter mergeLetters(Letter x, Letter y) const;

  char factorName(int factor) const;
  std::string letterToken(Letter x) const;
  bool validLetter(Letter x) const { return x >= 0 && x < alphabet_; }

 private:
  GroupModel() = default;
  ModelKind kind_ = ModelKind::Free;
  int rank_ = 0;
  std::vector<int> orders_;
  std::vector<int> offsets_;
  int alphabet_ = 0;
  std::uint64_t sig_ = 0;
};

// A group element in normal form: freely reduced word (Free) or alternating
// syllable word (FreeProduct). Words compare by plain vector equality; elements
// from different models never compare equal because operations check signatures.
struct Element {
  std::uint64_t modelSig = 0;
  std::vector<Letter> word;

  int length() const { return static_cast<int>(word.size()); }
  bool isIdentity() const { return word.empty(); }
  friend bool operator==(const Element&, const Element&) = default;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const;
};

// Shortlex order on normal forms: by length, then lexicographically by letter id.
bool shortlexLess(const Element& a, const Element& b);

struct Rational {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};
Rational makeRational(long long num, long long den);

struct ConjugacyRecord {
  Element canonicalRep;   // lex-least rotation of the cyclically reduced core
  long long tau = 0;      // stable length; 0 for torsion and identity
  long long pointedLength = 0;  // min length over the class
  bool isPrimitive = false;
  Element root;           // primitive root when defined; canonicalRep otherwise
  long long exponent = 1; // g conjugate to root^exponent
};

struct ElementaryGroupReport {
  Element rootGenerator;
  std::vector<Element> kernelElements;  // finite kernel; always contains the identity
  int orientationIndex = 1;             // 2 iff some element reverses the axis direction
  int searchRadius = 0;
};

Element identity(const GroupModel& model);
Element normalize(const GroupModel& model, const std::vector<Letter>& raw);
Element multiply(const GroupModel& model, const Element& a, const Element& b);
Element invert(const GroupModel& model, const Element& g);
Element power(const GroupModel& model, const Element& g, long long k);
Element conjugate(const GroupModel& model, const Element& t, const Element& g);
int distance(const GroupModel& model, const Element& g, const Element& h);

// Vertices of the unique geodesic [o, g o]: all prefixes of the normal form,
// identity first, g last.
std::vector<Element> geodesicVertices(const GroupModel& model, const Element& g);

// g = conjugator * core * conjugator^-1 with core cyclically reduced. In free
// groups the concatenation is reduced as written; in free products the right
// junction may merge one syllable pair (never a full cancellation), so
// |g| = 2|conjugator| + |core| - (0 or 1). For nontorsion g the core length
// equals tau[g]; torsion cores have length 1 (tau = 0).
std::pair<Element, Element> cyclicReduce(const GroupModel& model, const Element& g);

bool isTorsion(const GroupModel& model, const Element& g);
long long stableLength(const GroupModel& model, const Element& g);  // tau[g]

// d(o, g^n o) / n as an exact rational; n >= 1.
Rational stableLengthEstimate(const GroupModel& model, const Element& g, long long n);

// Lex-least rotation (Booth) and minimal rotation period of a word.
std::vector<Letter> leastRotation(const std::vector<Letter>& w);
int minimalPeriod(const std::vector<Letter>& w);

ConjugacyRecord conjugacyCanonical(const GroupModel& model, const Element& g);

// Exact decomposition g = root^exponent with root primitive (not a proper power).
// Throws std::domain_error for identity and torsion inputs.
std::pair<Element, long long> primitiveRoot(const GroupModel& model, const Element& g);

// Bounded search over the ball of the given radius for elements h with
// h g h^-1 in {g, g^-1} after replacing g by its primitive root.
ElementaryGroupReport elementarySubgroup(const GroupModel& model, const Element& g,
                                         int searchRadius);

// True iff u lies in E(f): u f0 u^-1 in {f0, f0^-1} for f0 the primitive root of f.
// Exact, no radius involved.
bool inElementarySubgroup(const GroupModel& model, const Element& u, const Element& f);

std::string formatElement(const GroupModel& model, const Element& g);
Element parseElement(const GroupModel& model, const std::string& text);

// Enumerates the closed ball of the given radius in shortlex DFS order,
// calling visit once per element (identity included). Intended for small radii;
// the enumeration module provides the budgeted high-volume variant.
void forEachBallElement(const GroupModel& model, int radius,
                        const std::function<void(const Element&)>& visit);

}  // namespace conjgrowth
