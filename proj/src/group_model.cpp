#include "conjgrowth/group_model.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace conjgrowth {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

void checkModel(const GroupModel& model, const Element& g) {
  if (g.modelSig != model.signature()) {
    throw std::invalid_argument("element does not belong to this group model");
  }
}

long long mod(long long a, long long m) {
  long long r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

GroupModel GroupModel::free(int rank) {
  if (rank < 1 || rank > 26) {
    throw std::invalid_argument("free rank must be between 1 and 26");
  }
  GroupModel m;
  m.kind_ = ModelKind::Free;
  m.rank_ = rank;
  m.alphabet_ = 2 * rank;
  m.sig_ = fnv1a(&rank, sizeof(rank), 0x9e3779b97f4a7c15ULL);
  return m;
}

GroupModel GroupModel::freeProduct(std::vector<int> orders) {
  if (orders.size() < 2 || orders.size() > 8) {
    throw std::invalid_argument("free product needs between 2 and 8 factors");
  }
  for (int m : orders) {
    if (m < 2) throw std::invalid_argument("factor orders must be >= 2");
  }
  if (orders.size() == 2 && orders[0] == 2 && orders[1] == 2) {
    throw std::invalid_argument(
        "Z/2 * Z/2 is virtually cyclic and has no contracting elements");
  }
  GroupModel m;
  m.kind_ = ModelKind::FreeProduct;
  m.orders_ = std::move(orders);
  m.offsets_.resize(m.orders_.size());
  int acc = 0;
  for (std::size_t i = 0; i < m.orders_.size(); ++i) {
    m.offsets_[i] = acc;
    acc += m.orders_[i] - 1;
  }
  m.alphabet_ = acc;
  m.sig_ = fnv1a(m.orders_.data(), m.orders_.size() * sizeof(int),
                 0xc2b2ae3d27d4eb4fULL);
  return m;
}

GroupModel GroupModel::fromSpec(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("model spec must look like free:K or product:M1,M2,...");
  }
  std::string head = spec.substr(0, colon);
  std::string tail = spec.substr(colon + 1);
  if (head == "free") {
    return free(std::stoi(tail));
  }
  if (head == "product") {
    std::vector<int> orders;
    std::stringstream ss(tail);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) orders.push_back(std::stoi(part));
    }
    return freeProduct(std::move(orders));
  }
  throw std::invalid_argument("unknown model kind: " + head);
}

int GroupModel::factorCount() const {
  return kind_ == ModelKind::Free ? rank_ : static_cast<int>(orders_.size());
}

std::string GroupModel::specString() const {
  if (kind_ == ModelKind::Free) return "free:" + std::to_string(rank_);
  std::string s = "product:";
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(orders_[i]);
  }
  return s;
}

int GroupModel::factorOf(Letter x) const {
  if (!validLetter(x)) throw std::invalid_argument("invalid letter id");
  if (kind_ == ModelKind::Free) return x / 2;
  int f = static_cast<int>(orders_.size()) - 1;
  while (offsets_[f] > x) --f;
  return f;
}

int GroupModel::powerOf(Letter x) const {
  if (kind_ == ModelKind::Free) return (x % 2 == 0) ? 1 : -1;
  return x - offsets_[factorOf(x)] + 1;
}

int GroupModel::factorOrder(int factor) const {
  if (kind_ == ModelKind::Free) return 0;
  return orders_.at(factor);
}

Letter GroupModel::makeLetter(int factor, long long power) const {
  if (factor < 0 || factor >= factorCount()) {
    throw std::invalid_argument("factor index out of range");
  }
  if (kind_ == ModelKind::Free) {
    if (power == 1) return static_cast<Letter>(2 * factor);
    if (power == -1) return static_cast<Letter>(2 * factor + 1);
    throw std::invalid_argument("free-group letters carry power +1 or -1");
  }
  long long p = mod(power, orders_[factor]);
  if (p == 0) return kNoLetter;
  return static_cast<Letter>(offsets_[factor] + p - 1);
}

Letter GroupModel::inverseLetter(Letter x) const {
  if (kind_ == ModelKind::Free) return x ^ 1;
  int f = factorOf(x);
  return makeLetter(f, orders_[f] - powerOf(x));
}

bool GroupModel::sameFactor(Letter x, Letter y) const {
  return factorOf(x) == factorOf(y);
}

Letter GroupModel::mergeLetters(Letter x, Letter y) const {
  if (kind_ == ModelKind::Free) {
    throw std::logic_error("free-group letters never merge");
  }
  int f = factorOf(x);
  if (f != factorOf(y)) throw std::logic_error("merge needs letters of one factor");
  return makeLetter(f, static_cast<long long>(powerOf(x)) + powerOf(y));
}

char GroupModel::factorName(int factor) const {
  if (factor < 0 || factor >= factorCount()) {
    throw std::invalid_argument("factor index out of range");
  }
  if (kind_ == ModelKind::Free) return static_cast<char>('a' + factor);
  return static_cast<char>('s' + factor);
}

std::string GroupModel::letterToken(Letter x) const {
  int f = factorOf(x);
  std::string tok(1, factorName(f));
  if (kind_ == ModelKind::Free) {
    if (powerOf(x) < 0) tok += '\'';
  } else {
    int p = powerOf(x);
    if (p != 1) tok += "^" + std::to_string(p);
  }
  return tok;
}

std::size_t ElementHash::operator()(const Element& e) const {
  std::uint64_t h = fnv1a(e.word.data(), e.word.size() * sizeof(Letter), e.modelSig);
  return static_cast<std::size_t>(h);
}

bool shortlexLess(const Element& a, const Element& b) {
  if (a.word.size() != b.word.size()) return a.word.size() < b.word.size();
  return a.word < b.word;
}

Rational makeRational(long long num, long long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

Element identity(const GroupModel& model) {
  Element e;
  e.modelSig = model.signature();
  return e;
}

Element normalize(const GroupModel& model, const std::vector<Letter>& raw) {
  Element out = identity(model);
  out.word.reserve(raw.size());
  for (Letter next : raw) {
    if (next == kNoLetter) continue;
    if (!model.validLetter(next)) throw std::invalid_argument("invalid letter id");
    Letter x = next;
    while (true) {
      if (out.word.empty()) {
        out.word.push_back(x);
        break;
      }
      Letter y = out.word.back();
      if (model.kind() == ModelKind::Free) {
        if (y == model.inverseLetter(x)) {
          out.word.pop_back();
        } else {
          out.word.push_back(x);
        }
        break;
      }
      if (model.sameFactor(y, x)) {
        out.word.pop_back();
        Letter merged = model.mergeLetters(y, x);
        if (merged == kNoLetter) break;
        x = merged;  // re-check against the new top, which has a different factor
      } else {
        out.word.push_back(x);
        break;
      }
    }
  }
  return out;
}

Element multiply(const GroupModel& model, const Element& a, const Element& b) {
  checkModel(model, a);
  checkModel(model, b);
  std::vector<Letter> raw;
  raw.reserve(a.word.size() + b.word.size());
  raw.insert(raw.end(), a.word.begin(), a.word.end());
  raw.insert(raw.end(), b.word.begin(), b.word.end());
  return normalize(model, raw);
}

Element invert(const GroupModel& model, const Element& g) {
  checkModel(model, g);
  Element out = identity(model);
  out.word.reserve(g.word.size());
  for (auto it = g.word.rbegin(); it != g.word.rend(); ++it) {
    out.word.push_back(model.inverseLetter(*it));
  }
  return out;
}

Element power(const GroupModel& model, const Element& g, long long k) {
  checkModel(model, g);
  if (k == 0) return identity(model);
  Element base = k > 0 ? g : invert(model, g);
  long long n = k > 0 ? k : -k;
  Element acc = identity(model);
  Element sq = base;
  while (n > 0) {
    if (n & 1) acc = multiply(model, acc, sq);
    n >>= 1;
    if (n > 0) sq = multiply(model, sq, sq);
  }
  return acc;
}

Element conjugate(const GroupModel& model, const Element& t, const Element& g) {
  return multiply(model, multiply(model, t, g), invert(model, t));
}

int distance(const GroupModel& model, const Element& g, const Element& h) {
  return multiply(model, invert(model, g), h).length();
}

std::vector<Element> geodesicVertices(const GroupModel& model, const Element& g) {
  checkModel(model, g);
  std::vector<Element> verts;
  verts.reserve(g.word.size() + 1);
  Element cur = identity(model);
  verts.push_back(cur);
  for (Letter x : g.word) {
    cur.word.push_back(x);
    verts.push_back(cur);
  }
  return verts;
}

std::pair<Element, Element> cyclicReduce(const GroupModel& model, const Element& g) {
  checkModel(model, g);
  std::vector<Letter> w = g.word;
  std::vector<Letter> conj;
  while (w.size() >= 2) {
    Letter first = w.front();
    Letter last = w.back();
    if (model.kind() == ModelKind::Free) {
      if (last != model.inverseLetter(first)) break;
      conj.push_back(first);
      w.erase(w.begin());
      w.pop_back();
    } else {
      if (!model.sameFactor(first, last)) break;
      Letter merged = model.mergeLetters(last, first);
      conj.push_back(first);
      w.erase(w.begin());
      w.pop_back();
      if (merged != kNoLetter) w.push_back(merged);
    }
  }
  Element core = identity(model);
  core.word = std::move(w);
  Element conjugator = identity(model);
  conjugator.word = std::move(conj);
  return {core, conjugator};
}

bool isTorsion(const GroupModel& model, const Element& g) {
  checkModel(model, g);
  if (g.isIdentity()) return false;
  if (model.kind() == ModelKind::Free) return false;
  return cyclicReduce(model, g).first.length() <= 1;
}

long long stableLength(const GroupModel& model, const Element& g) {
  if (g.isIdentity()) return 0;
  auto [core, conj] = cyclicReduce(model, g);
  (void)conj;
  if (model.kind() == ModelKind::FreeProduct && core.length() <= 1) return 0;
  return core.length();
}

Rational stableLengthEstimate(const GroupModel& model, const Element& g, long long n) {
  checkModel(model, g);
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  auto [core, conj] = cyclicReduce(model, g);
  if (core.isIdentity()) return makeRational(0, 1);
  if (model.kind() == ModelKind::FreeProduct && core.length() == 1) {
    // Torsion: g^n = conj * x^n * conj^-1 with x in a finite factor.
    Letter x = core.word[0];
    int factor = model.factorOf(x);
    long long p = mod(static_cast<long long>(model.powerOf(x)) * n,
                      model.factorOrder(factor));
    long long len = (p == 0) ? 0 : 2LL * conj.length() + 1;
    return makeRational(len, n);
  }
  // Nontorsion: powers share the core's junction behavior, so the defect
  // |g| - tau (two conjugator arms minus at most one syllable merge) is
  // constant in n and |g^n| = n * tau + (|g| - tau).
  return makeRational(n * core.length() + (g.length() - core.length()), n);
}

std::vector<Letter> leastRotation(const std::vector<Letter>& w) {
  // Booth's least-rotation algorithm.
  const int n = static_cast<int>(w.size());
  if (n <= 1) return w;
  std::vector<int> fail(2 * n, -1);
  int k = 0;
  for (int j = 1; j < 2 * n; ++j) {
    Letter sj = w[j % n];
    int i = fail[j - k - 1];
    while (i != -1 && sj != w[(k + i + 1) % n]) {
      if (sj < w[(k + i + 1) % n]) k = j - i - 1;
      i = fail[i];
    }
    if (sj != w[(k + i + 1) % n]) {
      if (sj < w[(k + i + 1) % n]) k = j;
      fail[j - k] = -1;
    } else {
      fail[j - k] = i + 1;
    }
  }
  std::vector<Letter> out(n);
  for (int i = 0; i < n; ++i) out[i] = w[(k + i) % n];
  return out;
}

int minimalPeriod(const std::vector<Letter>& w) {
  const int n = static_cast<int>(w.size());
  if (n == 0) return 0;
  std::vector<int> pi(n, 0);
  for (int i = 1; i < n; ++i) {
    int j = pi[i - 1];
    while (j > 0 && w[i] != w[j]) j = pi[j - 1];
    if (w[i] == w[j]) ++j;
    pi[i] = j;
  }
  int p = n - pi[n - 1];
  return (n % p == 0) ? p : n;
}

ConjugacyRecord conjugacyCanonical(const GroupModel& model, const Element& g) {
  checkModel(model, g);
  ConjugacyRecord rec;
  if (g.isIdentity()) {
    rec.canonicalRep = identity(model);
    rec.root = identity(model);
    return rec;
  }
  auto [core, conj] = cyclicReduce(model, g);
  if (model.kind() == ModelKind::FreeProduct && core.length() == 1) {
    // Torsion class: cyclic factors are abelian, so the class is determined by
    // the single core letter.
    rec.canonicalRep = core;
    rec.tau = 0;
    rec.pointedLength = 1;
    rec.isPrimitive = false;
    rec.root = core;
    rec.exponent = 1;
    return rec;
  }
  std::vector<Letter> least = leastRotation(core.word);
  rec.canonicalRep = identity(model);
  rec.canonicalRep.word = least;
  rec.tau = core.length();
  rec.pointedLength = core.length();
  int p = minimalPeriod(core.word);
  long long e = core.length() / p;
  rec.exponent = e;
  rec.isPrimitive = (e == 1);
  // g = (conj * v * conj^-1)^e with v the leading period of the core. The
  // concatenation may merge one syllable at the right junction in free
  // products, so normalize rather than splicing letters directly.
  std::vector<Letter> rw;
  rw.reserve(conj.word.size() * 2 + p);
  rw.insert(rw.end(), conj.word.begin(), conj.word.end());
  rw.insert(rw.end(), core.word.begin(), core.word.begin() + p);
  for (auto it = conj.word.rbegin(); it != conj.word.rend(); ++it) {
    rw.push_back(model.inverseLetter(*it));
  }
  rec.root = normalize(model, rw);
  return rec;
}

std::pair<Element, long long> primitiveRoot(const GroupModel& model, const Element& g) {
  checkModel(model, g);
  if (g.isIdentity()) throw std::domain_error("identity has no primitive root");
  if (isTorsion(model, g)) {
    throw std::domain_error("torsion elements have no primitive root");
  }
  ConjugacyRecord rec = conjugacyCanonical(model, g);
  return {rec.root, rec.exponent};
}

bool inElementarySubgroup(const GroupModel& model, const Element& u, const Element& f) {
  auto [root, e] = primitiveRoot(model, f);
  (void)e;
  Element c = conjugate(model, u, root);
  return c == root || c == invert(model, root);
}

void forEachBallElement(const GroupModel& model, int radius,
                        const std::function<void(const Element&)>& visit) {
  Element cur = identity(model);
  visit(cur);
  if (radius <= 0) return;
  std::function<void(int)> rec = [&](int depth) {
    for (Letter x = 0; x < model.alphabetSize(); ++x) {
      if (!cur.word.empty()) {
        Letter last = cur.word.back();
        if (model.kind() == ModelKind::Free) {
          if (x == model.inverseLetter(last)) continue;
        } else {
          if (model.sameFactor(x, last)) continue;
        }
      }
      cur.word.push_back(x);
      visit(cur);
      if (depth + 1 < radius) rec(depth + 1);
      cur.word.pop_back();
    }
  };
  rec(0);
}

ElementaryGroupReport elementarySubgroup(const GroupModel& model, const Element& g,
                                         int searchRadius) {
  checkModel(model, g);
  if (g.isIdentity() || isTorsion(model, g)) {
    throw std::domain_error("elementary subgroup report needs a nontorsion element");
  }
  auto [root, e] = primitiveRoot(model, g);
  (void)e;
  Element rootInv = invert(model, root);
  ElementaryGroupReport rep;
  rep.rootGenerator = root;
  rep.searchRadius = searchRadius;
  rep.orientationIndex = 1;
  forEachBallElement(model, searchRadius, [&](const Element& h) {
    Element c = conjugate(model, h, root);
    if (c == root) {
      bool finiteOrder = h.isIdentity() || isTorsion(model, h);
      if (finiteOrder) rep.kernelElements.push_back(h);
    } else if (c == rootInv) {
      rep.orientationIndex = 2;
    }
  });
  return rep;
}

std::string formatElement(const GroupModel& model, const Element& g) {
  if (g.isIdentity()) return "e";
  std::string out;
  for (std::size_t i = 0; i < g.word.size(); ++i) {
    if (i) out += ' ';
    out += model.letterToken(g.word[i]);
  }
  return out;
}

Element parseElement(const GroupModel& model, const std::string& text) {
  std::vector<Letter> raw;
  std::stringstream ss(text);
  std::string tok;
  while (ss >> tok) {
    if (tok == "e") continue;
    char name = tok[0];
    if (!std::islower(static_cast<unsigned char>(name))) {
      throw std::invalid_argument("bad letter token: " + tok);
    }
    int factor = (model.kind() == ModelKind::Free) ? name - 'a' : name - 's';
    if (factor < 0 || factor >= model.factorCount()) {
      throw std::invalid_argument("letter out of alphabet: " + tok);
    }
    std::string rest = tok.substr(1);
    long long pow = 1;
    if (rest == "'") {
      pow = -1;
    } else if (!rest.empty() && rest[0] == '^') {
      if (model.kind() == ModelKind::Free) {
        throw std::invalid_argument("power suffix is for free-product models: " + tok);
      }
      std::size_t used = 0;
      pow = std::stoll(rest.substr(1), &used);
      if (used != rest.size() - 1) {
        throw std::invalid_argument("bad power suffix: " + tok);
      }
    } else if (!rest.empty()) {
      throw std::invalid_argument("bad letter token: " + tok);
    }
    raw.push_back(model.makeLetter(factor, pow));
  }
  return normalize(model, raw);
}

}  // namespace conjgrowth
