#include "conjgrowth/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace conjgrowth {

namespace {

using Matrix = std::vector<std::vector<BigInt>>;

// T[x][y] = 1 iff letter y may follow letter x in a normal form. Closed
// walks of length n are exactly the cyclically reduced words of length n.
Matrix transferMatrix(const GroupModel& model) {
  const int A = model.alphabetSize();
  Matrix T(A, std::vector<BigInt>(A, 0));
  for (Letter x = 0; x < A; ++x) {
    for (Letter y = 0; y < A; ++y) {
      bool ok = model.kind() == ModelKind::Free ? y != model.inverseLetter(x)
                                                : !model.sameFactor(x, y);
      if (ok) T[x][y] = 1;
    }
  }
  return T;
}

Matrix matMul(const Matrix& a, const Matrix& b) {
  const int n = static_cast<int>(a.size());
  Matrix out(n, std::vector<BigInt>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

// trace(T^d) for d = 1..maxN, index 0 unused.
std::vector<BigInt> tracePowers(const Matrix& T, int maxN) {
  std::vector<BigInt> tr(maxN + 1, 0);
  Matrix P = T;
  for (int d = 1; d <= maxN; ++d) {
    for (std::size_t i = 0; i < P.size(); ++i) tr[d] += P[i][i];
    if (d < maxN) P = matMul(P, T);
  }
  return tr;
}

long long eulerPhi(long long n) {
  long long r = 1, m = n;
  for (long long p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    long long pk = 1;
    while (m % p == 0) {
      m /= p;
      pk *= p;
    }
    r *= pk - pk / p;
  }
  if (m > 1) r *= m - 1;
  return r;
}

int mobius(long long n) {
  int r = 1;
  long long m = n;
  for (long long p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    m /= p;
    if (m % p == 0) return 0;
    r = -r;
  }
  if (m > 1) r = -r;
  return r;
}

// Rotation orbits of cyclically reduced words of length n (Burnside).
BigInt necklaces(const std::vector<BigInt>& tr, int n) {
  BigInt sum = 0;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) sum += eulerPhi(n / d) * tr[d];
  if (sum % n != 0) throw std::logic_error("Burnside sum not divisible");
  return sum / n;
}

// Aperiodic rotation orbits: primitive classes of stable length n.
BigInt aperiodicNecklaces(const std::vector<BigInt>& tr, int n) {
  BigInt sum = 0;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) sum += mobius(n / d) * tr[d];
  if (sum % n != 0) throw std::logic_error("Moebius sum not divisible");
  return sum / n;
}

// One consistent solution of the tail system c_n = sum q_i c_{n-i} for
// n in [r, N), free variables pinned to zero; nullopt when inconsistent.
std::optional<std::vector<BigRational>> solveTail(const std::vector<BigInt>& c, int r) {
  const int rows = static_cast<int>(c.size()) - r;
  std::vector<std::vector<BigRational>> M(
      rows, std::vector<BigRational>(static_cast<std::size_t>(r) + 1));
  for (int e = 0; e < rows; ++e) {
    const int n = r + e;
    for (int i = 1; i <= r; ++i) M[e][i - 1] = BigRational(c[n - i]);
    M[e][r] = BigRational(c[n]);
  }
  int rank = 0;
  std::vector<int> pivots;
  for (int col = 0; col < r && rank < rows; ++col) {
    int p = -1;
    for (int i = rank; i < rows; ++i) {
      if (M[i][col] != 0) {
        p = i;
        break;
      }
    }
    if (p < 0) continue;
    std::swap(M[rank], M[p]);
    for (int i = 0; i < rows; ++i) {
      if (i == rank || M[i][col] == 0) continue;
      BigRational f = M[i][col] / M[rank][col];
      for (int j = col; j <= r; ++j) M[i][j] -= f * M[rank][j];
    }
    pivots.push_back(col);
    ++rank;
  }
  for (int i = rank; i < rows; ++i) {
    if (M[i][r] != 0) return std::nullopt;
  }
  std::vector<BigRational> q(r, BigRational(0));
  for (int i = 0; i < rank; ++i) q[pivots[i]] = M[i][r] / M[i][pivots[i]];
  return q;
}

}  // namespace

const char* seriesKindName(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::Sphere: return "sphere";
    case SeriesKind::Ball: return "ball";
    case SeriesKind::ConjugacyPointed: return "conjugacy-pointed";
    case SeriesKind::ConjugacyPrimitive: return "conjugacy-primitive";
    case SeriesKind::ConjugacyStableCapped: return "conjugacy-stable-capped";
  }
  return "unknown";
}

SeriesKind parseSeriesKind(const std::string& name) {
  if (name == "sphere") return SeriesKind::Sphere;
  if (name == "ball") return SeriesKind::Ball;
  if (name == "conjugacy-pointed") return SeriesKind::ConjugacyPointed;
  if (name == "conjugacy-primitive") return SeriesKind::ConjugacyPrimitive;
  if (name == "conjugacy-stable-capped") return SeriesKind::ConjugacyStableCapped;
  throw std::invalid_argument("unknown series kind: " + name);
}

std::vector<BigInt> seriesCoefficients(const GroupModel& model, SeriesKind kind,
                                       int maxN, const EnumerationOptions& options) {
  if (maxN < 0) throw std::invalid_argument("maxN must be >= 0");
  if (model.isElementaryModel()) {
    throw std::invalid_argument("series need a nonelementary model");
  }
  BudgetCounter budget(options.budget);
  const Matrix T = transferMatrix(model);
  std::vector<BigInt> out(static_cast<std::size_t>(maxN) + 1, 0);

  if (kind == SeriesKind::Sphere || kind == SeriesKind::Ball) {
    out[0] = 1;
    std::vector<BigInt> v(T.size(), 1);  // counts by last letter
    for (int n = 1; n <= maxN; ++n) {
      budget.tick();
      BigInt total = 0;
      for (const auto& c : v) total += c;
      out[n] = total;
      if (n < maxN) {
        std::vector<BigInt> next(T.size(), 0);
        for (std::size_t x = 0; x < T.size(); ++x)
          for (std::size_t y = 0; y < T.size(); ++y)
            if (T[x][y] != 0) next[y] += v[x];
        v = std::move(next);
      }
    }
    if (kind == SeriesKind::Ball) {
      for (int n = 1; n <= maxN; ++n) out[n] += out[n - 1];
    }
    return out;
  }

  const std::vector<BigInt> tr = tracePowers(T, maxN);
  switch (kind) {
    case SeriesKind::ConjugacyPointed:
      out[0] = 1;
      for (int n = 1; n <= maxN; ++n) {
        budget.tick();
        out[n] = necklaces(tr, n);
      }
      if (model.kind() == ModelKind::FreeProduct && maxN >= 1) {
        out[1] += model.alphabetSize();  // torsion classes, one per letter
      }
      break;
    case SeriesKind::ConjugacyPrimitive:
      for (int n = 1; n <= maxN; ++n) {
        budget.tick();
        out[n] = aperiodicNecklaces(tr, n);
      }
      break;
    case SeriesKind::ConjugacyStableCapped:
      for (int n = 1; n <= maxN; ++n) {
        budget.tick();
        out[n] = necklaces(tr, n);
      }
      break;
    default:
      throw std::logic_error("unhandled series kind");
  }
  return out;
}

bool recurrenceHolds(const std::vector<BigInt>& coefficients, const Recurrence& recurrence) {
  const int r = recurrence.order;
  if (r <= 0 || static_cast<int>(recurrence.coefficients.size()) != r) return false;
  for (int n = r; n < static_cast<int>(coefficients.size()); ++n) {
    BigRational acc = 0;
    for (int i = 1; i <= r; ++i) {
      acc += recurrence.coefficients[i - 1] * BigRational(coefficients[n - i]);
    }
    if (acc != BigRational(coefficients[n])) return false;
  }
  return true;
}

std::optional<Recurrence> rationalityProbe(const std::vector<BigInt>& coefficients,
                                           int maxOrder) {
  if (maxOrder < 1) throw std::invalid_argument("maxOrder must be >= 1");
  const int N = static_cast<int>(coefficients.size());
  if (N < 2 * maxOrder + 2) {
    throw std::invalid_argument(
        "insufficient data: rationality probe needs at least 2*maxOrder + 2 terms");
  }
  for (int r = 1; r <= maxOrder; ++r) {
    if (auto q = solveTail(coefficients, r)) {
      return Recurrence{r, std::move(*q)};
    }
  }
  return std::nullopt;
}

std::string formatRationalityVerdict(const std::optional<Recurrence>& recurrence,
                                     int maxOrder, std::size_t terms) {
  std::ostringstream out;
  if (!recurrence) {
    out << "no linear recurrence of order ≤ " << maxOrder << " on " << terms
        << " terms";
    return out.str();
  }
  out << "linear recurrence of order " << recurrence->order << " on " << terms
      << " terms: c[n] =";
  for (int i = 0; i < recurrence->order; ++i) {
    out << (i == 0 ? " " : " + ") << recurrence->coefficients[i].str() << "*c[n-"
        << (i + 1) << "]";
  }
  return out.str();
}

EnvelopeStats envelopeFit(const std::vector<BigInt>& coefficients, double deltaHat,
                          int windowLo, int windowHi) {
  const int N = static_cast<int>(coefficients.size());
  if (windowLo < 0 || windowHi >= N || windowLo > windowHi) {
    throw std::invalid_argument("empty or out-of-range envelope window");
  }
  EnvelopeStats stats;
  stats.windowLo = windowLo;
  stats.windowHi = windowHi;
  for (int n = windowLo; n <= windowHi; ++n) {
    const double cn = coefficients[n].convert_to<double>();
    stats.values.push_back(n * cn * std::exp(-deltaHat * n));
  }
  stats.minValue = *std::min_element(stats.values.begin(), stats.values.end());
  stats.maxValue = *std::max_element(stats.values.begin(), stats.values.end());
  stats.ratio = stats.minValue > 0.0 ? stats.maxValue / stats.minValue
                                     : std::numeric_limits<double>::infinity();
  return stats;
}

SeriesReport buildSeriesReport(const GroupModel& model, SeriesKind kind, int maxN,
                               int maxOrder, int windowLo, int windowHi,
                               const EnumerationOptions& options) {
  SeriesReport report;
  report.kind = kind;
  report.coefficients = seriesCoefficients(model, kind, maxN, options);
  report.probedOrder = maxOrder;
  report.recurrence = rationalityProbe(report.coefficients, maxOrder);

  std::vector<double> xs, ys;
  for (int n = windowLo; n <= windowHi && n < static_cast<int>(report.coefficients.size());
       ++n) {
    if (report.coefficients[n] > 0) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log(report.coefficients[n].convert_to<double>()));
    }
  }
  if (xs.size() >= 2) {
    report.deltaHat = fitLogSlope(xs, ys).deltaHat;
  }
  report.envelope = envelopeFit(report.coefficients, report.deltaHat, windowLo, windowHi);
  return report;
}

std::string seriesReportJson(const SeriesReport& report) {
  nlohmann::json j;
  j["kind"] = seriesKindName(report.kind);
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : report.coefficients) coeffs.push_back(c.str());
  j["coefficients"] = coeffs;
  if (report.recurrence) {
    nlohmann::json rec;
    rec["order"] = report.recurrence->order;
    nlohmann::json rc = nlohmann::json::array();
    for (const auto& q : report.recurrence->coefficients) rc.push_back(q.str());
    rec["coefficients"] = rc;
    j["recurrence"] = rec;
  } else {
    j["recurrence"] = nullptr;
  }
  j["verdict"] = formatRationalityVerdict(report.recurrence, report.probedOrder,
                                          report.coefficients.size());
  j["deltaHat"] = report.deltaHat;
  j["envelope"] = {{"windowLo", report.envelope.windowLo},
                   {"windowHi", report.envelope.windowHi},
                   {"min", report.envelope.minValue},
                   {"max", report.envelope.maxValue},
                   {"ratio", report.envelope.ratio},
                   {"values", report.envelope.values}};
  return j.dump();
}

}  // namespace conjgrowth
