#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hyperconn/error.hpp"
#include "hyperconn/learn.hpp"

namespace hyperconn {

namespace {

// Continued fraction for I_x(a, b), modified Lentz evaluation.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ContractViolation("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ContractViolation("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw ContractViolation("degrees of freedom must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t > 0.0 ? 1.0 - tail : tail;
}

TTestResult two_sample_ttest(std::span<const double> a, std::span<const double> b, TTestKind kind) {
  if (a.size() < 2 || b.size() < 2) throw ContractViolation("t-test needs at least 2 values per group");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(a.begin(), a.end(), finite) || !std::all_of(b.begin(), b.end(), finite)) {
    throw ContractViolation("t-test values must be finite");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / na;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / nb;
  auto sum_sq = [](std::span<const double> v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s;
  };
  const double ssa = sum_sq(a, ma);
  const double ssb = sum_sq(b, mb);

  double se2 = 0.0;
  double df = na + nb - 2.0;
  if (kind == TTestKind::Pooled) {
    const double pooled = (ssa + ssb) / df;
    se2 = pooled * (1.0 / na + 1.0 / nb);
  } else {
    const double va = ssa / (na - 1.0) / na;
    const double vb = ssb / (nb - 1.0) / nb;
    se2 = va + vb;
    if (se2 > 0.0) {
      df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    }
  }

  const double diff = ma - mb;
  if (se2 == 0.0) {
    if (diff == 0.0) return {0.0, 1.0, df};
    return {std::copysign(std::numeric_limits<double>::infinity(), diff), 0.0, df};
  }
  const double t = diff / std::sqrt(se2);
  const double p = std::clamp(incomplete_beta(0.5 * df, 0.5, df / (df + t * t)), 0.0, 1.0);
  return {t, p, df};
}

}  // namespace hyperconn
