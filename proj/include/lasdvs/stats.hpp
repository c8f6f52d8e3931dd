#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace lasdvs::stats {

// Regularized incomplete gamma functions (series / continued fraction).
inline double gamma_p(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0) return 0.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 2000; i++) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  // Lentz continued fraction for Q, then P = 1 - Q.
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 2000; i++) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  double q = std::exp(-x + a * std::log(x) - gln) * h;
  return 1.0 - q;
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Survival function of the chi-squared distribution. Very large df falls back
// to the Wilson-Hilferty cube-root normal approximation, where the incomplete
// gamma series would need too many terms.
inline double chi2_sf(double x, double df) {
  if (x <= 0) return 1.0;
  if (df > 2000.0) {
    double c = 2.0 / (9.0 * df);
    double z = (std::cbrt(x / df) - (1.0 - c)) / std::sqrt(c);
    return normal_sf(z);
  }
  return gamma_q(df / 2.0, x / 2.0);
}

// Upper quantile: smallest x with sf(x) <= alpha.
inline double chi2_quantile_upper(double alpha, double df) {
  double lo = 0.0, hi = df + 10.0 * std::sqrt(2.0 * df) + 100.0;
  while (chi2_sf(hi, df) > alpha) hi *= 2.0;
  for (int i = 0; i < 200; i++) {
    double mid = 0.5 * (lo + hi);
    if (chi2_sf(mid, df) > alpha) lo = mid;
    else hi = mid;
  }
  return hi;
}

// Kolmogorov distribution survival function Q_KS(lambda).
inline double kolmogorov_sf(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; j++) {
    double term = 2.0 * ((j & 1) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

struct KsResult {
  double d = 0;
  double p_value = 1;
};

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) i++;
    while (j < b.size() && b[j] <= x) j++;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  double ne = na * nb / (na + nb);
  double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  return {d, kolmogorov_sf(lambda)};
}

// One-sample KS against an arbitrary CDF (evaluated at the sample points).
inline KsResult ks_one_sample(std::vector<double> sample,
                              const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = double(sample.size());
  double d = 0.0;
  for (size_t i = 0; i < sample.size(); i++) {
    double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - double(i) / n));
    d = std::max(d, std::abs(double(i + 1) / n - f));
  }
  double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  return {d, kolmogorov_sf(lambda)};
}

struct Chi2Result {
  double stat = 0;
  double df = 0;
  double p_value = 1;
};

// Pearson goodness of fit of observed counts against expected counts.
inline Chi2Result chi2_gof(const std::vector<uint64_t>& counts,
                           const std::vector<double>& expected) {
  if (counts.size() != expected.size() || counts.empty())
    throw std::invalid_argument("chi2_gof: size mismatch");
  double stat = 0.0;
  for (size_t i = 0; i < counts.size(); i++) {
    if (expected[i] <= 0) throw std::invalid_argument("chi2_gof: nonpositive expectation");
    double diff = double(counts[i]) - expected[i];
    stat += diff * diff / expected[i];
  }
  double df = double(counts.size() - 1);
  return {stat, df, chi2_sf(stat, df)};
}

inline Chi2Result chi2_uniform(const std::vector<uint64_t>& counts, uint64_t total) {
  std::vector<double> expected(counts.size(), double(total) / double(counts.size()));
  return chi2_gof(counts, expected);
}

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / double(v.size());
}

inline double variance(const std::vector<double>& v) {
  double m = mean(v), s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / double(v.size() - 1);
}

}  // namespace lasdvs::stats
