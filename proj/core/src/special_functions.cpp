#include "propp/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace propp {

namespace {

// Lanczos coefficients for g = 7.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

// Continued-fraction part of the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double kFpMin = 1e-300;
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;

  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;

  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double log_gamma(double x) {
  if (!std::isfinite(x) || x <= 0.0)
    throw std::domain_error("log_gamma: argument must be positive and finite");
  // Recurrence keeps the Lanczos sum well conditioned near zero.
  if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);

  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (int i = 1; i < 9; ++i) sum += kLanczos[i] / (z + i);
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(sum);
}

double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double beta_cdf(double alpha, double beta, double x) {
  BetaParams p(alpha, beta);  // validates shapes
  if (!std::isfinite(x) || x < 0.0 || x > 1.0)
    throw std::domain_error("beta_cdf: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const double log_front = alpha * std::log(x) + beta * std::log1p(-x) -
                           log_beta(alpha, beta);
  // The continued fraction converges fastest below the distribution mode;
  // use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) above it.
  if (x < (alpha + 1.0) / (alpha + beta + 2.0))
    return std::exp(log_front) * beta_cf(alpha, beta, x) / alpha;
  return 1.0 - std::exp(log_front) * beta_cf(beta, alpha, 1.0 - x) / beta;
}

double beta_cdf(const BetaParams& p, double x) {
  return beta_cdf(p.alpha, p.beta, x);
}

double beta_quantile(double alpha, double beta, double q) {
  BetaParams p(alpha, beta);
  if (!std::isfinite(q) || q <= 0.0 || q >= 1.0)
    throw std::domain_error("beta_quantile: q must lie in (0, 1)");

  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket is one ulp wide
    if (beta_cdf(alpha, beta, mid) < q)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double beta_quantile(const BetaParams& p, double q) {
  return beta_quantile(p.alpha, p.beta, q);
}

double expit(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("logit: argument must lie in (0, 1)");
  return std::log(p) - std::log1p(-p);
}

}  // namespace propp
