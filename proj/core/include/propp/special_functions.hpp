#pragma once

#include "propp/types.hpp"

namespace propp {

// log Gamma(x) for x > 0 via the Lanczos approximation (g = 7).
// Throws std::domain_error for x <= 0 or non-finite x.
double log_gamma(double x);

// log B(a, b) = log Gamma(a) + log Gamma(b) - log Gamma(a + b), a, b > 0.
double log_beta(double a, double b);

// Regularized incomplete beta function I_x(alpha, beta), evaluated with the
// Lentz continued fraction.  x must lie in [0, 1].
double beta_cdf(const BetaParams& p, double x);
double beta_cdf(double alpha, double beta, double x);

// Inverse of beta_cdf in its second argument, by bisection.  q must lie in
// the open interval (0, 1).
double beta_quantile(const BetaParams& p, double q);
double beta_quantile(double alpha, double beta, double q);

// Overflow-safe logistic function and its inverse.
double expit(double x);
double logit(double p);

}  // namespace propp
