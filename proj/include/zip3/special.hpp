#pragma once

namespace zip3::special {

// log(e^a + e^b), safe against overflow; handles -inf arguments.
double logaddexp(double a, double b);

// log(y!) via lgamma.
double log_factorial(long y);

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile (inverse CDF). Requires 0 < p < 1.
// Rational approximation (Wichura's PPND16), |error| < 1e-15 over
// (1e-15, 1 - 1e-15).
double normal_quantile(double p);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x),
// a > 0, x >= 0. Series expansion for x < a + 1, Lentz continued fraction
// otherwise; absolute accuracy better than 1e-12.
double regularized_gamma_lower(double a, double x);
double regularized_gamma_upper(double a, double x);

// Upper tail probability of the chi-square distribution with df degrees
// of freedom: Pr(X > x) = Q(df/2, x/2).
double chi_square_upper_tail(double x, int df);

}  // namespace zip3::special
