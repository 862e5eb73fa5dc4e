#pragma once

#include <vector>

#include "zip3/rng.hpp"

namespace zip3 {

// Mean/dispersion parameterization: E(Y) = mu, Var(Y) = mu*(1+phi).
// phi = 0 is the exact Poisson(mu) special case.
struct Zip3Params {
  double mu;
  double phi;
};

// Original mixture parameterization: rate lambda of the count subpopulation
// and probability p of the always-zero subpopulation.
struct Zip1Params {
  double lambda;
  double p;
};

// Mean plus zero-state probability.
struct Zip2Params {
  double mu_star;
  double delta_star;
};

// First and second partials of the log-pmf in (mu, phi). The mixed partial
// is symmetric; one value is stored.
struct LogPmfDerivatives {
  double d_mu;
  double d_phi;
  double d_mumu;
  double d_phiphi;
  double d_muphi;
};

// Throw std::invalid_argument when the parameter invariants are violated.
void validate(const Zip3Params& params);
void validate(const Zip1Params& params);
void validate(const Zip2Params& params);

// Conversions between the three parameterizations. All describe the same
// distribution; round-trips reproduce the input to ~1e-16 relative error.
Zip3Params to_zip3(const Zip1Params& params);
Zip3Params to_zip3(const Zip2Params& params);
Zip1Params to_zip1(const Zip3Params& params);
Zip1Params to_zip1(const Zip2Params& params);
Zip2Params to_zip2(const Zip3Params& params);
Zip2Params to_zip2(const Zip1Params& params);

// Log probability mass at y >= 0. The y = 0 branch is evaluated as
// logaddexp(log phi, log mu - (mu+phi)) - log(mu+phi), which neither
// overflows e^(mu+phi) nor underflows e^-(mu+phi).
double log_pmf(long y, const Zip3Params& params);

double pmf(long y, const Zip3Params& params);

// Pr(Y <= y). Defined as 0 for y < 0 (the quantile-residual convention).
// Terms follow the recurrence pmf(k+1) = pmf(k)*(mu+phi)/(k+1), carried in
// log space and seeded from pmf(1) = mu*e^-(mu+phi); clamped to 1 once
// 1 - cdf < 1e-15.
double cdf(long y, const Zip3Params& params);

// Smallest y with cdf(y) >= u, 0 < u < 1. Brackets at
// mu + 10*sqrt(mu*(1+phi)) + 10 and binary-searches the cdf.
long quantile(double u, const Zip3Params& params);

// Mixture construction: with probability p = phi/(mu+phi) emit 0, else a
// Poisson(mu+phi) draw. Reproducible given the stream.
std::vector<long> sample(const Zip3Params& params, long count, Rng& rng);

// One mixture draw.
long sample_one(const Zip3Params& params, Rng& rng);

double mean(const Zip3Params& params);
double variance(const Zip3Params& params);

// All five partials of the log-pmf. Requires phi > 0 strictly: the y = 0
// expressions share the denominator mu + phi*e^(mu+phi), which is formed in
// log space as logaddexp(log mu, log phi + mu + phi) and exponentiated as
// log-differences.
LogPmfDerivatives log_pmf_derivatives(long y, const Zip3Params& params);

}  // namespace zip3
