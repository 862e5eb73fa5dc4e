#include "zip3/distribution.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "zip3/special.hpp"

namespace zip3 {

using special::log_factorial;
using special::logaddexp;

void validate(const Zip3Params& params) {
  if (!(params.mu > 0.0) || !std::isfinite(params.mu))
    throw std::invalid_argument("Zip3Params: mu must be finite and > 0, got " +
                                std::to_string(params.mu));
  if (!(params.phi >= 0.0) || !std::isfinite(params.phi))
    throw std::invalid_argument("Zip3Params: phi must be finite and >= 0, got " +
                                std::to_string(params.phi));
}

void validate(const Zip1Params& params) {
  if (!(params.lambda > 0.0) || !std::isfinite(params.lambda))
    throw std::invalid_argument("Zip1Params: lambda must be finite and > 0, got " +
                                std::to_string(params.lambda));
  if (!(params.p >= 0.0 && params.p < 1.0))
    throw std::invalid_argument("Zip1Params: p must lie in [0,1), got " +
                                std::to_string(params.p));
}

void validate(const Zip2Params& params) {
  if (!(params.mu_star > 0.0) || !std::isfinite(params.mu_star))
    throw std::invalid_argument("Zip2Params: mu_star must be finite and > 0, got " +
                                std::to_string(params.mu_star));
  if (!(params.delta_star >= 0.0 && params.delta_star < 1.0))
    throw std::invalid_argument("Zip2Params: delta_star must lie in [0,1), got " +
                                std::to_string(params.delta_star));
}

Zip3Params to_zip3(const Zip1Params& params) {
  validate(params);
  return {(1.0 - params.p) * params.lambda, params.p * params.lambda};
}

Zip3Params to_zip3(const Zip2Params& params) {
  return to_zip3(to_zip1(params));
}

Zip1Params to_zip1(const Zip3Params& params) {
  validate(params);
  const double lambda = params.mu + params.phi;
  return {lambda, params.phi / lambda};
}

Zip1Params to_zip1(const Zip2Params& params) {
  validate(params);
  return {params.mu_star / (1.0 - params.delta_star), params.delta_star};
}

Zip2Params to_zip2(const Zip1Params& params) {
  validate(params);
  return {(1.0 - params.p) * params.lambda, params.p};
}

Zip2Params to_zip2(const Zip3Params& params) {
  return to_zip2(to_zip1(params));
}

double log_pmf(long y, const Zip3Params& params) {
  validate(params);
  if (y < 0) throw std::invalid_argument("log_pmf: y must be >= 0");
  const double mu = params.mu;
  const double phi = params.phi;
  const double lambda = mu + phi;
  if (y == 0)
    return logaddexp(std::log(phi), std::log(mu) - lambda) - std::log(lambda);
  return std::log(mu) + static_cast<double>(y - 1) * std::log(lambda) - lambda -
         log_factorial(y);
}

double pmf(long y, const Zip3Params& params) {
  if (y < 0) return 0.0;
  return std::exp(log_pmf(y, params));
}

double cdf(long y, const Zip3Params& params) {
  validate(params);
  if (y < 0) return 0.0;
  const double lambda = params.mu + params.phi;
  const double log_lambda = std::log(lambda);
  double total = pmf(0, params);
  // log pmf(k), k >= 1, advanced by the recurrence in log space.
  double lp = std::log(params.mu) - lambda;
  for (long k = 1; k <= y; ++k) {
    total += std::exp(lp);
    lp += log_lambda - std::log(static_cast<double>(k) + 1.0);
  }
  if (total > 1.0 || 1.0 - total < 1e-15) return 1.0;
  return total;
}

long quantile(double u, const Zip3Params& params) {
  validate(params);
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("quantile: u must lie in (0,1)");
  const double sd = std::sqrt(variance(params));
  long hi = static_cast<long>(std::ceil(params.mu + 10.0 * sd + 10.0));
  while (cdf(hi, params) < u) hi *= 2;
  long lo = -1;  // cdf(-1) = 0 < u
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (cdf(mid, params) >= u)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

long sample_one(const Zip3Params& params, Rng& rng) {
  const double lambda = params.mu + params.phi;
  const double p = params.phi / lambda;
  if (rng.uniform() < p) return 0;
  return rng.poisson(lambda);
}

std::vector<long> sample(const Zip3Params& params, long count, Rng& rng) {
  validate(params);
  if (count < 0) throw std::invalid_argument("sample: count must be >= 0");
  std::vector<long> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) out.push_back(sample_one(params, rng));
  return out;
}

double mean(const Zip3Params& params) {
  validate(params);
  return params.mu;
}

double variance(const Zip3Params& params) {
  validate(params);
  return params.mu * (1.0 + params.phi);
}

LogPmfDerivatives log_pmf_derivatives(long y, const Zip3Params& params) {
  validate(params);
  if (y < 0) throw std::invalid_argument("log_pmf_derivatives: y must be >= 0");
  if (!(params.phi > 0.0))
    throw std::domain_error("log_pmf_derivatives: phi must be > 0 strictly");

  const double mu = params.mu;
  const double phi = params.phi;
  const double lambda = mu + phi;
  const double inv_lambda = 1.0 / lambda;
  const double inv_lambda2 = inv_lambda * inv_lambda;

  LogPmfDerivatives d{};
  if (y == 0) {
    // log D with D = mu + phi*e^lambda; every ratio below is exp of a
    // log-difference so that lambda > 700 cannot overflow.
    const double log_mu = std::log(mu);
    const double log_phi = std::log(phi);
    const double log_den = logaddexp(log_mu, log_phi + lambda);

    auto over_den = [&](double log_num) { return std::exp(log_num - log_den); };
    auto over_den2 = [&](double log_num) {
      return std::exp(log_num - 2.0 * log_den);
    };
    auto signed_log = [](double v, double& sign) {
      sign = (v >= 0.0) ? 1.0 : -1.0;
      return (v == 0.0) ? -std::numeric_limits<double>::infinity()
                        : std::log(std::fabs(v));
    };

    double s1;  // sign of (1 - mu)
    const double log_abs_1mmu = signed_log(1.0 - mu, s1);
    d.d_mu = s1 * over_den(log_abs_1mmu) - inv_lambda;

    d.d_phi = over_den(lambda) - over_den(log_mu) - inv_lambda;

    double s2;  // sign of (mu - 2)
    const double log_abs_mum2 = signed_log(mu - 2.0, s2);
    d.d_mumu = s2 * over_den2(log_phi + lambda + log_abs_mum2) -
               over_den2(0.0) + inv_lambda2;

    d.d_phiphi = over_den2(lambda + std::log(mu * (phi + 2.0))) -
                 over_den2(2.0 * lambda) + inv_lambda2;

    double s3;  // sign of (mu - 1)
    const double log_abs_mum1 = signed_log(mu - 1.0, s3);
    d.d_muphi =
        s3 * over_den2(log_abs_mum1 + std::log1p(phi) + lambda) + inv_lambda2;
  } else {
    const double ym1 = static_cast<double>(y - 1);
    d.d_mu = 1.0 / mu + ym1 * inv_lambda - 1.0;
    d.d_phi = ym1 * inv_lambda - 1.0;
    d.d_mumu = -1.0 / (mu * mu) - ym1 * inv_lambda2;
    d.d_phiphi = -ym1 * inv_lambda2;
    d.d_muphi = -ym1 * inv_lambda2;
  }
  return d;
}

}  // namespace zip3
