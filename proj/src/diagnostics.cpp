#include "zip3/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zip3/distribution.hpp"
#include "zip3/parallel.hpp"
#include "zip3/rng.hpp"
#include "zip3/special.hpp"

namespace zip3 {

namespace {

void require_converged(const FitResult& fit, const char* op) {
  if (!fit.converged)
    throw std::invalid_argument(std::string(op) + ": fit did not converge");
}

double clamp_unit_open(double u) {
  return std::min(std::max(u, 1e-15), 1.0 - 1e-15);
}

std::vector<double> residuals_from_stream(const Eigen::VectorXi& y,
                                          const Eigen::VectorXd& mu,
                                          const Eigen::VectorXd& phi, Rng& rng,
                                          std::vector<std::string>* warnings) {
  const long n = y.size();
  std::vector<double> q(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const Zip3Params params{mu[i], phi[i]};
    const double lo = cdf(y[i] - 1, params);
    double width = cdf(y[i], params) - lo;
    if (width <= 0.0) {
      width = 1e-15;
      if (warnings)
        warnings->push_back("case " + std::to_string(i) +
                            ": pmf underflowed to 0; residual interval "
                            "clamped to width 1e-15");
    }
    const double u = clamp_unit_open(lo + rng.uniform_open() * width);
    q[static_cast<std::size_t>(i)] = special::normal_quantile(u);
  }
  return q;
}

// Linear-interpolation empirical quantile of an ascending vector.
double interp_quantile(const std::vector<double>& sorted, double prob) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = prob * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

ResidualSet quantile_residuals(const FitResult& fit, const ModelSpec& spec,
                               std::uint64_t seed) {
  require_converged(fit, "quantile_residuals");
  check_shapes(spec);
  if (fit.mu_hat.size() != spec.n())
    throw std::invalid_argument("quantile_residuals: fit does not match spec");
  ResidualSet out;
  out.seed = seed;
  Rng rng(derive_seed(seed));
  out.q = residuals_from_stream(spec.y, fit.mu_hat, fit.phi_hat, rng,
                                &out.warnings);
  return out;
}

EnvelopeBand simulated_envelope(const FitResult& fit, const ModelSpec& spec,
                                int n_sim, double coverage, std::uint64_t seed,
                                int n_threads,
                                const FitOptions& refit_options) {
  require_converged(fit, "simulated_envelope");
  if (n_sim < 1) throw std::invalid_argument("simulated_envelope: n_sim >= 1");
  if (!(coverage > 0.0 && coverage < 1.0))
    throw std::invalid_argument("simulated_envelope: coverage must lie in (0,1)");

  EnvelopeBand band;
  band.n_sim = n_sim;
  band.coverage = coverage;
  band.sorted_residuals = quantile_residuals(fit, spec, seed).q;
  std::sort(band.sorted_residuals.begin(), band.sorted_residuals.end());

  const long n = spec.n();
  // Slot per replicate keeps aggregation independent of worker count.
  std::vector<std::vector<double>> replicate(static_cast<std::size_t>(n_sim));
  std::vector<std::string> failures(static_cast<std::size_t>(n_sim));

  parallel_for(n_sim, n_threads, [&](long r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r) + 1));
    ModelSpec sim = spec;
    for (long i = 0; i < n; ++i)
      sim.y[i] = static_cast<int>(
          sample_one({fit.mu_hat[i], fit.phi_hat[i]}, rng));
    try {
      FitOptions options = refit_options;
      options.start = fit.theta_hat;
      const FitResult refit = zip3::fit(sim, options);
      if (!refit.converged) throw std::runtime_error("refit did not converge");
      std::vector<double> q = residuals_from_stream(
          sim.y, refit.mu_hat, refit.phi_hat, rng, nullptr);
      std::sort(q.begin(), q.end());
      replicate[static_cast<std::size_t>(r)] = std::move(q);
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(r)] = e.what();
    }
  });

  std::vector<const std::vector<double>*> kept;
  for (int r = 0; r < n_sim; ++r) {
    if (replicate[static_cast<std::size_t>(r)].empty()) {
      ++band.n_dropped;
      band.warnings.push_back("replicate " + std::to_string(r) +
                              " dropped: " + failures[static_cast<std::size_t>(r)]);
    } else {
      kept.push_back(&replicate[static_cast<std::size_t>(r)]);
    }
  }
  if (band.n_dropped > n_sim / 5)
    throw std::runtime_error("simulated_envelope: more than 20% of replicates failed (" +
                             std::to_string(band.n_dropped) + " of " +
                             std::to_string(n_sim) + ")");

  const double tail = 0.5 * (1.0 - coverage);
  band.lower.resize(static_cast<std::size_t>(n));
  band.median.resize(static_cast<std::size_t>(n));
  band.upper.resize(static_cast<std::size_t>(n));
  std::vector<double> column(kept.size());
  for (long i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < kept.size(); ++r)
      column[r] = (*kept[r])[static_cast<std::size_t>(i)];
    std::sort(column.begin(), column.end());
    band.lower[static_cast<std::size_t>(i)] = interp_quantile(column, tail);
    band.median[static_cast<std::size_t>(i)] = interp_quantile(column, 0.5);
    band.upper[static_cast<std::size_t>(i)] = interp_quantile(column, 1.0 - tail);
  }
  return band;
}

ModelSpec drop_cases(const ModelSpec& spec, const std::vector<long>& cases) {
  for (long c : cases)
    if (c < 0 || c >= spec.n())
      throw std::invalid_argument("drop_cases: case index " + std::to_string(c) +
                                  " out of range");
  std::vector<bool> drop(static_cast<std::size_t>(spec.n()), false);
  long n_drop = 0;
  for (long c : cases) {
    if (!drop[static_cast<std::size_t>(c)]) ++n_drop;
    drop[static_cast<std::size_t>(c)] = true;
  }
  ModelSpec out;
  out.link_mu = spec.link_mu;
  out.link_phi = spec.link_phi;
  const long m = spec.n() - n_drop;
  out.y.resize(m);
  out.X.resize(m, spec.q1());
  out.Z.resize(m, spec.q2());
  long k = 0;
  for (long i = 0; i < spec.n(); ++i) {
    if (drop[static_cast<std::size_t>(i)]) continue;
    out.y[k] = spec.y[i];
    out.X.row(k) = spec.X.row(i);
    out.Z.row(k) = spec.Z.row(i);
    ++k;
  }
  return out;
}

std::vector<double> likelihood_displacement(const FitResult& fit,
                                            const ModelSpec& spec,
                                            int n_threads,
                                            const FitOptions& refit_options,
                                            std::vector<std::string>* warnings) {
  require_converged(fit, "likelihood_displacement");
  check_shapes(spec);
  const long n = spec.n();
  if (n < spec.s() + 2)
    throw std::invalid_argument(
        "likelihood_displacement: need n >= s + 2 so every leave-one-out fit "
        "is identified");

  std::vector<double> ld(static_cast<std::size_t>(n), kMissing);
  std::vector<std::string> failures(static_cast<std::size_t>(n));

  parallel_for(n, n_threads, [&](long i) {
    try {
      const ModelSpec reduced = drop_cases(spec, {i});
      FitOptions options = refit_options;
      options.start = fit.theta_hat;
      const FitResult refit = zip3::fit(reduced, options);
      if (!refit.converged) throw std::runtime_error("refit did not converge");
      // Full-data log-likelihood drop between the two estimates.
      const double ll_at_deleted = log_likelihood(spec, refit.theta_hat);
      ld[static_cast<std::size_t>(i)] = 2.0 * (fit.loglik - ll_at_deleted);
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(i)] = e.what();
    }
  });

  if (warnings)
    for (long i = 0; i < n; ++i)
      if (!failures[static_cast<std::size_t>(i)].empty())
        warnings->push_back("case " + std::to_string(i) +
                            ": leave-one-out refit failed (" +
                            failures[static_cast<std::size_t>(i)] + ")");
  return ld;
}

RelativeChanges relative_changes(const FitResult& fit_full,
                                 const FitResult& fit_without_i) {
  require_converged(fit_full, "relative_changes");
  require_converged(fit_without_i, "relative_changes");
  if (fit_full.theta_hat.beta.size() != fit_without_i.theta_hat.beta.size() ||
      fit_full.theta_hat.gamma.size() != fit_without_i.theta_hat.gamma.size())
    throw std::invalid_argument("relative_changes: model structures differ");

  const Eigen::VectorXd full = fit_full.theta_hat.stacked();
  const Eigen::VectorXd without = fit_without_i.theta_hat.stacked();
  const long s = full.size();
  RelativeChanges out;
  out.rc.resize(s);
  out.rcse.resize(s);
  for (long j = 0; j < s; ++j) {
    out.rc[j] = (full[j] == 0.0)
                    ? kMissing
                    : std::fabs((full[j] - without[j]) / full[j]) * 100.0;
    out.rcse[j] = (fit_full.se[j] == 0.0)
                      ? kMissing
                      : std::fabs((fit_full.se[j] - fit_without_i.se[j]) /
                                  fit_full.se[j]) * 100.0;
  }
  return out;
}

}  // namespace zip3
