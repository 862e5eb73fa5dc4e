#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "zip3/regression.hpp"

namespace zip3 {

// Entry used where a per-case computation failed (e.g. a leave-one-out
// refit that did not converge).
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct ResidualSet {
  std::vector<double> q;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

struct EnvelopeBand {
  std::vector<double> sorted_residuals;  // observed, ascending
  std::vector<double> lower, median, upper;
  int n_sim = 0;
  double coverage = 0.0;
  int n_dropped = 0;
  std::vector<std::string> warnings;
};

struct RelativeChanges {
  Eigen::VectorXd rc;    // percent
  Eigen::VectorXd rcse;  // percent
};

// Randomized quantile residuals: q_i is the standard normal quantile of a
// uniform draw on (F(y_i - 1), F(y_i)) at the fitted parameters. The draw
// excludes the interval endpoints; a zero-width interval (pmf underflow)
// is widened to 1e-15 with a warning.
ResidualSet quantile_residuals(const FitResult& fit, const ModelSpec& spec,
                               std::uint64_t seed);

// Pointwise envelope for the sorted residuals from n_sim parametric
// resimulations of the fitted model, each refit and re-residualized on its
// own substream. Replicates whose refit fails are dropped with a warning;
// more than 20% drops is an error. Deterministic for a given seed
// regardless of n_threads.
EnvelopeBand simulated_envelope(const FitResult& fit, const ModelSpec& spec,
                                int n_sim = 100, double coverage = 0.95,
                                std::uint64_t seed = 0, int n_threads = 0,
                                const FitOptions& refit_options = {});

// Likelihood displacement per case: twice the drop in the full-data
// log-likelihood between the full-data MLE and the MLE computed without
// case i. Each of the n refits is warm-started at the full-data MLE.
// Failed refits yield kMissing with a warning appended to *warnings.
std::vector<double> likelihood_displacement(
    const FitResult& fit, const ModelSpec& spec, int n_threads = 0,
    const FitOptions& refit_options = {},
    std::vector<std::string>* warnings = nullptr);

// Case-deletion model spec: all rows except those listed (0-based).
ModelSpec drop_cases(const ModelSpec& spec, const std::vector<long>& cases);

// Percent relative change of each estimate and standard error between a
// full fit and a fit without some case(s). Entries with a zero denominator
// are kMissing.
RelativeChanges relative_changes(const FitResult& fit_full,
                                 const FitResult& fit_without_i);

}  // namespace zip3
