#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "zip3/link.hpp"

namespace zip3 {

// Double regression model: g1(mu_i) = x_i'beta, g2(phi_i) = z_i'gamma.
// X and Z carry an all-ones first column (intercepts).
struct ModelSpec {
  Eigen::VectorXi y;
  Eigen::MatrixXd X;
  Eigen::MatrixXd Z;
  LinkFunction link_mu{LinkTag::log};
  LinkFunction link_phi{LinkTag::log};

  long n() const { return y.size(); }
  long q1() const { return X.cols(); }
  long q2() const { return Z.cols(); }
  long s() const { return q1() + q2(); }
};

// Shape/positivity checks, cheap; called by every evaluation.
void check_shapes(const ModelSpec& spec);
// Full validation including column rank; called by fit().
void validate(const ModelSpec& spec);

struct Theta {
  Eigen::VectorXd beta;
  Eigen::VectorXd gamma;

  long size() const { return beta.size() + gamma.size(); }
  Eigen::VectorXd stacked() const;
  static Theta from_stacked(const Eigen::VectorXd& v, long q1);
};

// Per-observation pieces of the compact score form:
//   U_beta  = X' L_mu  [(y* - mu*) + rho .* c1]
//   U_gamma = Z' L_phi [(y* - 1)   + rho .* c2]
struct ScoreParts {
  Eigen::VectorXd d_mu, l_mu, d_phi, l_phi;
  Eigen::VectorXd c1, c2;
  Eigen::VectorXd y_star, mu_star_vec;
  Eigen::VectorXd rho;  // indicator of y == 0
};

struct FitOptions {
  int max_iter = 100;
  double tol_loglik = 1e-8;  // relative change
  double tol_score = 1e-6;   // absolute max component
  std::optional<Theta> start;
};

struct FitResult {
  Theta theta_hat;
  Eigen::VectorXd se;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  Eigen::MatrixXd observed_info;
  int iterations = 0;
  bool converged = false;
  Eigen::VectorXd mu_hat, phi_hat;
  std::vector<double> loglik_trace;
};

// Fitted (mu_i, phi_i) for the given coefficients; throws std::domain_error
// naming the first offending row when a predictor maps outside (0, inf).
void fitted_params(const ModelSpec& spec, const Theta& theta,
                   Eigen::VectorXd& mu, Eigen::VectorXd& phi);

double log_likelihood(const ModelSpec& spec, const Theta& theta);

// Score by direct chain-rule summation over observations.
Eigen::VectorXd score(const ModelSpec& spec, const Theta& theta);

// Score through the compact matrix form; agrees with score() to ~1e-12.
Eigen::VectorXd score_compact(const ModelSpec& spec, const Theta& theta);

ScoreParts score_parts(const ModelSpec& spec, const Theta& theta);

// Negative Hessian of the log-likelihood, exactly symmetric.
Eigen::MatrixXd observed_information(const ModelSpec& spec, const Theta& theta);

// Newton-Raphson with analytic observed information, step-halving line
// search, and a ridge fallback when the information is not positive
// definite at an iterate.
FitResult fit(const ModelSpec& spec, const FitOptions& options = {});

struct LrTestResult {
  double statistic;
  int df;
  double p_value;
};

// Likelihood-ratio test of a reduced model nested in a full model.
LrTestResult lr_test(const FitResult& fit_full, const FitResult& fit_reduced);

}  // namespace zip3
