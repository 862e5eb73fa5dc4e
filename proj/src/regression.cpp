#include "zip3/regression.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "zip3/distribution.hpp"
#include "zip3/special.hpp"

namespace zip3 {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void check_shapes(const ModelSpec& spec) {
  const long n = spec.y.size();
  if (n == 0) throw std::invalid_argument("ModelSpec: empty response");
  if (spec.X.rows() != n || spec.Z.rows() != n)
    throw std::invalid_argument("ModelSpec: design row count does not match response length");
  if (spec.X.cols() < 1 || spec.Z.cols() < 1)
    throw std::invalid_argument("ModelSpec: designs need at least an intercept column");
  if (n < spec.s())
    throw std::invalid_argument("ModelSpec: need n >= q1 + q2 observations");
  for (long i = 0; i < n; ++i)
    if (spec.y[i] < 0)
      throw std::invalid_argument("ModelSpec: negative response at row " + std::to_string(i));
  if ((spec.X.col(0).array() != 1.0).any() || (spec.Z.col(0).array() != 1.0).any())
    throw std::invalid_argument("ModelSpec: first design column must be all ones");
}

void validate(const ModelSpec& spec) {
  check_shapes(spec);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_x(spec.X);
  if (qr_x.rank() < spec.X.cols())
    throw std::invalid_argument("ModelSpec: mean design matrix is rank deficient");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_z(spec.Z);
  if (qr_z.rank() < spec.Z.cols())
    throw std::invalid_argument("ModelSpec: dispersion design matrix is rank deficient");
}

Eigen::VectorXd Theta::stacked() const {
  Eigen::VectorXd v(size());
  v << beta, gamma;
  return v;
}

Theta Theta::from_stacked(const Eigen::VectorXd& v, long q1) {
  Theta t;
  t.beta = v.head(q1);
  t.gamma = v.tail(v.size() - q1);
  return t;
}

void fitted_params(const ModelSpec& spec, const Theta& theta,
                   Eigen::VectorXd& mu, Eigen::VectorXd& phi) {
  if (theta.beta.size() != spec.q1() || theta.gamma.size() != spec.q2())
    throw std::invalid_argument("theta dimension does not match model spec");
  const Eigen::VectorXd eta = spec.X * theta.beta;
  const Eigen::VectorXd sigma = spec.Z * theta.gamma;
  mu.resize(spec.n());
  phi.resize(spec.n());
  for (long i = 0; i < spec.n(); ++i) {
    mu[i] = spec.link_mu.inverse(eta[i]);
    phi[i] = spec.link_phi.inverse(sigma[i]);
    if (!(mu[i] > 0.0) || !std::isfinite(mu[i]))
      throw std::domain_error("mean predictor maps outside (0,inf) at row " +
                              std::to_string(i));
    if (!(phi[i] > 0.0) || !std::isfinite(phi[i]))
      throw std::domain_error("dispersion predictor maps outside (0,inf) at row " +
                              std::to_string(i));
  }
}

double log_likelihood(const ModelSpec& spec, const Theta& theta) {
  check_shapes(spec);
  Eigen::VectorXd mu, phi;
  fitted_params(spec, theta, mu, phi);
  double ll = 0.0;
  for (long i = 0; i < spec.n(); ++i)
    ll += log_pmf(spec.y[i], {mu[i], phi[i]});
  return ll;
}

Eigen::VectorXd score(const ModelSpec& spec, const Theta& theta) {
  check_shapes(spec);
  Eigen::VectorXd mu, phi;
  fitted_params(spec, theta, mu, phi);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(spec.s());
  for (long i = 0; i < spec.n(); ++i) {
    const LogPmfDerivatives d = log_pmf_derivatives(spec.y[i], {mu[i], phi[i]});
    const double wm = d.d_mu / spec.link_mu.deriv(mu[i]);
    const double wp = d.d_phi / spec.link_phi.deriv(phi[i]);
    u.head(spec.q1()) += wm * spec.X.row(i).transpose();
    u.tail(spec.q2()) += wp * spec.Z.row(i).transpose();
  }
  return u;
}

ScoreParts score_parts(const ModelSpec& spec, const Theta& theta) {
  check_shapes(spec);
  Eigen::VectorXd mu, phi;
  fitted_params(spec, theta, mu, phi);
  const long n = spec.n();
  ScoreParts parts;
  parts.d_mu.resize(n);
  parts.l_mu.resize(n);
  parts.d_phi.resize(n);
  parts.l_phi.resize(n);
  parts.c1.resize(n);
  parts.c2.resize(n);
  parts.y_star.resize(n);
  parts.mu_star_vec.resize(n);
  parts.rho.resize(n);
  for (long i = 0; i < n; ++i) {
    const double m = mu[i];
    const double f = phi[i];
    const double lambda = m + f;
    const double y = static_cast<double>(spec.y[i]);
    // log D, D = mu + phi*e^lambda, and the two ratios entering c1, c2.
    const double log_den = special::logaddexp(std::log(m), std::log(f) + lambda);
    const double one_minus_mu_over_den =
        (m == 1.0) ? 0.0
                   : (m < 1.0 ? 1.0 : -1.0) *
                         std::exp(std::log(std::fabs(1.0 - m)) - log_den);
    const double elam_minus_mu_over_den =
        std::exp(lambda - log_den) - std::exp(std::log(m) - log_den);

    parts.y_star[i] = (y - 1.0) / lambda;
    parts.mu_star_vec[i] = 1.0 - 1.0 / m;
    parts.c1[i] = one_minus_mu_over_den + (m - 1.0) / m - y / lambda;
    parts.c2[i] = elam_minus_mu_over_den + (lambda - y) / lambda;
    parts.rho[i] = (spec.y[i] == 0) ? 1.0 : 0.0;
    parts.l_mu[i] = 1.0 / spec.link_mu.deriv(m);
    parts.l_phi[i] = 1.0 / spec.link_phi.deriv(f);

    const LogPmfDerivatives d = log_pmf_derivatives(spec.y[i], {m, f});
    parts.d_mu[i] = d.d_mu;
    parts.d_phi[i] = d.d_phi;
  }
  return parts;
}

Eigen::VectorXd score_compact(const ModelSpec& spec, const Theta& theta) {
  const ScoreParts parts = score_parts(spec, theta);
  const Eigen::ArrayXd resid_mu =
      (parts.y_star - parts.mu_star_vec).array() +
      parts.rho.array() * parts.c1.array();
  const Eigen::ArrayXd resid_phi =
      (parts.y_star.array() - 1.0) + parts.rho.array() * parts.c2.array();
  Eigen::VectorXd u(spec.s());
  u.head(spec.q1()) =
      spec.X.transpose() * (parts.l_mu.array() * resid_mu).matrix();
  u.tail(spec.q2()) =
      spec.Z.transpose() * (parts.l_phi.array() * resid_phi).matrix();
  return u;
}

Eigen::MatrixXd observed_information(const ModelSpec& spec, const Theta& theta) {
  check_shapes(spec);
  Eigen::VectorXd mu, phi;
  fitted_params(spec, theta, mu, phi);
  const long n = spec.n();
  const long q1 = spec.q1();
  const long q2 = spec.q2();

  Eigen::VectorXd w_bb(n), w_gg(n), w_bg(n);
  for (long i = 0; i < n; ++i) {
    const LogPmfDerivatives d = log_pmf_derivatives(spec.y[i], {mu[i], phi[i]});
    const double lm = 1.0 / spec.link_mu.deriv(mu[i]);
    const double lp = 1.0 / spec.link_phi.deriv(phi[i]);
    // d^2 l / d eta^2 = l'' * l_mu^2 + l' * d(l_mu)/d eta,
    // d(l_mu)/d eta = -g1''(mu) * l_mu^3.
    w_bb[i] = d.d_mumu * lm * lm -
              d.d_mu * spec.link_mu.second_deriv(mu[i]) * lm * lm * lm;
    w_gg[i] = d.d_phiphi * lp * lp -
              d.d_phi * spec.link_phi.second_deriv(phi[i]) * lp * lp * lp;
    w_bg[i] = d.d_muphi * lm * lp;
  }

  Eigen::MatrixXd hess(q1 + q2, q1 + q2);
  hess.topLeftCorner(q1, q1) = spec.X.transpose() * w_bb.asDiagonal() * spec.X;
  hess.bottomRightCorner(q2, q2) =
      spec.Z.transpose() * w_gg.asDiagonal() * spec.Z;
  hess.topRightCorner(q1, q2) = spec.X.transpose() * w_bg.asDiagonal() * spec.Z;
  hess.bottomLeftCorner(q2, q1) = hess.topRightCorner(q1, q2).transpose();

  Eigen::MatrixXd info = -hess;
  info = 0.5 * (info + info.transpose()).eval();  // exactly symmetric
  return info;
}

namespace {

// Newton direction; adds a growing ridge when the information matrix is not
// positive definite.
Eigen::VectorXd solve_direction(const Eigen::MatrixXd& info,
                                const Eigen::VectorXd& u) {
  if (!info.allFinite())
    throw std::runtime_error("observed information has non-finite entries");
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() == Eigen::Success) return llt.solve(u);
  const Eigen::MatrixXd eye =
      Eigen::MatrixXd::Identity(info.rows(), info.cols());
  for (double tau = 1e-6; tau <= 1e12; tau *= 10.0) {
    llt.compute(info + tau * eye);
    if (llt.info() == Eigen::Success) return llt.solve(u);
  }
  throw std::runtime_error("information matrix could not be regularized");
}

Theta default_start(const ModelSpec& spec) {
  const double n = static_cast<double>(spec.n());
  const double ybar = spec.y.cast<double>().mean();
  double s2 = 0.0;
  for (long i = 0; i < spec.n(); ++i) {
    const double d = static_cast<double>(spec.y[i]) - ybar;
    s2 += d * d;
  }
  s2 = (spec.n() > 1) ? s2 / (n - 1.0) : 0.0;

  const double mu0 = std::max(ybar, 0.05);
  const double phi0 = std::max(s2 / mu0 - 1.0, 0.05);  // Var = mu*(1+phi)

  Theta t;
  t.beta = Eigen::VectorXd::Zero(spec.q1());
  t.gamma = Eigen::VectorXd::Zero(spec.q2());
  t.beta[0] = spec.link_mu.eval(mu0);
  t.gamma[0] = spec.link_phi.eval(phi0);
  return t;
}

double try_log_likelihood(const ModelSpec& spec, const Theta& theta) {
  try {
    const double ll = log_likelihood(spec, theta);
    return std::isfinite(ll) ? ll : kNegInf;
  } catch (const std::domain_error&) {
    return kNegInf;
  }
}

}  // namespace

FitResult fit(const ModelSpec& spec, const FitOptions& options) {
  validate(spec);
  if ((spec.y.array() == 0).all())
    throw std::domain_error(
        "fit: response is identically zero; the mean parameter lies on the "
        "boundary and the model is not estimable");

  Theta theta = options.start ? *options.start : default_start(spec);
  if (theta.beta.size() != spec.q1() || theta.gamma.size() != spec.q2())
    throw std::invalid_argument("fit: starting theta dimension mismatch");

  double ll = log_likelihood(spec, theta);
  FitResult result;
  result.loglik_trace.push_back(ll);

  double rel_change = 0.0;
  int steps = 0;
  bool converged = false;

  while (true) {
    const Eigen::VectorXd u = score_compact(spec, theta);
    if (u.lpNorm<Eigen::Infinity>() <= options.tol_score &&
        rel_change <= options.tol_loglik) {
      converged = true;
      break;
    }
    if (steps >= options.max_iter) break;

    Eigen::VectorXd direction;
    try {
      direction = solve_direction(observed_information(spec, theta), u);
    } catch (const std::runtime_error&) {
      break;
    }

    // Step-halving: shrink until the log-likelihood does not decrease.
    const Eigen::VectorXd base = theta.stacked();
    double step = 1.0;
    bool accepted = false;
    Theta candidate;
    double candidate_ll = kNegInf;
    for (int h = 0; h <= 30; ++h) {
      candidate = Theta::from_stacked(base + step * direction, spec.q1());
      candidate_ll = try_log_likelihood(spec, candidate);
      if (candidate_ll >= ll) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    rel_change = std::fabs(candidate_ll - ll) /
                 std::max(1.0, std::fabs(candidate_ll));
    theta = candidate;
    ll = candidate_ll;
    result.loglik_trace.push_back(ll);
    ++steps;
  }

  result.theta_hat = theta;
  result.loglik = ll;
  result.iterations = steps;
  result.converged = converged;
  fitted_params(spec, theta, result.mu_hat, result.phi_hat);
  result.observed_info = observed_information(spec, theta);

  const long s = spec.s();
  result.aic = -2.0 * ll + 2.0 * static_cast<double>(s);
  result.bic = -2.0 * ll + static_cast<double>(s) *
                               std::log(static_cast<double>(spec.n()));

  Eigen::LDLT<Eigen::MatrixXd> ldlt(result.observed_info);
  const Eigen::MatrixXd cov =
      ldlt.solve(Eigen::MatrixXd::Identity(s, s));
  result.se.resize(s);
  for (long j = 0; j < s; ++j) result.se[j] = std::sqrt(cov(j, j));
  return result;
}

LrTestResult lr_test(const FitResult& fit_full, const FitResult& fit_reduced) {
  const int df = static_cast<int>(fit_full.theta_hat.size() -
                                  fit_reduced.theta_hat.size());
  if (df <= 0)
    throw std::invalid_argument(
        "lr_test: full model must have more parameters than the reduced model");
  double statistic = 2.0 * (fit_full.loglik - fit_reduced.loglik);
  if (statistic < -1e-8)
    throw std::invalid_argument(
        "lr_test: full-model log-likelihood is below the reduced model's; "
        "models are not nested or fits did not converge");
  statistic = std::max(statistic, 0.0);
  return {statistic, df, special::chi_square_upper_tail(statistic, df)};
}

}  // namespace zip3
