#include "catorder/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Cholesky>

namespace catorder {

namespace {

struct Evaluation {
  double loglik = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd hessian;
};

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Gradient and Hessian of sum_k y_k log pi_k with respect to the J-1 linear
// predictors of one design point.
void row_derivatives(Family family, const Eigen::VectorXd& eta, const Eigen::VectorXd& logp,
                     const Eigen::RowVectorXd& y, Eigen::VectorXd& g, Eigen::MatrixXd& H) {
  const Eigen::Index L = eta.size();
  const double n = y.sum();
  g.setZero(L);
  H.setZero(L, L);
  const Eigen::VectorXd pi = logp.array().exp().matrix();
  switch (family) {
    case Family::Baseline: {
      const Eigen::VectorXd p = pi.head(L);
      g = y.head(L).transpose() - n * p;
      H = n * (p * p.transpose());
      H.diagonal() -= n * p;
      break;
    }
    case Family::Adjacent: {
      // log pi = A eta - lse(A eta) with A_{k,l} = 1{l >= k}; (A' v)_l = sum_{k<=l} v_k.
      Eigen::VectorXd c(L), cy(L);
      double acc = 0.0, accy = 0.0;
      for (Eigen::Index l = 0; l < L; ++l) {
        acc += pi(l);
        accy += y(l);
        c(l) = acc;
        cy(l) = accy;
      }
      g = cy - n * c;
      for (Eigen::Index a = 0; a < L; ++a) {
        for (Eigen::Index b = 0; b < L; ++b) {
          H(a, b) = -n * (c(std::min(a, b)) - c(a) * c(b));
        }
      }
      break;
    }
    case Family::Continuation: {
      double beyond = y.sum();  // sum_{k >= l} y_k
      for (Eigen::Index l = 0; l < L; ++l) {
        const double rho = sigmoid(eta(l));
        const double at = y(l);
        beyond -= at;  // now sum_{k > l}
        g(l) = at * (1.0 - rho) - beyond * rho;
        H(l, l) = -(at + beyond) * rho * (1.0 - rho);
      }
      break;
    }
    case Family::Cumulative: {
      Eigen::VectorXd q(L), r(L);
      for (Eigen::Index l = 0; l < L; ++l) {
        const double rho = sigmoid(eta(l));
        const double one_minus = sigmoid(-eta(l));
        q(l) = rho * one_minus;
        r(l) = q(l) * (one_minus - rho);
      }
      for (Eigen::Index k = 0; k <= L; ++k) {
        const double yk = y(k);
        if (yk == 0.0) continue;
        const double p = pi(k);
        if (k < L) {
          g(k) += yk * q(k) / p;
          H(k, k) += yk * (r(k) / p - q(k) * q(k) / (p * p));
        }
        if (k >= 1) {
          g(k - 1) -= yk * q(k - 1) / p;
          H(k - 1, k - 1) += yk * (-r(k - 1) / p - q(k - 1) * q(k - 1) / (p * p));
        }
        if (k >= 1 && k < L) {
          const double cross = yk * q(k) * q(k - 1) / (p * p);
          H(k, k - 1) += cross;
          H(k - 1, k) += cross;
        }
      }
      break;
    }
  }
}

// counts are already in model positions (Dataset::permuted_counts).
Evaluation evaluate(const ModelSpec& spec, const Theta& theta, const Dataset& data,
                    const Eigen::MatrixXd& counts, bool derivatives) {
  const Eigen::MatrixXd eta = linear_predictors(spec, theta, data);
  const int L = spec.logits();
  const int p = spec.parameter_count();
  Evaluation ev;
  if (derivatives) {
    ev.score.setZero(p);
    ev.hessian.setZero(p, p);
  }
  std::vector<double> eta_row(static_cast<std::size_t>(L));
  std::vector<double> logp_row(static_cast<std::size_t>(L + 1));
  Eigen::VectorXd g, H_unused;
  Eigen::MatrixXd H;
  for (int i = 0; i < data.rows(); ++i) {
    for (int j = 0; j < L; ++j) eta_row[static_cast<std::size_t>(j)] = eta(i, j);
    row_log_probabilities(spec.family(), eta_row, logp_row, i);
    for (int k = 0; k <= L; ++k) {
      const double y = counts(i, k);
      if (y == 0.0) continue;
      const double lp = logp_row[static_cast<std::size_t>(k)];
      if (!std::isfinite(lp)) {
        throw Error(ErrorKind::NonFinite, "zero fitted probability for an observed category at design point " +
                                              std::to_string(i + 1));
      }
      ev.loglik += y * lp;
    }
    if (!derivatives) continue;
    const Eigen::VectorXd eta_i = eta.row(i).transpose();
    const Eigen::VectorXd logp_i = Eigen::Map<const Eigen::VectorXd>(logp_row.data(), L + 1);
    row_derivatives(spec.family(), eta_i, logp_i, counts.row(i), g, H);
    const Eigen::MatrixXd X = model_matrix(spec, data.x().row(i));
    ev.score.noalias() += X.transpose() * g;
    ev.hessian.noalias() += X.transpose() * H * X;
  }
  return ev;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

void FitConfig::validate() const {
  if (max_iterations <= 0 || gradient_tolerance <= 0.0 || max_step_halvings <= 0 || ridge_seed <= 0.0 ||
      separation_threshold <= 0.0 || loglik_tolerance < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "fit configuration values must be positive");
  }
}

double aic(double loglik, int parameters) { return -2.0 * loglik + 2.0 * parameters; }

double bic(double loglik, int parameters, double observations) {
  return -2.0 * loglik + parameters * std::log(observations);
}

Theta initial_theta(const ModelSpec& spec, const Dataset& data, const Permutation& sigma,
                    Initialization init) {
  Theta theta = Theta::zeros(spec);
  const int L = spec.logits();
  if (init == Initialization::Zeros) {
    for (int j = 0; j < L; ++j) theta.beta(j)(0) = (j + 1) * 1e-3;
    return theta;
  }
  const Eigen::MatrixXd counts = data.permuted_counts(sigma);
  Eigen::VectorXd p = counts.colwise().sum().transpose().array() + 0.5;
  p /= p.sum();
  for (int j = 0; j < L; ++j) {
    double eta = 0.0;
    switch (spec.family()) {
      case Family::Baseline: eta = std::log(p(j) / p(L)); break;
      case Family::Cumulative: {
        const double below = p.head(j + 1).sum();
        eta = std::log(below / (1.0 - below));
        break;
      }
      case Family::Adjacent: eta = std::log(p(j) / p(j + 1)); break;
      case Family::Continuation: eta = std::log(p(j) / p.tail(L - j).sum()); break;
    }
    theta.beta(j)(0) = eta;
  }
  return theta;
}

Eigen::VectorXd score_vector(const ModelSpec& spec, const Theta& theta, const Dataset& data,
                             const Permutation& sigma) {
  check_dimensions(spec, theta, data);
  return evaluate(spec, theta, data, data.permuted_counts(sigma), true).score;
}

Eigen::MatrixXd information_matrix(const ModelSpec& spec, const Theta& theta, const Dataset& data,
                                   const Permutation& sigma) {
  check_dimensions(spec, theta, data);
  Eigen::MatrixXd info = -evaluate(spec, theta, data, data.permuted_counts(sigma), true).hessian;
  return 0.5 * (info + info.transpose());
}

NewtonStep solve_newton(const Eigen::MatrixXd& information, const Eigen::VectorXd& score,
                        double ridge_seed) {
  const Eigen::Index p = information.rows();
  const double scale = std::max(1.0, information.diagonal().cwiseAbs().maxCoeff());
  double ridge = 0.0;
  for (int attempt = 0; attempt < 12; ++attempt) {
    Eigen::MatrixXd damped = information;
    damped.diagonal().array() += ridge * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(damped);
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd d = llt.solve(score);
      if (d.allFinite()) return {std::move(d), ridge};
    }
    ridge = attempt == 0 ? ridge_seed : ridge * 10.0;
  }
  (void)p;
  throw Error(ErrorKind::SingularHessian, "information matrix is not positive definite after damping");
}

FitResult fit_mle(const ModelSpec& spec, const Dataset& data, const Permutation& sigma,
                  const FitConfig& config) {
  config.validate();
  if (data.rows() == 0) throw Error(ErrorKind::InvalidArgument, "empty dataset");
  check_dimensions(spec, Theta::zeros(spec), data);
  if (sigma.size() != spec.categories()) {
    throw Error(ErrorKind::DimensionMismatch, "order size differs from category count");
  }

  const Eigen::MatrixXd counts = data.permuted_counts(sigma);
  const bool cumulative = spec.family() == Family::Cumulative;

  Theta theta = config.start ? *config.start : initial_theta(spec, data, sigma, config.initialization);
  if (!theta.matches(spec)) throw Error(ErrorKind::DimensionMismatch, "start value does not match model");

  Evaluation current;
  try {
    current = evaluate(spec, theta, data, counts, true);
  } catch (const InfeasibleError&) {
    if (config.start || config.initialization == Initialization::Zeros) throw;
    theta = initial_theta(spec, data, sigma, Initialization::Zeros);
    current = evaluate(spec, theta, data, counts, true);
  }

  FitResult result;
  result.parameters = spec.parameter_count();
  bool boundary_limited = false;
  bool stalled = false;
  bool settled = false;
  double predicted_gain = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < config.max_iterations; ++it) {
    if (max_abs(current.score) <= config.gradient_tolerance) break;

    Eigen::VectorXd direction;
    try {
      direction = solve_newton(-current.hessian, current.score, config.ridge_seed).direction;
    } catch (const Error&) {
      direction = current.score / std::max(1.0, current.score.norm());
    }

    predicted_gain = 0.5 * current.score.dot(direction);
    bool accepted = false;
    bool full_step_infeasible = false;
    int infeasible_trials = 0;
    double step = 1.0;
    Theta candidate = theta;
    Evaluation trial;
    for (int h = 0; h <= config.max_step_halvings; ++h, step *= 0.5) {
      candidate.values() = theta.values() + step * direction;
      try {
        trial = evaluate(spec, candidate, data, counts, false);
      } catch (const InfeasibleError&) {
        ++infeasible_trials;
        if (h == 0) full_step_infeasible = true;
        continue;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonFinite) throw;
        continue;
      }
      if (trial.loglik >= current.loglik) {
        accepted = true;
        break;
      }
    }
    boundary_limited = cumulative && full_step_infeasible;
    if (!accepted) {
      if (cumulative && infeasible_trials == config.max_step_halvings + 1) boundary_limited = true;
      stalled = true;
      break;
    }
    if (candidate.values() == theta.values()) {
      stalled = true;
      break;
    }
    const double previous = current.loglik;
    theta = candidate;
    current = evaluate(spec, theta, data, counts, true);
    if (max_abs(theta.values()) > config.separation_threshold &&
        current.loglik - previous <= config.loglik_tolerance * (std::abs(current.loglik) + 1.0)) {
      settled = true;
      ++it;
      break;
    }
  }

  result.theta = theta;
  result.loglik = current.loglik;
  result.iterations = it;
  result.gradient_norm = max_abs(current.score);
  // A stall with a negligible predicted Newton gain is convergence to
  // rounding precision, typical for large counts.
  const bool at_rounding = stalled && !boundary_limited && predicted_gain >= 0.0 && predicted_gain <= 1e-9;
  result.converged = settled || at_rounding || result.gradient_norm <= config.gradient_tolerance;
  result.aic = aic(result.loglik, result.parameters);
  result.bic = bic(result.loglik, result.parameters, static_cast<double>(data.total()));
  result.separation_suspected = theta.size() > 0 && max_abs(theta.values()) > config.separation_threshold;

  std::ostringstream msg;
  if (settled && result.gradient_norm > config.gradient_tolerance) {
    msg << "log-likelihood settled after " << it << " iterations while estimates diverge";
  } else if (at_rounding && result.gradient_norm > config.gradient_tolerance) {
    msg << "converged to rounding precision after " << it << " iterations (predicted gain " << predicted_gain << ")";
  } else if (result.converged) {
    msg << "converged in " << it << " iterations";
  } else if (stalled) {
    msg << "stalled after " << it << " iterations (no ascent step found)";
  } else {
    msg << "iteration limit " << config.max_iterations << " reached";
  }
  if (cumulative) {
    const bool inside = check_cumulative_feasibility(spec, theta, data).feasible();
    // Unconverged with Newton steps leaving the parameter space: the
    // likelihood supremum sits on the boundary and no valid MLE exists.
    result.feasible = inside && (result.converged || !boundary_limited);
    if (!result.feasible) {
      msg << "; ascent direction leaves the cumulative parameter space "
             "(fitted probabilities would turn negative)";
    }
  }
  if (result.separation_suspected) msg << "; separation suspected";
  result.message = msg.str();
  return result;
}

}  // namespace catorder
