#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "catorder/model.hpp"

namespace catorder {

enum class Initialization {
  EmpiricalLogits,  // intercepts from pooled marginal logits, slopes 0
  Zeros,            // all zeros, intercepts j * 1e-3
};

struct FitConfig {
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;  // on max-abs score
  int max_step_halvings = 30;
  double ridge_seed = 1e-8;
  Initialization initialization = Initialization::EmpiricalLogits;
  std::optional<Theta> start;        // overrides `initialization` when set
  double separation_threshold = 10.0;
  // Diverging estimates (|theta| above the separation threshold) count as
  // converged once a step changes l_N by less than this, relative to |l_N|.
  double loglik_tolerance = 1e-10;

  void validate() const;
};

struct FitResult {
  Theta theta;
  double loglik = 0.0;  // kernel l_N at theta
  double aic = 0.0;
  double bic = 0.0;
  bool converged = false;
  int iterations = 0;
  bool feasible = true;
  bool separation_suspected = false;
  double gradient_norm = 0.0;
  int parameters = 0;
  std::string message;

  /// Usable for ranking: converged and inside the parameter space.
  bool ok() const noexcept { return converged && feasible; }
};

double aic(double loglik, int parameters);
double bic(double loglik, int parameters, double observations);

/// Starting value under `config.initialization` for the given order.
Theta initial_theta(const ModelSpec& spec, const Dataset& data, const Permutation& sigma,
                    Initialization init);

/// Gradient of l_N(., sigma) at theta.
Eigen::VectorXd score_vector(const ModelSpec& spec, const Theta& theta, const Dataset& data,
                             const Permutation& sigma);

/// Observed information, minus the Hessian of l_N(., sigma) at theta.
Eigen::MatrixXd information_matrix(const ModelSpec& spec, const Theta& theta, const Dataset& data,
                                   const Permutation& sigma);

struct NewtonStep {
  Eigen::VectorXd direction;
  double ridge = 0.0;  // 0 when the undamped system was positive definite
};

/// Solves (I + ridge * s * Id) d = score, growing the ridge from `ridge_seed`
/// (scaled by the largest diagonal entry s) until a Cholesky factor exists.
/// Throws SingularHessian after the damping retries are exhausted.
NewtonStep solve_newton(const Eigen::MatrixXd& information, const Eigen::VectorXd& score,
                        double ridge_seed);

/// Maximizes l_N(., sigma) by damped Newton with step-halving.
FitResult fit_mle(const ModelSpec& spec, const Dataset& data, const Permutation& sigma,
                  const FitConfig& config = {});

}  // namespace catorder
