#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "catorder/fit.hpp"
#include "catorder/selection.hpp"

namespace catorder {

enum class Allocation {
  FixedProportional,  // N_i = round(N w_i), largest remainder so sum N_i = N
  RandomIID,          // (N_1..N_m) ~ Multinomial(N; w)
};

/// Generating model, design and sample size of a simulated dataset.
struct SimulationPlan {
  ModelSpec spec;
  Theta theta0;
  Permutation sigma0;
  Eigen::MatrixXd design;   // m x d
  Eigen::VectorXd weights;  // allocation weights n_i / n, normalized on use
  std::int64_t total = 0;
  Allocation allocation = Allocation::RandomIID;
  std::uint64_t seed = 0;
  std::vector<std::string> labels;
  std::vector<std::string> covariate_names;

  void validate() const;
  Eigen::VectorXd normalized_weights() const;
};

/// Largest-remainder rounding of total * weights.
std::vector<std::int64_t> proportional_allocation(const Eigen::VectorXd& weights, std::int64_t total);

/// Response probabilities per data category: column j holds pi_{i, sigma0^-1(j)}(theta0).
Eigen::MatrixXd generating_probabilities(const SimulationPlan& plan);

/// Replicate `replicate` of the plan; design points that receive no
/// observations are dropped.
Dataset simulate_dataset(const SimulationPlan& plan, std::uint64_t replicate = 0);

struct TrueOrderOutcome {
  double aic_true = 0.0;     // AIC_0
  int rank = 0;              // rank of the true order's class
  double aic_best = 0.0;     // AIC_*
  double gap = 0.0;          // AIC_0 - AIC_*
  double loglik_true_fit = 0.0;
  double loglik_best = 0.0;      // l_N(theta_hat, sigma_hat)
  double loglik_generating = 0.0;  // l_N(theta0, sigma0)
  std::int64_t observations = 0;
  Permutation best_order;
  int classes = 0;
};

/// Simulate, search every order under fit_spec, and locate the true order.
TrueOrderOutcome true_order_experiment(const SimulationPlan& plan, const ModelSpec& fit_spec,
                                       const FitConfig& config = {}, const SearchOptions& options = {},
                                       std::uint64_t replicate = 0);

struct ReplicateMatrix {
  std::vector<OrderClass> classes;  // canonical class order of fit_spec
  Eigen::MatrixXd aic;              // replicates x classes, NaN when unusable
  int true_class = 0;               // column of the generating order
};

/// B independent replicates (stream index b) of the plan, all orders fitted.
ReplicateMatrix replicate_experiment(const SimulationPlan& plan, const ModelSpec& fit_spec, int replicates,
                                     const FitConfig& config = {}, const SearchOptions& options = {});

}  // namespace catorder
