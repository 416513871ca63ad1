#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "catorder/error.hpp"
#include "catorder/permutation.hpp"

namespace catorder {

enum class Family { Baseline, Cumulative, Adjacent, Continuation };
enum class Odds { PO, NPO, PPO };

std::string_view to_string(Family family);
std::string_view to_string(Odds odds);
/// Accepts "baseline", "cumulative", "adjacent", "continuation".
Family parse_family(std::string_view text);
/// Accepts "po", "npo", "ppo".
Odds parse_odds(std::string_view text);

/// Logit family, odds structure and predictor recipe.
///
/// Every category-specific predictor is h(x) = (1, x_S) for one covariate
/// subset S shared by all J-1 logits; the proportional part is
/// h_c(x) = x_C with C the complement of S. po has S empty, npo has C empty.
class ModelSpec {
 public:
  ModelSpec(Family family, Odds odds, int categories, int covariates,
            std::vector<int> shared_covariates = {});

  static ModelSpec po(Family family, int categories, int covariates);
  static ModelSpec npo(Family family, int categories, int covariates);
  static ModelSpec ppo(Family family, int categories, int covariates,
                       std::vector<int> shared_covariates);

  /// Builds a spec from explicit per-logit covariate sets. All J-1 sets must
  /// coincide; category-dependent predictors are rejected as Unsupported.
  static ModelSpec from_predictor_sets(Family family, int categories, int covariates,
                                       const std::vector<std::vector<int>>& specific_sets,
                                       std::vector<int> shared_covariates);

  Family family() const noexcept { return family_; }
  Odds odds() const noexcept { return odds_; }
  int categories() const noexcept { return categories_; }
  int covariates() const noexcept { return covariates_; }
  int logits() const noexcept { return categories_ - 1; }

  const std::vector<int>& specific_covariates() const noexcept { return specific_; }
  const std::vector<int>& shared_covariates() const noexcept { return shared_; }

  int block_size() const noexcept { return 1 + static_cast<int>(specific_.size()); }
  int shared_size() const noexcept { return static_cast<int>(shared_.size()); }
  int parameter_count() const noexcept { return logits() * block_size() + shared_size(); }

  /// e.g. "Continuation-ratio npo".
  std::string name() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

 private:
  Family family_;
  Odds odds_;
  int categories_;
  int covariates_;
  std::vector<int> specific_;
  std::vector<int> shared_;
};

/// Stacked regression parameters (beta_1, ..., beta_{J-1}, zeta).
class Theta {
 public:
  Theta() = default;
  Theta(int blocks, int block_size, int shared_size);
  Theta(const ModelSpec& spec, Eigen::VectorXd values);

  static Theta zeros(const ModelSpec& spec);

  int blocks() const noexcept { return blocks_; }
  int block_size() const noexcept { return block_size_; }
  int shared_size() const noexcept { return shared_size_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }

  /// 0-based block index.
  auto beta(int j) { return values_.segment(j * block_size_, block_size_); }
  auto beta(int j) const { return values_.segment(j * block_size_, block_size_); }
  auto zeta() { return values_.tail(shared_size_); }
  auto zeta() const { return values_.tail(shared_size_); }

  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::VectorXd& values() noexcept { return values_; }

  bool matches(const ModelSpec& spec) const;

 private:
  int blocks_ = 0;
  int block_size_ = 0;
  int shared_size_ = 0;
  Eigen::VectorXd values_;
};

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Summarized data {(x_i, Y_i)} over distinct design points with n_i > 0.
class Dataset {
 public:
  Dataset() = default;
  /// Validates shapes, nonnegative counts, n_i > 0 and distinct rows of x.
  Dataset(Eigen::MatrixXd x, CountMatrix counts,
          std::vector<std::string> covariate_names = {},
          std::vector<std::string> category_labels = {});

  /// Same as the constructor but silently removes rows with n_i = 0.
  static Dataset dropping_empty_rows(Eigen::MatrixXd x, CountMatrix counts,
                                     std::vector<std::string> covariate_names = {},
                                     std::vector<std::string> category_labels = {});

  int rows() const noexcept { return static_cast<int>(x_.rows()); }
  int covariates() const noexcept { return static_cast<int>(x_.cols()); }
  int categories() const noexcept { return static_cast<int>(counts_.cols()); }

  const Eigen::MatrixXd& x() const noexcept { return x_; }
  const CountMatrix& counts() const noexcept { return counts_; }
  std::int64_t row_total(int i) const { return counts_.row(i).sum(); }
  std::int64_t total() const { return counts_.sum(); }

  const std::vector<std::string>& covariate_names() const noexcept { return covariate_names_; }
  const std::vector<std::string>& category_labels() const noexcept { return category_labels_; }

  /// Counts with columns rearranged into model positions: column k holds
  /// the counts of data category sigma(k).
  Eigen::MatrixXd permuted_counts(const Permutation& sigma) const;

  /// sum_i log n_i! - sum_ij log Y_ij!, the constant left out of the kernel.
  double log_multinomial_constant() const;

 private:
  Eigen::MatrixXd x_;
  CountMatrix counts_;
  std::vector<std::string> covariate_names_;
  std::vector<std::string> category_labels_;
};

/// eta_ij = h(x_i)' beta_j + h_c(x_i)' zeta, an m x (J-1) matrix.
Eigen::MatrixXd linear_predictors(const ModelSpec& spec, const Theta& theta,
                                  const Eigen::MatrixXd& x);
Eigen::MatrixXd linear_predictors(const ModelSpec& spec, const Theta& theta,
                                  const Dataset& data);

/// Model matrix X_i of one design point: eta_i = X_i theta.
Eigen::MatrixXd model_matrix(const ModelSpec& spec, const Eigen::Ref<const Eigen::RowVectorXd>& x);

/// log pi_i1..log pi_iJ for one row of linear predictors. Throws
/// InfeasibleError for a cumulative row that is not strictly increasing.
void row_log_probabilities(Family family, std::span<const double> eta, std::span<double> out,
                           int row = 0);

Eigen::MatrixXd log_category_probabilities(Family family, const Eigen::MatrixXd& eta);
Eigen::MatrixXd category_probabilities(Family family, const Eigen::MatrixXd& eta);

/// Kernel log-likelihood sum_i sum_j Y_ij log pi_{i, sigma^-1(j)}(theta),
/// without the multinomial coefficient.
double log_likelihood(const ModelSpec& spec, const Theta& theta, const Dataset& data,
                      const Permutation& sigma);

struct FeasibilityViolation {
  int row;
  int logit;  // 0-based j with eta_{i,j} >= eta_{i,j+1}
  double gap; // eta_{i,j+1} - eta_{i,j}
};

struct FeasibilityReport {
  std::vector<FeasibilityViolation> violations;
  bool feasible() const noexcept { return violations.empty(); }
};

FeasibilityReport check_cumulative_feasibility(const ModelSpec& spec, const Theta& theta,
                                               const Dataset& data);

void check_dimensions(const ModelSpec& spec, const Theta& theta, const Dataset& data);

// Numerically stable scalar helpers.
double log_sigmoid(double x);
double log_sum_exp(std::span<const double> values);

}  // namespace catorder
