#include "catorder/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "catorder/parallel.hpp"
#include "catorder/rng.hpp"

namespace catorder {

void SimulationPlan::validate() const {
  if (!theta0.matches(spec)) throw Error(ErrorKind::DimensionMismatch, "theta0 does not match the model");
  if (sigma0.size() != spec.categories()) {
    throw Error(ErrorKind::DimensionMismatch, "true order size differs from category count");
  }
  if (design.cols() != spec.covariates()) {
    throw Error(ErrorKind::DimensionMismatch, "design has " + std::to_string(design.cols()) +
                                                  " covariates, model expects " +
                                                  std::to_string(spec.covariates()));
  }
  if (design.rows() == 0) throw Error(ErrorKind::InvalidArgument, "empty design");
  if (weights.size() != design.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "one allocation weight per design point required");
  }
  if ((weights.array() < 0.0).any() || !(weights.sum() > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "allocation weights must be nonnegative with positive sum");
  }
  if (total <= 0) throw Error(ErrorKind::InvalidArgument, "total sample size must be positive");
  if (allocation == Allocation::FixedProportional && total < design.rows()) {
    throw Error(ErrorKind::InvalidArgument, "fixed allocation needs N >= m");
  }
}

Eigen::VectorXd SimulationPlan::normalized_weights() const { return weights / weights.sum(); }

std::vector<std::int64_t> proportional_allocation(const Eigen::VectorXd& weights, std::int64_t total) {
  const Eigen::VectorXd w = weights / weights.sum();
  const auto m = static_cast<std::size_t>(w.size());
  std::vector<std::int64_t> n(m);
  std::vector<double> remainder(m);
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double exact = static_cast<double>(total) * w(static_cast<Eigen::Index>(i));
    n[i] = static_cast<std::int64_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(n[i]);
    assigned += n[i];
  }
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t r = 0; assigned < total; ++r, ++assigned) ++n[idx[r % m]];
  return n;
}

Eigen::MatrixXd generating_probabilities(const SimulationPlan& plan) {
  plan.validate();
  const Eigen::MatrixXd pi =
      category_probabilities(plan.spec.family(), linear_predictors(plan.spec, plan.theta0, plan.design));
  if (!pi.allFinite() || (pi.array() <= 0.0).any() || (pi.array() >= 1.0).any()) {
    throw Error(ErrorKind::NonFinite, "generating parameters give degenerate category probabilities");
  }
  Eigen::MatrixXd out(pi.rows(), pi.cols());
  for (int k = 0; k < plan.spec.categories(); ++k) out.col(plan.sigma0[k]) = pi.col(k);
  return out;
}

Dataset simulate_dataset(const SimulationPlan& plan, std::uint64_t replicate) {
  const Eigen::MatrixXd probs = generating_probabilities(plan);
  const auto m = static_cast<int>(plan.design.rows());
  const int J = plan.spec.categories();

  std::vector<std::int64_t> n;
  if (plan.allocation == Allocation::FixedProportional) {
    n = proportional_allocation(plan.weights, plan.total);
  } else {
    auto rng = make_rng(plan.seed, Stream::Allocation, replicate);
    const Eigen::VectorXd w = plan.normalized_weights();
    n = sample_multinomial(rng, plan.total, std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
  }

  auto rng = make_rng(plan.seed, Stream::Responses, replicate);
  CountMatrix counts(m, J);
  std::vector<double> row(static_cast<std::size_t>(J));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < J; ++j) row[static_cast<std::size_t>(j)] = probs(i, j);
    const auto y = sample_multinomial(rng, n[static_cast<std::size_t>(i)], row);
    for (int j = 0; j < J; ++j) counts(i, j) = y[static_cast<std::size_t>(j)];
  }
  return Dataset::dropping_empty_rows(plan.design, std::move(counts), plan.covariate_names, plan.labels);
}

TrueOrderOutcome true_order_experiment(const SimulationPlan& plan, const ModelSpec& fit_spec,
                                       const FitConfig& config, const SearchOptions& options,
                                       std::uint64_t replicate) {
  const Dataset data = simulate_dataset(plan, replicate);
  const OrderSearchResult search = search_orders(fit_spec, data, config, options);
  if (!search.any_usable()) {
    throw Error(ErrorKind::NonConvergence, "no order produced a usable fit");
  }
  TrueOrderOutcome out;
  const auto& truth = search.class_for(plan.sigma0);
  const auto rank = rank_of_order(search, plan.sigma0);
  out.aic_true = truth.aic();
  out.rank = rank.rank;
  out.aic_best = search.best().aic();
  out.gap = rank.aic_gap;
  out.loglik_true_fit = truth.loglik();
  out.loglik_best = search.best().loglik();
  out.loglik_generating = log_likelihood(plan.spec, plan.theta0, data, plan.sigma0);
  out.observations = data.total();
  out.best_order = search.best().order_class.representative;
  out.classes = static_cast<int>(search.classes.size());
  return out;
}

ReplicateMatrix replicate_experiment(const SimulationPlan& plan, const ModelSpec& fit_spec, int replicates,
                                     const FitConfig& config, const SearchOptions& options) {
  if (replicates < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 replicates");
  plan.validate();
  const EquivalenceClasses eq = equivalence_classes(fit_spec);
  ReplicateMatrix out;
  out.classes = eq.classes;
  out.true_class = eq.class_index(plan.sigma0);
  out.aic.setConstant(replicates, static_cast<Eigen::Index>(eq.classes.size()),
                      std::numeric_limits<double>::quiet_NaN());
  SearchOptions inner = options;
  inner.threads = 1;
  parallel_for(
      static_cast<std::size_t>(replicates),
      [&](std::size_t b) {
        const Dataset data = simulate_dataset(plan, b);
        const OrderSearchResult search = search_orders(fit_spec, data, config, inner);
        for (std::size_t c = 0; c < eq.classes.size(); ++c) {
          const auto& cls = search.class_for(eq.classes[c].representative);
          if (cls.usable()) out.aic(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)) = cls.aic();
        }
      },
      options.threads);
  return out;
}

}  // namespace catorder
