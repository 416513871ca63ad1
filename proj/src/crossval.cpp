#include "catorder/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

#include "catorder/orders.hpp"
#include "catorder/parallel.hpp"
#include "catorder/rng.hpp"

namespace catorder {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::optional<FitResult> fit_for_validation(const ModelSpec& spec, const Dataset& train, const Permutation& rep,
                                            const FitConfig& config) {
  for (auto init : {config.initialization, Initialization::Zeros}) {
    FitConfig attempt = config;
    attempt.initialization = init;
    try {
      FitResult fit = fit_mle(spec, train, rep, attempt);
      if (fit.feasible) return fit;
    } catch (const Error&) {
    }
  }
  return std::nullopt;
}

}  // namespace

void CrossValPlan::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "training fraction must lie in (0, 1)");
  }
  if (repetitions < 1) throw Error(ErrorKind::InvalidArgument, "need at least one repetition");
}

std::int64_t CrossValPlan::train_size(std::int64_t observations) const {
  const auto n = static_cast<std::int64_t>(std::llround(train_fraction * static_cast<double>(observations)));
  return std::clamp<std::int64_t>(n, 1, observations - 1);
}

std::vector<Record> expand_counts(const Dataset& data) {
  std::vector<Record> out;
  out.reserve(static_cast<std::size_t>(data.total()));
  for (int i = 0; i < data.rows(); ++i) {
    for (int j = 0; j < data.categories(); ++j) {
      for (std::int64_t r = 0; r < data.counts()(i, j); ++r) out.push_back({i, j});
    }
  }
  return out;
}

std::vector<std::size_t> split_permutation(const CrossValPlan& plan, std::size_t records, int rep) {
  std::vector<std::size_t> idx(records);
  std::iota(idx.begin(), idx.end(), 0);
  auto rng = make_rng(plan.seed, Stream::CrossValidation, static_cast<std::uint64_t>(rep));
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

Eigen::MatrixXd cross_validate_orders(const Dataset& data, const ModelSpec& spec,
                                      const std::vector<Permutation>& orders, const CrossValPlan& plan,
                                      const FitConfig& config, unsigned threads) {
  plan.validate();
  check_dimensions(spec, Theta::zeros(spec), data);
  const auto records = expand_counts(data);
  if (records.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two observations");
  const auto n_train = static_cast<std::size_t>(plan.train_size(static_cast<std::int64_t>(records.size())));

  const EquivalenceClasses eq = equivalence_classes(spec);
  std::map<int, Permutation> representatives;  // class index -> representative
  for (const auto& sigma : orders) {
    const int c = eq.class_index(sigma);
    representatives.emplace(c, eq.classes[static_cast<std::size_t>(c)].representative);
  }

  Eigen::MatrixXd losses(plan.repetitions, static_cast<Eigen::Index>(orders.size()));
  parallel_for(
      static_cast<std::size_t>(plan.repetitions),
      [&](std::size_t rep) {
        const auto idx = split_permutation(plan, records.size(), static_cast<int>(rep));
        CountMatrix train_counts = CountMatrix::Zero(data.rows(), data.categories());
        for (std::size_t r = 0; r < n_train; ++r) {
          const auto& rec = records[idx[r]];
          ++train_counts(rec.design, rec.category);
        }
        const Dataset train = Dataset::dropping_empty_rows(data.x(), std::move(train_counts),
                                                           data.covariate_names(), data.category_labels());
        std::map<int, std::optional<FitResult>> fits;
        for (const auto& [c, rep_order] : representatives) fits[c] = fit_for_validation(spec, train, rep_order, config);

        for (std::size_t o = 0; o < orders.size(); ++o) {
          const Permutation& sigma = orders[o];
          const int c = eq.class_index(sigma);
          const auto& fit = fits[c];
          double loss = kMissing;
          if (fit) {
            try {
              const Theta theta = transform_theta(spec, fit->theta, representatives.at(c), sigma);
              const Eigen::MatrixXd logp =
                  log_category_probabilities(spec.family(), linear_predictors(spec, theta, data.x()));
              const Permutation inv = sigma.inverse();
              double sum = 0.0;
              for (std::size_t r = n_train; r < records.size(); ++r) {
                const auto& rec = records[idx[r]];
                sum += logp(rec.design, inv[rec.category]);
              }
              loss = -sum / static_cast<double>(records.size() - n_train);
            } catch (const Error&) {
              loss = kMissing;
            }
          }
          losses(static_cast<Eigen::Index>(rep), static_cast<Eigen::Index>(o)) = loss;
        }
      },
      threads);
  return losses;
}

std::vector<double> cross_validate(const Dataset& data, const ModelSpec& spec, const Permutation& sigma,
                                   const CrossValPlan& plan, const FitConfig& config) {
  const Eigen::MatrixXd m = cross_validate_orders(data, spec, {sigma}, plan, config);
  return std::vector<double>(m.data(), m.data() + m.rows());
}

}  // namespace catorder
