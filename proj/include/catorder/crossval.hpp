#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "catorder/fit.hpp"

namespace catorder {

struct CrossValPlan {
  double train_fraction = 2.0 / 3.0;
  int repetitions = 100;
  std::uint64_t seed = 0;

  void validate() const;
  /// round(fraction * N), kept within [1, N-1].
  std::int64_t train_size(std::int64_t observations) const;
};

/// One individual observation of a count table.
struct Record {
  int design = 0;
  int category = 0;
};

/// Row-major by design point, then category, then replicate index.
std::vector<Record> expand_counts(const Dataset& data);

/// Shuffled record indices of repetition `rep`; the first train_size are
/// training records. Identical for every order and model under one seed.
std::vector<std::size_t> split_permutation(const CrossValPlan& plan, std::size_t records, int rep);

/// Cross-entropy test loss per repetition (NaN when the training fit is
/// infeasible or fails).
std::vector<double> cross_validate(const Dataset& data, const ModelSpec& spec, const Permutation& sigma,
                                   const CrossValPlan& plan, const FitConfig& config = {});

/// Losses for several orders on shared splits: repetitions x orders. Each
/// equivalence class is fitted once per split and its members obtain their
/// parameters by transformation.
Eigen::MatrixXd cross_validate_orders(const Dataset& data, const ModelSpec& spec,
                                      const std::vector<Permutation>& orders, const CrossValPlan& plan,
                                      const FitConfig& config = {}, unsigned threads = 0);

}  // namespace catorder
