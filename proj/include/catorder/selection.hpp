#pragma once

#include <optional>
#include <string>
#include <vector>

#include "catorder/fit.hpp"
#include "catorder/orders.hpp"

namespace catorder {

struct ClassResult {
  OrderClass order_class;
  std::optional<FitResult> fit;      // fit of the representative
  std::vector<Theta> member_thetas;  // aligned with order_class.members
  std::string failure;               // empty when usable
  int rank = 0;

  bool usable() const noexcept { return fit && fit->ok(); }
  double loglik() const;
  double aic() const;  // +inf when unusable
  double bic() const;
};

struct SearchOptions {
  double near_tie_delta = 2.0;
  unsigned threads = 0;
};

struct OrderSearchResult {
  ModelSpec spec;
  EquivalenceRule rule = EquivalenceRule::None;
  std::vector<std::string> labels;
  std::vector<ClassResult> classes;  // ranked: ascending AIC, unusable last
  std::vector<int> class_of;         // lexicographic_rank(sigma) -> index into classes
  double near_tie_delta = 2.0;

  bool any_usable() const;
  const ClassResult& best() const { return classes.front(); }
  const ClassResult& class_for(const Permutation& sigma) const;
  /// Usable classes within near_tie_delta of the best AIC, best excluded.
  std::vector<const ClassResult*> near_ties() const;
  /// Theta for any order, exact via the class transformation.
  const Theta& theta_for(const Permutation& sigma) const;
};

/// Fits one representative per equivalence class, derives member parameters
/// by transformation and ranks classes by AIC.
OrderSearchResult search_orders(const ModelSpec& spec, const Dataset& data, const FitConfig& config = {},
                                const SearchOptions& options = {});

struct OrderRank {
  int rank = 0;
  double aic_gap = 0.0;  // AIC(sigma) - AIC(best)
};

OrderRank rank_of_order(const OrderSearchResult& result, const Permutation& sigma);

struct ModelSummary {
  ModelSpec spec;
  std::optional<OrderSearchResult> search;
  bool available = false;
  double best_aic = 0.0;
  double best_bic = 0.0;
  double best_loglik = 0.0;
  std::string best_orders;  // e.g. "(t, s, o, st) or (t, s, st, o)"
  int failed_classes = 0;
  std::string note;
};

/// Runs search_orders per model; models without any usable class are NA.
std::vector<ModelSummary> search_all_models(const Dataset& data, const std::vector<ModelSpec>& specs,
                                            const FitConfig& config = {}, const SearchOptions& options = {});

/// The eight po/npo combinations of the four logit families.
std::vector<ModelSpec> standard_models(int categories, int covariates);

/// "(t, s, o, st) or (t, s, st, o)", "All are the same", "st as the baseline".
std::string describe_best_orders(const OrderSearchResult& result);

}  // namespace catorder
