#include "catorder/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "catorder/parallel.hpp"

namespace catorder {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fit the representative; a failed or unusable fit is retried once from the
// all-zeros start.
void fit_class(const ModelSpec& spec, const Dataset& data, const FitConfig& config, ClassResult& out) {
  const Permutation& rep = out.order_class.representative;
  std::string first_failure;
  try {
    out.fit = fit_mle(spec, data, rep, config);
    if (out.fit->ok()) return;
    first_failure = out.fit->message;
  } catch (const Error& e) {
    first_failure = e.what();
  }
  if (!config.start) {
    FitConfig retry = config;
    retry.initialization = Initialization::Zeros;
    try {
      FitResult second = fit_mle(spec, data, rep, retry);
      if (second.ok() || !out.fit) out.fit = std::move(second);
      if (out.fit->ok()) return;
    } catch (const Error& e) {
      first_failure += std::string("; retry: ") + e.what();
    }
  }
  out.failure = out.fit ? out.fit->message : first_failure;
}

}  // namespace

double ClassResult::loglik() const { return fit ? fit->loglik : -kInf; }
double ClassResult::aic() const { return usable() ? fit->aic : kInf; }
double ClassResult::bic() const { return usable() ? fit->bic : kInf; }

bool OrderSearchResult::any_usable() const {
  return std::any_of(classes.begin(), classes.end(), [](const ClassResult& c) { return c.usable(); });
}

const ClassResult& OrderSearchResult::class_for(const Permutation& sigma) const {
  return classes[static_cast<std::size_t>(class_of[static_cast<std::size_t>(lexicographic_rank(sigma))])];
}

std::vector<const ClassResult*> OrderSearchResult::near_ties() const {
  std::vector<const ClassResult*> out;
  if (classes.empty() || !classes.front().usable()) return out;
  const double best_aic = classes.front().aic();
  for (std::size_t c = 1; c < classes.size(); ++c) {
    if (classes[c].usable() && classes[c].aic() - best_aic < near_tie_delta) out.push_back(&classes[c]);
  }
  return out;
}

const Theta& OrderSearchResult::theta_for(const Permutation& sigma) const {
  const auto& cls = class_for(sigma);
  if (cls.member_thetas.empty()) {
    throw Error(ErrorKind::NonConvergence, "no fitted parameters for order " + sigma.to_string());
  }
  const auto& members = cls.order_class.members;
  const auto it = std::find(members.begin(), members.end(), sigma);
  return cls.member_thetas[static_cast<std::size_t>(it - members.begin())];
}

OrderSearchResult search_orders(const ModelSpec& spec, const Dataset& data, const FitConfig& config,
                                const SearchOptions& options) {
  if (spec.categories() > kMaxCategories) {
    throw Error(ErrorKind::JTooLarge, "order search is capped at J = " + std::to_string(kMaxCategories));
  }
  check_dimensions(spec, Theta::zeros(spec), data);
  const EquivalenceClasses eq = equivalence_classes(spec);

  OrderSearchResult result{spec, eq.rule, data.category_labels(), {}, {}, options.near_tie_delta};

  std::vector<ClassResult> classes(eq.classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) classes[c].order_class = eq.classes[c];

  parallel_for(
      classes.size(),
      [&](std::size_t c) {
        ClassResult& cls = classes[c];
        fit_class(spec, data, config, cls);
        if (!cls.fit) return;
        const auto& rep = cls.order_class.representative;
        for (const auto& member : cls.order_class.members) {
          cls.member_thetas.push_back(transform_theta(spec, cls.fit->theta, rep, member));
        }
      },
      options.threads);

  std::vector<std::size_t> order(classes.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const bool ua = classes[a].usable(), ub = classes[b].usable();
    if (ua != ub) return ua;
    if (ua && classes[a].aic() != classes[b].aic()) return classes[a].aic() < classes[b].aic();
    return classes[a].order_class.representative < classes[b].order_class.representative;
  });

  int usable = 0;
  for (const auto& c : classes) usable += c.usable();
  result.class_of.assign(eq.class_of.size(), -1);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    ClassResult cls = std::move(classes[order[pos]]);
    if (cls.usable()) {
      int smaller = 0;
      for (const auto& other : result.classes) smaller += other.aic() < cls.aic();
      cls.rank = 1 + smaller;
    } else {
      cls.rank = usable + 1;
    }
    for (std::size_t r = 0; r < eq.class_of.size(); ++r) {
      if (eq.class_of[r] == static_cast<int>(order[pos])) result.class_of[r] = static_cast<int>(pos);
    }
    result.classes.push_back(std::move(cls));
  }
  return result;
}

OrderRank rank_of_order(const OrderSearchResult& result, const Permutation& sigma) {
  const auto& cls = result.class_for(sigma);
  const double best = result.classes.front().aic();
  return {cls.rank, cls.usable() ? cls.aic() - best : kInf};
}

std::string describe_best_orders(const OrderSearchResult& result) {
  if (!result.any_usable()) return "NA";
  const auto& best = result.best();
  if (best.order_class.members.size() == enumerate_orders(result.spec.categories()).size() &&
      result.classes.size() == 1) {
    return "All are the same";
  }
  if (result.rule == EquivalenceRule::SameBaseline) {
    const int last = best.order_class.representative[result.spec.categories() - 1];
    return result.labels[static_cast<std::size_t>(last)] + " as the baseline";
  }
  std::string out;
  for (const auto& m : best.order_class.members) {
    if (!out.empty()) out += " or ";
    out += m.to_labels(result.labels);
  }
  return out;
}

std::vector<ModelSummary> search_all_models(const Dataset& data, const std::vector<ModelSpec>& specs,
                                            const FitConfig& config, const SearchOptions& options) {
  std::vector<ModelSummary> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    ModelSummary row{spec, std::nullopt, false, 0.0, 0.0, 0.0, {}, 0, {}};
    try {
      row.search = search_orders(spec, data, config, options);
    } catch (const Error& e) {
      row.note = std::string("NA: ") + e.what();
      out.push_back(std::move(row));
      continue;
    }
    const auto& search = *row.search;
    for (const auto& c : search.classes) row.failed_classes += !c.usable();
    row.available = search.any_usable();
    if (row.available) {
      row.best_aic = search.best().aic();
      row.best_bic = search.best().bic();
      row.best_loglik = search.best().loglik();
      row.best_orders = describe_best_orders(search);
      if (row.failed_classes > 0) {
        row.note = std::to_string(row.failed_classes) + " class(es) without a valid fit";
      }
    } else {
      row.best_orders = "NA";
      row.note = "NA: " + search.classes.front().failure;
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<ModelSpec> standard_models(int categories, int covariates) {
  std::vector<ModelSpec> specs;
  for (Family f : {Family::Baseline, Family::Cumulative, Family::Adjacent, Family::Continuation}) {
    specs.push_back(ModelSpec::po(f, categories, covariates));
    specs.push_back(ModelSpec::npo(f, categories, covariates));
  }
  return specs;
}

}  // namespace catorder
