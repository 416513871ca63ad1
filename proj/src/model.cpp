#include "catorder/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace catorder {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Baseline: return "baseline";
    case Family::Cumulative: return "cumulative";
    case Family::Adjacent: return "adjacent";
    case Family::Continuation: return "continuation";
  }
  return "?";
}

std::string_view to_string(Odds odds) {
  switch (odds) {
    case Odds::PO: return "po";
    case Odds::NPO: return "npo";
    case Odds::PPO: return "ppo";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  if (text == "baseline") return Family::Baseline;
  if (text == "cumulative") return Family::Cumulative;
  if (text == "adjacent") return Family::Adjacent;
  if (text == "continuation") return Family::Continuation;
  throw Error(ErrorKind::Parse, "unknown logit family '" + std::string(text) + "'");
}

Odds parse_odds(std::string_view text) {
  if (text == "po") return Odds::PO;
  if (text == "npo") return Odds::NPO;
  if (text == "ppo") return Odds::PPO;
  throw Error(ErrorKind::Parse, "unknown odds structure '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// ModelSpec

ModelSpec::ModelSpec(Family family, Odds odds, int categories, int covariates,
                     std::vector<int> shared_covariates)
    : family_(family), odds_(odds), categories_(categories), covariates_(covariates) {
  if (categories < 3) throw Error(ErrorKind::InvalidArgument, "need at least 3 response categories");
  if (covariates < 0) throw Error(ErrorKind::InvalidArgument, "negative covariate count");

  std::vector<bool> is_shared(static_cast<std::size_t>(covariates), false);
  switch (odds) {
    case Odds::PO:
      if (!shared_covariates.empty()) {
        throw Error(ErrorKind::InvalidArgument, "po models take no explicit shared covariate list");
      }
      std::fill(is_shared.begin(), is_shared.end(), true);
      break;
    case Odds::NPO:
      if (!shared_covariates.empty()) {
        throw Error(ErrorKind::InvalidArgument, "npo models have no shared covariates");
      }
      break;
    case Odds::PPO:
      for (int c : shared_covariates) {
        if (c < 0 || c >= covariates) {
          throw Error(ErrorKind::InvalidArgument, "shared covariate index out of range");
        }
        if (is_shared[static_cast<std::size_t>(c)]) {
          throw Error(ErrorKind::InvalidArgument, "duplicate shared covariate index");
        }
        is_shared[static_cast<std::size_t>(c)] = true;
      }
      break;
  }
  for (int c = 0; c < covariates; ++c) {
    (is_shared[static_cast<std::size_t>(c)] ? shared_ : specific_).push_back(c);
  }
}

ModelSpec ModelSpec::po(Family family, int categories, int covariates) {
  return ModelSpec(family, Odds::PO, categories, covariates);
}

ModelSpec ModelSpec::npo(Family family, int categories, int covariates) {
  return ModelSpec(family, Odds::NPO, categories, covariates);
}

ModelSpec ModelSpec::ppo(Family family, int categories, int covariates,
                         std::vector<int> shared_covariates) {
  return ModelSpec(family, Odds::PPO, categories, covariates, std::move(shared_covariates));
}

ModelSpec ModelSpec::from_predictor_sets(Family family, int categories, int covariates,
                                         const std::vector<std::vector<int>>& specific_sets,
                                         std::vector<int> shared_covariates) {
  if (static_cast<int>(specific_sets.size()) != categories - 1) {
    throw Error(ErrorKind::DimensionMismatch, "need one predictor set per logit (J-1)");
  }
  auto normalized = [](std::vector<int> s) {
    std::sort(s.begin(), s.end());
    return s;
  };
  const auto first = normalized(specific_sets.front());
  for (const auto& s : specific_sets) {
    if (normalized(s) != first) {
      throw Error(ErrorKind::Unsupported,
                  "category-specific predictors must be identical across logits; "
                  "logit-dependent predictor functions are not supported");
    }
  }
  std::vector<bool> used(static_cast<std::size_t>(covariates), false);
  for (int c : first) {
    if (c < 0 || c >= covariates) throw Error(ErrorKind::InvalidArgument, "covariate index out of range");
    used[static_cast<std::size_t>(c)] = true;
  }
  for (int c : shared_covariates) {
    if (c < 0 || c >= covariates) throw Error(ErrorKind::InvalidArgument, "covariate index out of range");
    if (used[static_cast<std::size_t>(c)]) {
      throw Error(ErrorKind::InvalidArgument, "covariate listed as both specific and shared");
    }
    used[static_cast<std::size_t>(c)] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw Error(ErrorKind::Unsupported, "every covariate must enter either h_j or h_c");
  }
  Odds odds = first.empty() ? Odds::PO : (shared_covariates.empty() ? Odds::NPO : Odds::PPO);
  if (odds != Odds::PPO) shared_covariates.clear();
  return ModelSpec(family, odds, categories, covariates, std::move(shared_covariates));
}

std::string ModelSpec::name() const {
  std::string out;
  switch (family_) {
    case Family::Baseline: out = "Baseline-category"; break;
    case Family::Cumulative: out = "Cumulative"; break;
    case Family::Adjacent: out = "Adjacent-categories"; break;
    case Family::Continuation: out = "Continuation-ratio"; break;
  }
  out += ' ';
  out += to_string(odds_);
  return out;
}

// ---------------------------------------------------------------------------
// Theta

Theta::Theta(int blocks, int block_size, int shared_size)
    : blocks_(blocks),
      block_size_(block_size),
      shared_size_(shared_size),
      values_(Eigen::VectorXd::Zero(blocks * block_size + shared_size)) {}

Theta::Theta(const ModelSpec& spec, Eigen::VectorXd values)
    : blocks_(spec.logits()),
      block_size_(spec.block_size()),
      shared_size_(spec.shared_size()),
      values_(std::move(values)) {
  if (values_.size() != spec.parameter_count()) {
    std::ostringstream os;
    os << "theta has " << values_.size() << " entries, model needs " << spec.parameter_count();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  if (!values_.allFinite()) throw Error(ErrorKind::NonFinite, "theta has non-finite entries");
}

Theta Theta::zeros(const ModelSpec& spec) {
  return Theta(spec.logits(), spec.block_size(), spec.shared_size());
}

bool Theta::matches(const ModelSpec& spec) const {
  return blocks_ == spec.logits() && block_size_ == spec.block_size() &&
         shared_size_ == spec.shared_size();
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(Eigen::MatrixXd x, CountMatrix counts, std::vector<std::string> covariate_names,
                 std::vector<std::string> category_labels)
    : x_(std::move(x)),
      counts_(std::move(counts)),
      covariate_names_(std::move(covariate_names)),
      category_labels_(std::move(category_labels)) {
  if (x_.rows() != counts_.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "covariate and count matrices disagree on row count");
  }
  if (counts_.cols() < 3) throw Error(ErrorKind::InvalidArgument, "need at least 3 response categories");
  if (!x_.allFinite()) throw Error(ErrorKind::NonFinite, "covariates must be finite");
  if ((counts_.array() < 0).any()) throw Error(ErrorKind::InvalidArgument, "negative count");
  for (int i = 0; i < rows(); ++i) {
    if (row_total(i) <= 0) {
      throw Error(ErrorKind::InvalidArgument, "design point " + std::to_string(i + 1) + " has no observations");
    }
    for (int k = 0; k < i; ++k) {
      if (x_.row(i) == x_.row(k)) {
        throw Error(ErrorKind::InvalidArgument, "design points " + std::to_string(k + 1) + " and " +
                                                    std::to_string(i + 1) + " coincide");
      }
    }
  }
  if (covariate_names_.empty()) {
    for (int c = 0; c < covariates(); ++c) covariate_names_.push_back("x" + std::to_string(c + 1));
  }
  if (category_labels_.empty()) {
    for (int j = 0; j < categories(); ++j) category_labels_.push_back(std::to_string(j + 1));
  }
  if (static_cast<int>(covariate_names_.size()) != covariates() ||
      static_cast<int>(category_labels_.size()) != categories()) {
    throw Error(ErrorKind::DimensionMismatch, "name lists do not match data dimensions");
  }
}

Dataset Dataset::dropping_empty_rows(Eigen::MatrixXd x, CountMatrix counts,
                                     std::vector<std::string> covariate_names,
                                     std::vector<std::string> category_labels) {
  std::vector<int> keep;
  for (int i = 0; i < counts.rows(); ++i) {
    if (counts.row(i).sum() > 0) keep.push_back(i);
  }
  Eigen::MatrixXd kx(static_cast<Eigen::Index>(keep.size()), x.cols());
  CountMatrix kc(static_cast<Eigen::Index>(keep.size()), counts.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    kx.row(static_cast<Eigen::Index>(r)) = x.row(keep[r]);
    kc.row(static_cast<Eigen::Index>(r)) = counts.row(keep[r]);
  }
  return Dataset(std::move(kx), std::move(kc), std::move(covariate_names), std::move(category_labels));
}

Eigen::MatrixXd Dataset::permuted_counts(const Permutation& sigma) const {
  if (sigma.size() != categories()) {
    throw Error(ErrorKind::DimensionMismatch, "order size differs from category count");
  }
  Eigen::MatrixXd out(rows(), categories());
  for (int k = 0; k < categories(); ++k) out.col(k) = counts_.col(sigma[k]).cast<double>();
  return out;
}

double Dataset::log_multinomial_constant() const {
  double c = 0.0;
  for (int i = 0; i < rows(); ++i) {
    c += std::lgamma(static_cast<double>(row_total(i)) + 1.0);
    for (int j = 0; j < categories(); ++j) c -= std::lgamma(static_cast<double>(counts_(i, j)) + 1.0);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Linear predictors and probabilities

double log_sigmoid(double x) {
  return x < 0.0 ? x - std::log1p(std::exp(x)) : -std::log1p(std::exp(-x));
}

double log_sum_exp(std::span<const double> values) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) top = std::max(top, v);
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (double v : values) s += std::exp(v - top);
  return top + std::log(s);
}

void check_dimensions(const ModelSpec& spec, const Theta& theta, const Dataset& data) {
  if (!theta.matches(spec)) {
    std::ostringstream os;
    os << "theta layout " << theta.blocks() << "x" << theta.block_size() << "+" << theta.shared_size()
       << " does not match model layout " << spec.logits() << "x" << spec.block_size() << "+"
       << spec.shared_size();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  if (data.covariates() != spec.covariates()) {
    throw Error(ErrorKind::DimensionMismatch, "dataset has " + std::to_string(data.covariates()) +
                                                  " covariates, model expects " +
                                                  std::to_string(spec.covariates()));
  }
  if (data.categories() != spec.categories()) {
    throw Error(ErrorKind::DimensionMismatch, "dataset has " + std::to_string(data.categories()) +
                                                  " categories, model expects " +
                                                  std::to_string(spec.categories()));
  }
}

Eigen::MatrixXd linear_predictors(const ModelSpec& spec, const Theta& theta, const Eigen::MatrixXd& x) {
  if (!theta.matches(spec)) {
    throw Error(ErrorKind::DimensionMismatch, "theta block layout does not match model");
  }
  if (x.cols() != spec.covariates()) {
    throw Error(ErrorKind::DimensionMismatch, "covariate block has " + std::to_string(x.cols()) +
                                                  " columns, model expects " +
                                                  std::to_string(spec.covariates()));
  }
  const auto& specific = spec.specific_covariates();
  const auto& shared = spec.shared_covariates();
  Eigen::MatrixXd eta(x.rows(), spec.logits());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double common = 0.0;
    for (std::size_t c = 0; c < shared.size(); ++c) {
      common += x(i, shared[c]) * theta.zeta()(static_cast<Eigen::Index>(c));
    }
    for (int j = 0; j < spec.logits(); ++j) {
      auto beta = theta.beta(j);
      double v = beta(0);
      for (std::size_t s = 0; s < specific.size(); ++s) {
        v += x(i, specific[s]) * beta(static_cast<Eigen::Index>(s + 1));
      }
      eta(i, j) = v + common;
    }
  }
  return eta;
}

Eigen::MatrixXd linear_predictors(const ModelSpec& spec, const Theta& theta, const Dataset& data) {
  check_dimensions(spec, theta, data);
  return linear_predictors(spec, theta, data.x());
}

Eigen::MatrixXd model_matrix(const ModelSpec& spec, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  const int q = spec.block_size();
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(spec.logits(), spec.parameter_count());
  const auto& specific = spec.specific_covariates();
  const auto& shared = spec.shared_covariates();
  for (int j = 0; j < spec.logits(); ++j) {
    X(j, j * q) = 1.0;
    for (std::size_t s = 0; s < specific.size(); ++s) {
      X(j, j * q + 1 + static_cast<int>(s)) = x(specific[s]);
    }
    for (std::size_t c = 0; c < shared.size(); ++c) {
      X(j, spec.logits() * q + static_cast<int>(c)) = x(shared[c]);
    }
  }
  return X;
}

void row_log_probabilities(Family family, std::span<const double> eta, std::span<double> out, int row) {
  const std::size_t L = eta.size();  // J - 1
  switch (family) {
    case Family::Baseline: {
      double top = 0.0;
      for (double e : eta) top = std::max(top, e);
      double s = std::exp(-top);
      for (double e : eta) s += std::exp(e - top);
      const double lse = top + std::log(s);
      for (std::size_t j = 0; j < L; ++j) out[j] = eta[j] - lse;
      out[L] = -lse;
      break;
    }
    case Family::Cumulative: {
      for (std::size_t j = 1; j < L; ++j) {
        if (!(eta[j] > eta[j - 1])) {
          std::ostringstream os;
          os << "cumulative predictors not increasing at design point " << row + 1 << ", logit " << j;
          throw InfeasibleError(row, static_cast<int>(j) - 1, os.str());
        }
      }
      out[0] = log_sigmoid(eta[0]);
      for (std::size_t j = 1; j < L; ++j) {
        // rho_j - rho_{j-1} = rho_j (1 - rho_{j-1}) (1 - exp(eta_{j-1} - eta_j))
        out[j] = log_sigmoid(eta[j]) + log_sigmoid(-eta[j - 1]) + std::log(-std::expm1(eta[j - 1] - eta[j]));
      }
      out[L] = log_sigmoid(-eta[L - 1]);
      break;
    }
    case Family::Adjacent: {
      // pi_j proportional to exp(sum_{l >= j} eta_l), pi_J to 1.
      double tail = 0.0;
      out[L] = 0.0;
      for (std::size_t j = L; j-- > 0;) {
        tail += eta[j];
        out[j] = tail;
      }
      const double lse = log_sum_exp(std::span<const double>(out.data(), L + 1));
      for (std::size_t j = 0; j <= L; ++j) out[j] -= lse;
      break;
    }
    case Family::Continuation: {
      double survive = 0.0;  // log prod_{l<j} (1 - rho_l)
      for (std::size_t j = 0; j < L; ++j) {
        out[j] = survive + log_sigmoid(eta[j]);
        survive += log_sigmoid(-eta[j]);
      }
      out[L] = survive;
      break;
    }
  }
}

Eigen::MatrixXd log_category_probabilities(Family family, const Eigen::MatrixXd& eta) {
  const Eigen::Index L = eta.cols();
  Eigen::MatrixXd out(eta.rows(), L + 1);
  std::vector<double> in(static_cast<std::size_t>(L));
  std::vector<double> buf(static_cast<std::size_t>(L + 1));
  for (Eigen::Index i = 0; i < eta.rows(); ++i) {
    for (Eigen::Index j = 0; j < L; ++j) in[static_cast<std::size_t>(j)] = eta(i, j);
    row_log_probabilities(family, in, buf, static_cast<int>(i));
    for (Eigen::Index j = 0; j <= L; ++j) out(i, j) = buf[static_cast<std::size_t>(j)];
  }
  return out;
}

Eigen::MatrixXd category_probabilities(Family family, const Eigen::MatrixXd& eta) {
  return log_category_probabilities(family, eta).array().exp().matrix();
}

double log_likelihood(const ModelSpec& spec, const Theta& theta, const Dataset& data,
                      const Permutation& sigma) {
  const Eigen::MatrixXd logp = log_category_probabilities(spec.family(), linear_predictors(spec, theta, data));
  if (sigma.size() != spec.categories()) {
    throw Error(ErrorKind::DimensionMismatch, "order size differs from category count");
  }
  double l = 0.0;
  for (int i = 0; i < data.rows(); ++i) {
    for (int k = 0; k < spec.categories(); ++k) {
      const auto y = data.counts()(i, sigma[k]);
      if (y == 0) continue;
      const double lp = logp(i, k);
      if (!std::isfinite(lp)) {
        throw Error(ErrorKind::NonFinite, "zero fitted probability for an observed category at design point " +
                                              std::to_string(i + 1));
      }
      l += static_cast<double>(y) * lp;
    }
  }
  return l;
}

FeasibilityReport check_cumulative_feasibility(const ModelSpec& spec, const Theta& theta,
                                               const Dataset& data) {
  FeasibilityReport report;
  const Eigen::MatrixXd eta = linear_predictors(spec, theta, data);
  for (Eigen::Index i = 0; i < eta.rows(); ++i) {
    for (Eigen::Index j = 0; j + 1 < eta.cols(); ++j) {
      const double gap = eta(i, j + 1) - eta(i, j);
      if (!(gap > 0.0)) {
        report.violations.push_back({static_cast<int>(i), static_cast<int>(j), gap});
      }
    }
  }
  return report;
}

}  // namespace catorder
