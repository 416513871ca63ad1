#include "catorder/orders.hpp"

#include <algorithm>
#include <numeric>

namespace catorder {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// Right-multiplication generators g with sigma ~ sigma g for every sigma.
std::vector<Permutation> generators(EquivalenceRule rule, int J) {
  std::vector<Permutation> gens;
  switch (rule) {
    case EquivalenceRule::None: break;
    case EquivalenceRule::SameBaseline:
      // Adjacent transpositions among the first J-1 positions generate every
      // permutation that fixes the baseline position.
      for (int k = 0; k + 2 < J; ++k) gens.push_back(Permutation::transposition(J, k, k + 1));
      break;
    case EquivalenceRule::Reverse:
      gens.push_back(Permutation::reversed(Permutation::identity(J)));
      break;
    case EquivalenceRule::AllOrders:
      for (int k = 0; k + 1 < J; ++k) gens.push_back(Permutation::transposition(J, k, k + 1));
      break;
    case EquivalenceRule::SwapLastTwo:
      gens.push_back(Permutation::transposition(J, J - 2, J - 1));
      break;
  }
  return gens;
}

}  // namespace

std::string_view to_string(EquivalenceRule rule) {
  switch (rule) {
    case EquivalenceRule::None: return "none";
    case EquivalenceRule::SameBaseline: return "same-baseline";
    case EquivalenceRule::Reverse: return "reverse";
    case EquivalenceRule::AllOrders: return "all-orders";
    case EquivalenceRule::SwapLastTwo: return "swap-last-two";
  }
  return "?";
}

std::string_view describe(EquivalenceRule rule) {
  switch (rule) {
    case EquivalenceRule::None: return "all orders are distinguishable";
    case EquivalenceRule::SameBaseline: return "orders with the same baseline category are equivalent";
    case EquivalenceRule::Reverse: return "each order is equivalent to its reverse";
    case EquivalenceRule::AllOrders: return "all orders are equivalent";
    case EquivalenceRule::SwapLastTwo: return "orders differing by a swap of the last two categories are equivalent";
  }
  return "?";
}

EquivalenceRule equivalence_rule(Family family, Odds odds) {
  const bool npo = odds == Odds::NPO;
  switch (family) {
    case Family::Baseline: return npo ? EquivalenceRule::AllOrders : EquivalenceRule::SameBaseline;
    case Family::Cumulative: return EquivalenceRule::Reverse;
    case Family::Adjacent: return npo ? EquivalenceRule::AllOrders : EquivalenceRule::Reverse;
    case Family::Continuation: return npo ? EquivalenceRule::SwapLastTwo : EquivalenceRule::None;
  }
  return EquivalenceRule::None;
}

std::vector<Permutation> enumerate_orders(int categories) {
  if (categories > kMaxCategories) {
    throw Error(ErrorKind::JTooLarge, "order enumeration is capped at J = " + std::to_string(kMaxCategories));
  }
  if (categories < 1) throw Error(ErrorKind::InvalidArgument, "need at least one category");
  std::vector<int> image(static_cast<std::size_t>(categories));
  std::iota(image.begin(), image.end(), 0);
  std::vector<Permutation> out;
  do {
    out.emplace_back(image);
  } while (std::next_permutation(image.begin(), image.end()));
  return out;
}

int lexicographic_rank(const Permutation& sigma) {
  const int n = sigma.size();
  int rank = 0;
  for (int k = 0; k < n; ++k) {
    int smaller_after = 0;
    for (int l = k + 1; l < n; ++l) smaller_after += sigma[l] < sigma[k];
    rank = rank * (n - k) + smaller_after;
  }
  return rank;
}

EquivalenceClasses equivalence_classes(Family family, Odds odds, int categories) {
  const auto orders = enumerate_orders(categories);
  const auto rule = equivalence_rule(family, odds);
  DisjointSets sets(orders.size());
  for (const auto& g : generators(rule, categories)) {
    for (std::size_t r = 0; r < orders.size(); ++r) {
      sets.unite(r, static_cast<std::size_t>(lexicographic_rank(orders[r] * g)));
    }
  }

  EquivalenceClasses out;
  out.categories = categories;
  out.rule = rule;
  out.class_of.assign(orders.size(), -1);
  std::vector<int> class_of_root(orders.size(), -1);
  for (std::size_t r = 0; r < orders.size(); ++r) {
    const auto root = sets.find(r);
    if (class_of_root[root] < 0) {
      class_of_root[root] = static_cast<int>(out.classes.size());
      out.classes.push_back({orders[r], {}, rule});
    }
    const int c = class_of_root[root];
    out.class_of[r] = c;
    out.classes[static_cast<std::size_t>(c)].members.push_back(orders[r]);
  }
  for (auto& cls : out.classes) {
    if (cls.members.size() == 1) cls.rule = EquivalenceRule::None;
  }
  return out;
}

EquivalenceClasses equivalence_classes(const ModelSpec& spec) {
  return equivalence_classes(spec.family(), spec.odds(), spec.categories());
}

Theta transform_theta(const ModelSpec& spec, const Theta& theta1, const Permutation& sigma1,
                      const Permutation& sigma2) {
  if (!theta1.matches(spec)) throw Error(ErrorKind::DimensionMismatch, "theta does not match model");
  const int J = spec.categories();
  const int L = spec.logits();
  if (sigma1.size() != J || sigma2.size() != J) {
    throw Error(ErrorKind::DimensionMismatch, "order size differs from category count");
  }
  if (sigma1 == sigma2) return theta1;

  const auto rule = equivalence_rule(spec.family(), spec.odds());
  if (rule == EquivalenceRule::None) {
    throw Error(ErrorKind::Unsupported, spec.name() + " has no order-changing parameter transformation");
  }

  // theta2 must satisfy pi_k(theta2) = pi_{tau(k)}(theta1) with tau = sigma1^-1 sigma2.
  const Permutation tau = sigma1.inverse() * sigma2;
  Theta theta2 = theta1;
  auto not_equivalent = [&] {
    return Error(ErrorKind::NotEquivalent, "orders " + sigma1.to_string() + " and " + sigma2.to_string() +
                                               " are not equivalent under " + spec.name());
  };

  switch (rule) {
    case EquivalenceRule::None: break;
    case EquivalenceRule::SameBaseline:
      if (tau[L] != L) throw not_equivalent();
      for (int j = 0; j < L; ++j) theta2.beta(j) = theta1.beta(tau[j]);
      break;
    case EquivalenceRule::Reverse:
      if (tau != Permutation::reversed(Permutation::identity(J))) throw not_equivalent();
      for (int j = 0; j < L; ++j) theta2.beta(j) = -theta1.beta(L - 1 - j);
      theta2.zeta() = -theta1.zeta();
      break;
    case EquivalenceRule::SwapLastTwo:
      if (tau != Permutation::transposition(J, J - 2, J - 1)) throw not_equivalent();
      theta2.beta(L - 1) = -theta1.beta(L - 1);
      break;
    case EquivalenceRule::AllOrders: {
      const int q = spec.block_size();
      if (spec.family() == Family::Baseline) {
        // beta2_j = beta_{tau(j)} - beta_{tau(J)}, with beta_J = 0.
        auto block = [&](int k) -> Eigen::VectorXd {
          return k == L ? Eigen::VectorXd::Zero(q) : Eigen::VectorXd(theta1.beta(k));
        };
        const Eigen::VectorXd last = block(tau[L]);
        for (int j = 0; j < L; ++j) theta2.beta(j) = block(tau[j]) - last;
      } else {
        // Adjacent categories: tail sums B_k = sum_{l >= k} beta_l, B_J = 0;
        // beta2_j = B_{tau(j)} - B_{tau(j+1)}.
        std::vector<Eigen::VectorXd> tails(static_cast<std::size_t>(J), Eigen::VectorXd::Zero(q));
        for (int k = L - 1; k >= 0; --k) {
          tails[static_cast<std::size_t>(k)] = tails[static_cast<std::size_t>(k + 1)] + theta1.beta(k);
        }
        for (int j = 0; j < L; ++j) {
          theta2.beta(j) = tails[static_cast<std::size_t>(tau[j])] - tails[static_cast<std::size_t>(tau[j + 1])];
        }
      }
      break;
    }
  }
  return theta2;
}

}  // namespace catorder
