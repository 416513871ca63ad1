#pragma once

#include <string_view>
#include <vector>

#include "catorder/model.hpp"
#include "catorder/permutation.hpp"

namespace catorder {

inline constexpr int kMaxCategories = 8;

/// The generator that merges orders for a given family and odds structure.
enum class EquivalenceRule {
  None,         // continuation-ratio po/ppo: every order distinct
  SameBaseline, // baseline-category po/ppo: orders sharing the last category
  Reverse,      // cumulative (any odds), adjacent-categories po/ppo
  AllOrders,    // baseline-category npo, adjacent-categories npo
  SwapLastTwo,  // continuation-ratio npo: sigma ~ sigma (J-1, J)
};

std::string_view to_string(EquivalenceRule rule);
/// One-line human description, e.g. "all orders are equivalent".
std::string_view describe(EquivalenceRule rule);

EquivalenceRule equivalence_rule(Family family, Odds odds);

/// All J! orders in lexicographic order. Throws JTooLarge beyond 8.
std::vector<Permutation> enumerate_orders(int categories);

/// Position of `sigma` in the lexicographic enumeration.
int lexicographic_rank(const Permutation& sigma);

struct OrderClass {
  Permutation representative;        // lexicographically smallest member
  std::vector<Permutation> members;  // lexicographic
  EquivalenceRule rule = EquivalenceRule::None;  // None for singletons
};

struct EquivalenceClasses {
  int categories = 0;
  EquivalenceRule rule = EquivalenceRule::None;
  std::vector<OrderClass> classes;  // sorted by representative
  std::vector<int> class_of;        // indexed by lexicographic_rank

  int class_index(const Permutation& sigma) const { return class_of[static_cast<std::size_t>(lexicographic_rank(sigma))]; }
  bool same_class(const Permutation& a, const Permutation& b) const { return class_index(a) == class_index(b); }
};

/// Union-find closure of the rule's generators over all J! orders.
EquivalenceClasses equivalence_classes(Family family, Odds odds, int categories);
EquivalenceClasses equivalence_classes(const ModelSpec& spec);

/// Maps theta1 fitted under order sigma1 to the theta2 under sigma2 with
/// pi_{i, sigma1^-1(j)}(theta1) = pi_{i, sigma2^-1(j)}(theta2) for every
/// design point, so both orders attain the same likelihood. Throws
/// NotEquivalent for orders in different classes and Unsupported for
/// continuation-ratio po/ppo (no transformation exists).
Theta transform_theta(const ModelSpec& spec, const Theta& theta1, const Permutation& sigma1,
                      const Permutation& sigma2);

}  // namespace catorder
