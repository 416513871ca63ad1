#include <doctest.h>

#include <random>

#include "catorder/io.hpp"
#include "catorder/selection.hpp"
#include "oracles.hpp"

using namespace catorder;

TEST_CASE("search on the four-point simulated table, baseline po") {
  const auto data = baseline_po_dataset();
  const auto spec = ModelSpec::po(Family::Baseline, 4, 1);
  const auto result = search_orders(spec, data);
  REQUIRE(result.classes.size() == 4);
  std::size_t total = 0;
  for (std::size_t c = 0; c < result.classes.size(); ++c) {
    const auto& cls = result.classes[c];
    total += cls.order_class.members.size();
    CHECK(cls.usable());
    if (c > 0) CHECK(cls.aic() >= result.classes[c - 1].aic());
    CHECK(cls.member_thetas.size() == cls.order_class.members.size());
    for (std::size_t m = 0; m < cls.member_thetas.size(); ++m) {
      CHECK(log_likelihood(spec, cls.member_thetas[m], data, cls.order_class.members[m]) ==
            doctest::Approx(cls.loglik()).epsilon(1e-10));
    }
  }
  CHECK(total == 24);
  // the generating baseline is the last category
  CHECK(result.best().order_class.representative[3] == 3);
  CHECK(describe_best_orders(result) == "y4 as the baseline");

  const auto best = result.best().order_class.members.back();
  const auto r = rank_of_order(result, best);
  CHECK(r.rank == 1);
  CHECK(r.aic_gap == 0.0);
  const auto worst = result.classes.back().order_class.representative;
  const auto rw = rank_of_order(result, worst);
  CHECK(rw.rank == 4);
  CHECK(rw.aic_gap == doctest::Approx(result.classes.back().aic() - result.best().aic()));
  for (const auto& m : result.classes[1].order_class.members) {
    CHECK(rank_of_order(result, m).rank == 2);
    CHECK(&result.class_for(m) == &result.classes[1]);
  }
  CHECK(&result.theta_for(best) == &result.best().member_thetas.back());
}

TEST_CASE("refitting members from scratch matches the representative") {
  std::mt19937_64 rng(13);
  const auto data = oracle::random_dataset(rng, 5, 1, 4, 30);
  for (const auto& spec : {ModelSpec::npo(Family::Continuation, 4, 1), ModelSpec::po(Family::Cumulative, 4, 1),
                           ModelSpec::po(Family::Adjacent, 4, 1), ModelSpec::po(Family::Baseline, 4, 1)}) {
    const auto result = search_orders(spec, data);
    for (const auto& cls : result.classes) {
      if (!cls.usable()) continue;
      const auto& member = cls.order_class.members.back();
      const auto refit = fit_mle(spec, data, member);
      if (refit.ok()) CHECK(std::abs(refit.loglik - cls.loglik()) < 1e-6);
    }
  }
}

TEST_CASE("ties break on the representative and reruns are identical") {
  std::mt19937_64 rng(2);
  const auto data = oracle::random_dataset(rng, 3, 1, 3);
  const auto spec = ModelSpec::po(Family::Cumulative, 3, 1);
  SearchOptions two;
  two.threads = 2;
  const auto a = search_orders(spec, data);
  const auto b = search_orders(spec, data, FitConfig{}, two);
  REQUIRE(a.classes.size() == b.classes.size());
  for (std::size_t c = 0; c < a.classes.size(); ++c) {
    CHECK(a.classes[c].order_class.representative == b.classes[c].order_class.representative);
    CHECK(a.classes[c].aic() == b.classes[c].aic());
  }
}

TEST_CASE("all-orders-equivalent families agree on a three-category table") {
  std::mt19937_64 rng(6);
  const auto data = oracle::random_dataset(rng, 4, 1, 3);
  const auto rows = search_all_models(data, {ModelSpec::npo(Family::Baseline, 3, 1), ModelSpec::npo(Family::Adjacent, 3, 1)});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].available);
  CHECK(rows[0].best_orders == "All are the same");
  CHECK(std::abs(rows[0].best_loglik - rows[1].best_loglik) < 1e-6);
  CHECK(search_all_models(data, {}).empty());
}

TEST_CASE("standard model list") {
  const auto specs = standard_models(4, 5);
  CHECK(specs.size() == 8);
  for (const auto& s : specs) CHECK(s.odds() != Odds::PPO);
}

TEST_CASE("police table model comparison") {
  const auto data = police_dataset();
  const auto rows = search_all_models(data, standard_models(4, data.covariates()));
  REQUIRE(rows.size() == 8);
  int na = 0;
  for (const auto& r : rows) {
    if (!r.available) {
      ++na;
      CHECK(r.spec.family() == Family::Cumulative);
      CHECK(r.spec.odds() == Odds::NPO);
      CHECK_FALSE(r.note.empty());
    }
  }
  CHECK(na == 1);
  const auto& cont = rows[7];
  CHECK(cont.spec.name() == "Continuation-ratio npo");
  CHECK(cont.best_orders == "(t, s, o, st) or (t, s, st, o)");
  CHECK(cont.best_aic - 2.0 * data.log_multinomial_constant() == doctest::Approx(192.01).epsilon(0.0005));
  CHECK(rows[4].best_orders == "(st, s, o, t) or (t, o, s, st)");
  CHECK(rows[6].best_orders == "(t, o, s, st)");
}
