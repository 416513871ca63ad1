#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "catorder/crossval.hpp"
#include "catorder/io.hpp"
#include "catorder/rng.hpp"
#include "catorder/simulation.hpp"
#include "catorder/stats.hpp"
#include "oracles.hpp"

using namespace catorder;

namespace {

SimulationPlan four_point_plan(std::int64_t total, Allocation allocation = Allocation::RandomIID) {
  const auto spec = ModelSpec::po(Family::Baseline, 4, 1);
  Eigen::MatrixXd design(4, 1);
  design << 1, 2, 3, 4;
  SimulationPlan plan{spec,
                      Theta(spec, Eigen::Vector4d(-0.8, -0.3, -1.0, 0.5)),
                      Permutation::identity(4),
                      design,
                      Eigen::VectorXd::Ones(4),
                      total,
                      allocation,
                      12345,
                      {},
                      {}};
  return plan;
}

// Simpson's rule on the t density as an independent CDF reference.
double t_cdf_quadrature(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
  auto pdf = [&](double u) { return c * std::pow(1 + u * u / df, -(df + 1) / 2); };
  const double lo = std::min(0.0, t), hi = std::max(0.0, t);
  const int n = 20000;
  const double h = (hi - lo) / n;
  double s = pdf(lo) + pdf(hi);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * pdf(lo + k * h);
  const double area = s * h / 3.0;
  return t >= 0 ? 0.5 + area : 0.5 - area;
}

}  // namespace

TEST_CASE("seed derivation separates streams and indices") {
  CHECK(derive_seed(1, Stream::Responses, 0) == derive_seed(1, Stream::Responses, 0));
  CHECK(derive_seed(1, Stream::Responses, 0) != derive_seed(1, Stream::Responses, 1));
  CHECK(derive_seed(1, Stream::Responses, 0) != derive_seed(1, Stream::Allocation, 0));
  CHECK(derive_seed(1, Stream::Responses, 0) != derive_seed(2, Stream::Responses, 0));
}

TEST_CASE("multinomial draws match their expectation") {
  auto rng = make_rng(99, Stream::Test, 0);
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  const int reps = 400;
  const std::int64_t n = 250;
  std::vector<double> mean(4, 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto draw = sample_multinomial(rng, n, p);
    CHECK(std::accumulate(draw.begin(), draw.end(), std::int64_t{0}) == n);
    for (std::size_t j = 0; j < 4; ++j) mean[j] += static_cast<double>(draw[j]) / reps;
  }
  for (std::size_t j = 0; j < 4; ++j) {
    const double se = std::sqrt(n * p[j] * (1 - p[j]) / reps);
    CHECK(std::abs(mean[j] - n * p[j]) < 4.0 * se);
  }
}

TEST_CASE("proportional allocation") {
  const auto a = proportional_allocation(Eigen::Vector3d(1, 1, 1), 100);
  CHECK(std::accumulate(a.begin(), a.end(), std::int64_t{0}) == 100);
  CHECK(a == std::vector<std::int64_t>{34, 33, 33});
  const auto b = proportional_allocation(Eigen::Vector3d(0.5, 0.3, 0.2), 7);
  CHECK(b == std::vector<std::int64_t>{4, 2, 1});
}

TEST_CASE("simulation plans are validated") {
  auto plan = four_point_plan(100);
  plan.weights(0) = -1.0;
  CHECK_THROWS_AS(plan.validate(), Error);
  auto fixed = four_point_plan(3, Allocation::FixedProportional);
  CHECK_THROWS_AS(fixed.validate(), Error);
  // probabilities pinned at 0 or 1 are rejected
  auto extreme = four_point_plan(100);
  extreme.theta0.values() << 800.0, -0.3, -1.0, 0.5;
  CHECK_THROWS_AS(simulate_dataset(extreme), Error);
  // infeasible cumulative generating parameters
  const auto cspec = ModelSpec::po(Family::Cumulative, 4, 1);
  auto cum = four_point_plan(100);
  cum.spec = cspec;
  cum.theta0 = Theta(cspec, Eigen::Vector4d(1.0, 0.0, 2.0, 0.1));
  CHECK_THROWS_AS(simulate_dataset(cum), Error);
}

TEST_CASE("generating probabilities follow the true order") {
  auto plan = four_point_plan(100);
  plan.sigma0 = Permutation::parse("2,4,1,3");
  const Eigen::MatrixXd p = generating_probabilities(plan);
  for (int i = 0; i < 4; ++i) {
    const auto ref = oracle::probabilities(Family::Baseline, oracle::eta(plan.spec, plan.theta0, plan.design.row(i)));
    for (int k = 0; k < 4; ++k) CHECK(p(i, plan.sigma0[k]) == doctest::Approx(ref[static_cast<std::size_t>(k)]));
    CHECK(p.row(i).sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("simulated datasets are reproducible and consistent") {
  const auto plan = four_point_plan(2000, Allocation::FixedProportional);
  const auto a = simulate_dataset(plan, 0);
  const auto b = simulate_dataset(plan, 0);
  const auto c = simulate_dataset(plan, 1);
  CHECK(a.counts() == b.counts());
  CHECK(a.counts() != c.counts());
  CHECK(a.total() == 2000);
  for (int i = 0; i < 4; ++i) CHECK(a.row_total(i) == 500);

  const auto big = simulate_dataset(four_point_plan(400000), 3);
  CHECK(big.total() == 400000);
  const Eigen::MatrixXd p = generating_probabilities(four_point_plan(1));
  int outside = 0;
  for (int i = 0; i < big.rows(); ++i) {
    const double n = static_cast<double>(big.row_total(i));
    for (int j = 0; j < 4; ++j) {
      const double se = std::sqrt(p(i, j) * (1 - p(i, j)) / n);
      if (std::abs(static_cast<double>(big.counts()(i, j)) / n - p(i, j)) > 3 * se) ++outside;
    }
  }
  CHECK(outside <= 1);
}

TEST_CASE("true order experiment") {
  const auto plan = four_point_plan(20000);
  const auto out = true_order_experiment(plan, plan.spec);
  CHECK(out.classes == 4);
  CHECK(out.rank >= 1);
  CHECK(out.gap >= 0.0);
  if (out.rank == 1) CHECK(out.gap == 0.0);
  CHECK(out.observations == 20000);
  CHECK(out.loglik_best >= out.loglik_true_fit);

  const auto m1 = replicate_experiment(plan, plan.spec, 2);
  const auto m2 = replicate_experiment(plan, plan.spec, 2);
  CHECK(m1.aic.rows() == 2);
  CHECK(m1.aic.cols() == 4);
  CHECK(m1.aic == m2.aic);
  CHECK(m1.classes[static_cast<std::size_t>(m1.true_class)].representative[3] == 3);
  CHECK_THROWS_AS(replicate_experiment(plan, plan.spec, 1), Error);
}

TEST_CASE("student t distribution function") {
  for (double df : {1.0, 4.0, 29.0, 99.0}) {
    for (double t : {-6.0, -2.0, -0.5, 0.0, 1.3, 3.0}) {
      CHECK(student_t_cdf(t, df) == doctest::Approx(t_cdf_quadrature(t, df)).epsilon(1e-7));
    }
  }
}

TEST_CASE("one-sided paired t-test") {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  const auto same = paired_t_test_one_sided(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == 0.5);
  const std::vector<double> lower{0.0, 1.0, 2.0, 3.0};
  CHECK(paired_t_test_one_sided(lower, a).p == 0.0);
  CHECK(paired_t_test_one_sided(a, lower).p == 1.0);
  const std::vector<double> jitter{1.0 + 2e-16, 2.0 - 4e-16, 3.0, 4.0 + 8e-16};
  CHECK(paired_t_test_one_sided(a, jitter).p == 0.5);

  // d = (-1, -2, 0, -3): mean -1.5, sd sqrt(5/3)
  const std::vector<double> b{2.0, 4.0, 3.0, 7.0};
  const auto r = paired_t_test_one_sided(a, b);
  const double t = -1.5 / (std::sqrt(5.0 / 3.0) / 2.0);
  CHECK(r.t == doctest::Approx(t));
  CHECK(r.degrees_of_freedom == 3);
  CHECK(r.p == doctest::Approx(t_cdf_quadrature(t, 3.0)).epsilon(1e-7));

  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(-1.0, 1.0);
  std::vector<double> d(100), zero(100, 0.0);
  for (auto& v : d) v = noise(rng);
  CHECK(paired_t_test_one_sided(d, zero).p < 0.01);
  CHECK_THROWS_AS(paired_t_test_one_sided(d, a), Error);
}

TEST_CASE("cross-validation bookkeeping") {
  const auto data = baseline_po_dataset();
  const auto records = expand_counts(data);
  REQUIRE(records.size() == 400);
  CHECK(records.front().design == 0);
  CHECK(records.front().category == 0);
  CHECK(records[22].category == 1);  // first row has 22 in category 1
  CHECK(records.back().design == 3);

  CrossValPlan plan;
  plan.seed = 5;
  CHECK(plan.train_size(400) == 267);
  CHECK(split_permutation(plan, 400, 3) == split_permutation(plan, 400, 3));
  CHECK(split_permutation(plan, 400, 3) != split_permutation(plan, 400, 4));
  CrossValPlan bad;
  bad.train_fraction = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("cross-validated losses of equivalent orders coincide") {
  const auto data = baseline_po_dataset();
  const auto spec = ModelSpec::po(Family::Baseline, 4, 1);
  CrossValPlan plan;
  plan.repetitions = 5;
  plan.seed = 77;
  const std::vector<Permutation> orders{Permutation::identity(4), Permutation::parse("2,1,3,4"),
                                        Permutation::parse("1,2,4,3")};
  const Eigen::MatrixXd loss = cross_validate_orders(data, spec, orders, plan);
  CHECK((loss.col(0) - loss.col(1)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((loss.col(0) - loss.col(2)).cwiseAbs().maxCoeff() > 1e-6);
  CHECK((loss.array() > 0.0).all());
  const auto single = cross_validate(data, spec, orders[2], plan);
  for (int r = 0; r < 5; ++r) CHECK(single[static_cast<std::size_t>(r)] == doctest::Approx(loss(r, 2)).epsilon(1e-10));
}
