#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "catorder/fit.hpp"
#include "catorder/io.hpp"
#include "oracles.hpp"

using namespace catorder;

namespace {

Dataset single_point(std::initializer_list<std::int64_t> counts) {
  Eigen::MatrixXd x(1, 0);
  CountMatrix y(1, static_cast<Eigen::Index>(counts.size()));
  Eigen::Index j = 0;
  for (auto c : counts) y(0, j++) = c;
  return Dataset(x, y);
}

double max_rel_error(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
  return (got - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("aic and bic arithmetic") {
  CHECK(aic(-10.0, 3) == 26.0);
  CHECK(bic(-10.0, 3, 100.0) == doctest::Approx(20.0 + 3.0 * std::log(100.0)));
}

TEST_CASE("fit configuration is validated") {
  FitConfig c;
  c.gradient_tolerance = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  FitConfig d;
  d.max_iterations = 0;
  CHECK_THROWS_AS(fit_mle(ModelSpec::npo(Family::Baseline, 3, 0), single_point({1, 2, 3}),
                          Permutation::identity(3), d),
                  Error);
}

TEST_CASE("saturated single design point gives empirical frequencies") {
  const auto data = single_point({2, 3, 5});
  const auto spec = ModelSpec::npo(Family::Baseline, 3, 0);
  const auto fit = fit_mle(spec, data, Permutation::identity(3));
  REQUIRE(fit.ok());
  const Eigen::MatrixXd p = category_probabilities(spec.family(), linear_predictors(spec, fit.theta, data));
  CHECK(p(0, 0) == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(p(0, 1) == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(p(0, 2) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(fit.loglik == doctest::Approx(2 * std::log(0.2) + 3 * std::log(0.3) + 5 * std::log(0.5)).epsilon(1e-10));
  CHECK(score_vector(spec, fit.theta, data, Permutation::identity(3)).cwiseAbs().maxCoeff() < 1e-8);
  const Eigen::MatrixXd info = information_matrix(spec, fit.theta, data, Permutation::identity(3));
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(info).eigenvalues().minCoeff() > 0.0);
  CHECK(fit.aic == doctest::Approx(-2 * fit.loglik + 4));
  CHECK(fit.bic == doctest::Approx(-2 * fit.loglik + 2 * std::log(10.0)));
}

TEST_CASE("score matches central differences") {
  std::mt19937_64 rng(21);
  for (int J : {3, 4}) {
    for (const auto& spec : oracle::all_specs(J, 2)) {
      for (int rep = 0; rep < 3; ++rep) {
        const auto data = oracle::random_dataset(rng, 5, 2, J);
        const Theta theta = oracle::random_theta(rng, spec);
        const auto sigma = oracle::random_order(rng, J);
        auto f = [&](const Eigen::VectorXd& v) { return log_likelihood(spec, Theta(spec, v), data, sigma); };
        const Eigen::VectorXd g = score_vector(spec, theta, data, sigma);
        CHECK(max_rel_error(g, oracle::gradient(f, theta.values())) < 1e-4);

        auto s = [&](const Eigen::VectorXd& v) { return score_vector(spec, Theta(spec, v), data, sigma); };
        const Eigen::MatrixXd info = information_matrix(spec, theta, data, sigma);
        const Eigen::MatrixXd fd = -oracle::jacobian(s, theta.values());
        CHECK((info - info.transpose()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((info - fd).cwiseAbs().maxCoeff() / std::max(1.0, fd.cwiseAbs().maxCoeff()) < 1e-4);
      }
    }
  }
}

TEST_CASE("shifting one block of a po model moves only its own score entry") {
  std::mt19937_64 rng(4);
  const auto spec = ModelSpec::po(Family::Continuation, 4, 1);
  const auto data = oracle::random_dataset(rng, 5, 1, 4);
  Theta a = oracle::random_theta(rng, spec);
  Theta b = a;
  b.beta(1)(0) += 0.3;
  const auto sigma = Permutation::identity(4);
  const Eigen::VectorXd ga = score_vector(spec, a, data, sigma);
  const Eigen::VectorXd gb = score_vector(spec, b, data, sigma);
  // for continuation-ratio logits, eta_2 only enters pi_2.. so the first block's score is untouched
  CHECK(ga(0) == doctest::Approx(gb(0)).epsilon(1e-12));
  CHECK(ga(1) != doctest::Approx(gb(1)));
  auto f = [&](const Eigen::VectorXd& v) { return log_likelihood(spec, Theta(spec, v), data, sigma); };
  CHECK(max_rel_error(gb, oracle::gradient(f, b.values())) < 1e-4);
}

TEST_CASE("newton solve damps a singular system") {
  Eigen::MatrixXd info(2, 2);
  info << 1, 1, 1, 1;
  const Eigen::Vector2d score(1.0, 1.0);
  const auto step = solve_newton(info, score, 1e-8);
  CHECK(step.ridge > 0.0);
  CHECK(step.direction.allFinite());
  const auto clean = solve_newton(Eigen::Matrix2d::Identity(), score, 1e-8);
  CHECK(clean.ridge == 0.0);
  CHECK(clean.direction.isApprox(score));
}

TEST_CASE("redundant covariate makes the information singular but the fit proceeds") {
  Eigen::MatrixXd x(3, 2);
  x << 0, 0, 1, 1, 2, 2;  // identical columns
  CountMatrix y(3, 3);
  y << 5, 3, 2, 3, 4, 3, 1, 4, 6;
  const Dataset data(x, y);
  const auto spec = ModelSpec::po(Family::Baseline, 3, 2);
  const auto info = information_matrix(spec, Theta::zeros(spec), data, Permutation::identity(3));
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(info).eigenvalues().minCoeff() < 1e-8);
  const auto fit = fit_mle(spec, data, Permutation::identity(3));
  CHECK(std::isfinite(fit.loglik));
  CHECK(fit.loglik >= log_likelihood(spec, initial_theta(spec, data, Permutation::identity(3),
                                                          Initialization::EmpiricalLogits),
                                     data, Permutation::identity(3)));
}

TEST_CASE("fit on the four-point simulated table") {
  const auto data = baseline_po_dataset();
  const auto spec = ModelSpec::po(Family::Baseline, 4, 1);
  const auto sigma = Permutation::identity(4);
  const auto fit = fit_mle(spec, data, sigma);
  REQUIRE(fit.ok());
  CHECK(fit.gradient_norm <= 1e-8);
  CHECK_FALSE(fit.separation_suspected);
  // information is positive definite at the optimum
  const auto info = information_matrix(spec, fit.theta, data, sigma);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(info).eigenvalues().minCoeff() > 0.0);

  // the generating values (-0.8, -0.3, -1.0, 0.5) lie within 3 standard errors
  const Eigen::Vector4d truth(-0.8, -0.3, -1.0, 0.5);
  const Eigen::VectorXd se = info.inverse().diagonal().cwiseSqrt();
  CHECK(((fit.theta.values() - truth).cwiseQuotient(se)).cwiseAbs().maxCoeff() < 3.0);
  CHECK(fit.theta.zeta()(0) > 0.0);

  // refitting from the optimum is immediate
  FitConfig again;
  again.start = fit.theta;
  const auto refit = fit_mle(spec, data, sigma, again);
  CHECK(refit.iterations <= 2);
  CHECK(refit.loglik == doctest::Approx(fit.loglik).epsilon(1e-10));
}

TEST_CASE("fits never end below their starting likelihood") {
  std::mt19937_64 rng(31);
  for (const auto& spec : oracle::all_specs(4, 1)) {
    const auto data = oracle::random_dataset(rng, 6, 1, 4);
    const auto sigma = Permutation::parse("2,4,1,3");
    const auto start = initial_theta(spec, data, sigma, Initialization::EmpiricalLogits);
    const auto fit = fit_mle(spec, data, sigma);
    CHECK(fit.loglik >= log_likelihood(spec, start, data, sigma) - 1e-12);
    if (fit.converged && fit.gradient_norm > FitConfig{}.gradient_tolerance) {
      // only diverging estimates or rounding-limited stalls may stop early
      CHECK((fit.separation_suspected || fit.message.find("rounding") != std::string::npos));
    }
    CHECK(fit.aic == doctest::Approx(-2 * fit.loglik + 2 * spec.parameter_count()));
  }
}

TEST_CASE("cumulative starting values are feasible") {
  std::mt19937_64 rng(8);
  const auto data = oracle::random_dataset(rng, 5, 2, 5);
  for (auto init : {Initialization::EmpiricalLogits, Initialization::Zeros}) {
    for (const auto& sigma : {Permutation::identity(5), Permutation::parse("5,3,1,2,4")}) {
      const auto spec = ModelSpec::npo(Family::Cumulative, 5, 2);
      CHECK(check_cumulative_feasibility(spec, initial_theta(spec, data, sigma, init), data).feasible());
    }
  }
}

TEST_CASE("separated data is flagged") {
  Eigen::MatrixXd x(2, 1);
  x << 0, 1;
  CountMatrix y(2, 3);
  y << 10, 5, 0, 3, 4, 8;
  const Dataset data(x, y);
  const auto spec = ModelSpec::npo(Family::Continuation, 3, 1);
  const auto fit = fit_mle(spec, data, Permutation::identity(3));
  CHECK(fit.separation_suspected);
  CHECK(fit.converged);
  FitConfig longer;
  longer.max_iterations = 400;
  CHECK(fit_mle(spec, data, Permutation::identity(3), longer).loglik == doctest::Approx(fit.loglik).epsilon(1e-8));
}

TEST_CASE("cumulative npo on the police table has no valid fit") {
  const auto data = police_dataset();
  const auto spec = ModelSpec::npo(Family::Cumulative, 4, data.covariates());
  const auto fit = fit_mle(spec, data, Permutation::identity(4));
  CHECK_FALSE(fit.ok());
  CHECK_FALSE(fit.feasible);
}
