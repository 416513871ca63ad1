#pragma once

#include <span>

namespace catorder {

struct TTestResult {
  double t = 0.0;
  double p = 0.0;  // P(T_{B-1} <= t), small when a < b
  double mean_difference = 0.0;
  int degrees_of_freedom = 0;
};

/// One-sided paired t-test of H1: mean(a - b) < 0.
///
/// Zero-variance differences are resolved by convention: mean 0 gives
/// t = 0, p = 0.5; a negative mean gives p = 0 and a positive one p = 1.
/// Spreads and means below 1e-12 of the data's magnitude count as zero.
TTestResult paired_t_test_one_sided(std::span<const double> a, std::span<const double> b);

/// CDF of Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

}  // namespace catorder
