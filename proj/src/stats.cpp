#include "catorder/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "catorder/error.hpp"

namespace catorder {

double student_t_cdf(double t, double df) {
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  return boost::math::cdf(boost::math::students_t_distribution<double>(df), t);
}

TTestResult paired_t_test_one_sided(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "paired samples differ in length");
  if (a.size() < 2) throw Error(ErrorKind::InvalidArgument, "paired t-test needs at least 2 pairs");
  const auto n = static_cast<double>(a.size());
  // Differences at rounding level (equivalent orders evaluated through
  // transformed parameters) count as exact zeros.
  double scale = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) scale = std::max({scale, std::abs(a[k]), std::abs(b[k])});
  const double noise = 1e-12 * scale;
  double mean = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) mean += a[k] - b[k];
  mean /= n;
  double ss = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k] - mean;
    ss += d * d;
  }
  TTestResult out;
  out.mean_difference = mean;
  out.degrees_of_freedom = static_cast<int>(a.size()) - 1;
  const double sd = std::sqrt(ss / (n - 1.0));
  if (sd <= noise) {
    if (std::abs(mean) <= noise) {
      out.mean_difference = 0.0;
      out.t = 0.0;
      out.p = 0.5;
    } else {
      out.t = mean < 0.0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
      out.p = mean < 0.0 ? 0.0 : 1.0;
    }
    return out;
  }
  out.t = mean / (sd / std::sqrt(n));
  out.p = student_t_cdf(out.t, n - 1.0);
  return out;
}

}  // namespace catorder
