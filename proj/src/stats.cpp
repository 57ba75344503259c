#include "botimpact/stats.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "botimpact/error.hpp"

namespace botimpact {
namespace {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

Moments moments(std::span<const double> x) {
  Moments m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.variance = ss / static_cast<double>(x.size() - 1);
  return m;
}

}  // namespace

TestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw InvalidArgument(
        fmt::format("Welch t-test needs >= 2 values per group, got {} and {}", a.size(), b.size()));
  }
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  TestResult r;
  r.difference = ma.mean - mb.mean;
  const double va = ma.variance / static_cast<double>(a.size());
  const double vb = mb.variance / static_cast<double>(b.size());
  const double se2 = va + vb;
  if (se2 == 0.0) {
    r.statistic = r.difference == 0.0 ? 0.0 : std::copysign(INFINITY, r.difference);
    r.p_value = r.difference == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.statistic = r.difference / std::sqrt(se2);
  const double df = se2 * se2 /
                    (va * va / static_cast<double>(a.size() - 1) +
                     vb * vb / static_cast<double>(b.size() - 1));
  boost::math::students_t dist(df);
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic)));
  r.p_value = std::min(r.p_value, 1.0);
  return r;
}

TestResult two_proportion_z_test(std::size_t successes_a, std::size_t n_a,
                                 std::size_t successes_b, std::size_t n_b) {
  if (n_a == 0 || n_b == 0 || successes_a > n_a || successes_b > n_b) {
    throw InvalidArgument("two-proportion test needs 0 <= successes <= n and n >= 1");
  }
  const double pa = static_cast<double>(successes_a) / static_cast<double>(n_a);
  const double pb = static_cast<double>(successes_b) / static_cast<double>(n_b);
  const double pooled = static_cast<double>(successes_a + successes_b) /
                        static_cast<double>(n_a + n_b);
  TestResult r;
  r.difference = pa - pb;
  const double se = std::sqrt(pooled * (1.0 - pooled) *
                              (1.0 / static_cast<double>(n_a) + 1.0 / static_cast<double>(n_b)));
  if (se == 0.0) {
    // pooled rate 0 or 1 forces pa == pb
    r.p_value = 1.0;
    return r;
  }
  r.statistic = r.difference / se;
  boost::math::normal standard;
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(standard,
                                                                           std::abs(r.statistic))));
  return r;
}

}  // namespace botimpact
