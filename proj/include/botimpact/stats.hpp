#pragma once

#include <cstddef>
#include <span>

namespace botimpact {

struct TestResult {
  double difference = 0.0;  // A minus B
  double statistic = 0.0;
  double p_value = 1.0;     // two-sided
};

// Welch's unequal-variance t-test on means. Needs n >= 2 per group. Two
// zero-variance groups give p = 1 when the means agree and p = 0 otherwise.
TestResult welch_t_test(std::span<const double> a, std::span<const double> b);

// Pooled two-proportion z-test on success counts. Needs n >= 1 per group.
TestResult two_proportion_z_test(std::size_t successes_a, std::size_t n_a,
                                 std::size_t successes_b, std::size_t n_b);

}  // namespace botimpact
