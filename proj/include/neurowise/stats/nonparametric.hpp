#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "neurowise/stats/test_result.hpp"

namespace neurowise::stats {

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> midranks(std::span<const double> values);

/// Largest pooled size that uses the exact U distribution (tie-free data only).
inline constexpr std::size_t kMannWhitneyExactMaxPooled = 40;
/// Largest count of nonzero differences that uses the exact signed-rank distribution.
inline constexpr std::size_t kWilcoxonExactMaxPairs = 20;

/// counts[u] = number of orderings of n1 x's and n2 y's with U_x = u. Sums to C(n1+n2, n1).
std::vector<std::uint64_t> mann_whitney_exact_counts(std::size_t n1, std::size_t n2);

/// Two-sided Mann-Whitney U test. `statistic` is U for x: the number of (x_i, y_j)
/// pairs with x_i > y_j, ties counting one half. `statistic_alt` is min(U_x, U_y).
/// Exact p when the pooled size is at most 40 and there are no ties; otherwise the
/// normal approximation with tie and continuity corrections. effect_size is Cliff's delta.
/// Throws ContractViolation on an empty sample.
TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y);

/// Two-sided Wilcoxon signed-rank test on d = post - pre. Zero differences are dropped.
/// `statistic` is W- (rank sum of negative differences), `statistic_alt` is W+.
/// Exact p for at most 20 nonzero differences, normal approximation otherwise.
/// effect_size is the matched-pairs rank-biserial correlation (W+ - W-) / (W+ + W-).
/// Throws ContractViolation on length mismatch or empty input and
/// DegenerateInputError when every difference is zero.
TestResult wilcoxon_signed_rank(std::span<const double> pre, std::span<const double> post);

struct CliffsDelta {
    double delta = 0.0;
    EffectLabel label = EffectLabel::Small;
};

/// (#{x_i > y_j} - #{x_i < y_j}) / (n1 n2), by direct pair count.
CliffsDelta cliffs_delta(std::span<const double> x, std::span<const double> y);

/// Cliff's delta implied by a Mann-Whitney U: 2U / (n1 n2) - 1.
double cliffs_delta_from_u(double u, std::size_t n1, std::size_t n2);

/// Two-sided tail probability of a standard normal deviate.
double normal_two_sided_p(double z);

}  // namespace neurowise::stats
