#pragma once

#include "neurowise/stats/descriptive.hpp"

namespace neurowise::stats {

/// Rows are participants, columns are items; variances use n - 1.
/// Throws ContractViolation for fewer than 2 items or participants and
/// DegenerateInputError when the total score has zero variance.
double cronbach_alpha(const Matrix& items);

/// Two-way ANOVA mean squares of an n x k ratings matrix (rows = targets, cols = raters).
struct TwoWayAnova {
    std::size_t n = 0;
    std::size_t k = 0;
    double ms_rows = 0.0;
    double ms_cols = 0.0;
    double ms_error = 0.0;
};

TwoWayAnova two_way_anova(const Matrix& ratings);

struct Icc {
    double icc = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// ICC(2,1): two-way random effects, absolute agreement, single rater,
///   (MS_R - MS_E) / (MS_R + (k-1) MS_E + k (MS_C - MS_E) / n),
/// with the F-based confidence interval of McGraw and Wong for this form.
/// Throws ContractViolation for n < 2 or k < 2 and DegenerateInputError for a constant
/// matrix or a non-positive denominator.
Icc icc_2_1(const Matrix& ratings, double confidence = 0.95);

}  // namespace neurowise::stats
