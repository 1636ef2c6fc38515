#include "neurowise/stats/reliability.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/fisher_f.hpp>

#include "neurowise/core/errors.hpp"

namespace neurowise::stats {

double cronbach_alpha(const Matrix& items) {
    const std::size_t n = items.rows();
    const std::size_t k = items.cols();
    if (k < 2) throw ContractViolation("cronbach_alpha needs at least two items");
    if (n < 2) throw ContractViolation("cronbach_alpha needs at least two participants");

    double item_variance_sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) item_variance_sum += variance(items.column(c));

    std::vector<double> totals(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < k; ++c) totals[r] += items(r, c);
    }
    const double total_variance = variance(totals);
    if (total_variance <= 0.0) throw DegenerateInputError("cronbach_alpha: total score has zero variance");

    const double kk = static_cast<double>(k);
    return kk / (kk - 1.0) * (1.0 - item_variance_sum / total_variance);
}

TwoWayAnova two_way_anova(const Matrix& x) {
    const std::size_t n = x.rows();
    const std::size_t k = x.cols();
    if (n < 2 || k < 2) throw ContractViolation("rating matrix needs at least 2 rows and 2 raters");

    std::vector<double> row_mean(n, 0.0);
    std::vector<double> col_mean(k, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            row_mean[i] += x(i, j);
            col_mean[j] += x(i, j);
            grand += x(i, j);
        }
    }
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    for (auto& m : row_mean) m /= kd;
    for (auto& m : col_mean) m /= nd;
    grand /= nd * kd;

    double ss_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) ss_total += (x(i, j) - grand) * (x(i, j) - grand);
    }
    double ss_rows = 0.0;
    for (double m : row_mean) ss_rows += (m - grand) * (m - grand);
    ss_rows *= kd;
    double ss_cols = 0.0;
    for (double m : col_mean) ss_cols += (m - grand) * (m - grand);
    ss_cols *= nd;
    const double ss_error = std::max(0.0, ss_total - ss_rows - ss_cols);

    if (ss_total == 0.0) throw DegenerateInputError("rating matrix is constant");

    return {n, k, ss_rows / (nd - 1.0), ss_cols / (kd - 1.0), ss_error / ((nd - 1.0) * (kd - 1.0))};
}

Icc icc_2_1(const Matrix& ratings, double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw ContractViolation("confidence must be in (0, 1)");
    const auto a = two_way_anova(ratings);
    const double n = static_cast<double>(a.n);
    const double k = static_cast<double>(a.k);

    const double denom = a.ms_rows + (k - 1.0) * a.ms_error + k * (a.ms_cols - a.ms_error) / n;
    if (denom <= 0.0) throw DegenerateInputError("ICC denominator is not positive");

    Icc out;
    out.icc = (a.ms_rows - a.ms_error) / denom;
    if (a.ms_error == 0.0 && a.ms_cols == 0.0) {
        out.ci_low = out.ci_high = out.icc;
        return out;
    }

    // Satterthwaite degrees of freedom for the denominator mean square.
    const double alpha = 1.0 - confidence;
    const double ca = k * out.icc / (n * (1.0 - out.icc));
    const double cb = 1.0 + k * out.icc * (n - 1.0) / (n * (1.0 - out.icc));
    const double num = ca * a.ms_cols + cb * a.ms_error;
    const double v = num * num /
                     ((ca * a.ms_cols) * (ca * a.ms_cols) / (k - 1.0) +
                      (cb * a.ms_error) * (cb * a.ms_error) / ((n - 1.0) * (k - 1.0)));
    if (!(v > 0.0) || !std::isfinite(v)) {
        out.ci_low = out.ci_high = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const double f_upper = boost::math::quantile(boost::math::fisher_f(n - 1.0, v), 1.0 - alpha / 2.0);
    const double f_lower = boost::math::quantile(boost::math::fisher_f(v, n - 1.0), 1.0 - alpha / 2.0);
    const double mixed = k * a.ms_cols + (k * n - k - n) * a.ms_error;
    out.ci_low = n * (a.ms_rows - f_upper * a.ms_error) / (f_upper * mixed + n * a.ms_rows);
    out.ci_high = n * (f_lower * a.ms_rows - a.ms_error) / (mixed + n * f_lower * a.ms_rows);
    return out;
}

}  // namespace neurowise::stats
