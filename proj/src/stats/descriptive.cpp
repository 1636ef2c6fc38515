#include "neurowise/stats/descriptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "neurowise/core/errors.hpp"

namespace neurowise::stats {

double mean(std::span<const double> v) {
    if (v.empty()) throw ContractViolation("mean of an empty sample");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
    if (v.size() < 2) throw ContractViolation("variance needs at least two values");
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

double stddev(std::span<const double> v) { return std::sqrt(variance(v)); }

double median(std::span<const double> v) {
    if (v.empty()) throw ContractViolation("median of an empty sample");
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    const std::size_t mid = s.size() / 2;
    return s.size() % 2 == 1 ? s[mid] : (s[mid - 1] + s[mid]) / 2.0;
}

Correlation pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ContractViolation("pearson_r needs samples of equal length");
    if (x.size() < 3) throw ContractViolation("pearson_r needs at least three pairs");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateInputError("pearson_r: a sample has zero variance");

    Correlation out;
    out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double df = static_cast<double>(x.size() - 2);
    const double one_minus = 1.0 - out.r * out.r;
    if (one_minus <= 0.0) {
        out.p_value = 0.0;
    } else {
        const double t = out.r * std::sqrt(df / one_minus);
        boost::math::students_t dist(df);
        out.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
    }
    return out;
}

double cohens_d(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2 || y.size() < 2) throw ContractViolation("cohens_d needs at least two values per sample");
    const double n1 = static_cast<double>(x.size());
    const double n2 = static_cast<double>(y.size());
    const double pooled = ((n1 - 1.0) * variance(x) + (n2 - 1.0) * variance(y)) / (n1 + n2 - 2.0);
    if (pooled <= 0.0) throw DegenerateInputError("cohens_d: pooled variance is zero");
    return (mean(x) - mean(y)) / std::sqrt(pooled);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw ContractViolation("ragged matrix: row " + std::to_string(r));
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

}  // namespace neurowise::stats
