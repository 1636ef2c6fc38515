#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace neurowise::stats {

double mean(std::span<const double> v);
/// Sample variance (n - 1 denominator).
double variance(std::span<const double> v);
double stddev(std::span<const double> v);
double median(std::span<const double> v);

struct Correlation {
    double r = 0.0;
    double p_value = 1.0;
};

/// Product-moment correlation, two-sided p from t = r sqrt((n-2)/(1-r^2)) on n-2 df.
/// Throws ContractViolation for unequal lengths or n < 3, DegenerateInputError for zero variance.
Correlation pearson_r(std::span<const double> x, std::span<const double> y);

/// (mean_x - mean_y) / pooled sd, pooled over n1 + n2 - 2 degrees of freedom.
/// Throws ContractViolation if either sample has fewer than 2 values and
/// DegenerateInputError if the pooled variance is zero.
double cohens_d(std::span<const double> x, std::span<const double> y);

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Throws ContractViolation on ragged input.
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::vector<double> column(std::size_t c) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace neurowise::stats
