#include "neurowise/stats/nonparametric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "neurowise/core/errors.hpp"

namespace neurowise::stats {

EffectLabel effect_label(double effect) {
    const double a = std::abs(effect);
    if (a < 0.33) return EffectLabel::Small;
    if (a < 0.474) return EffectLabel::Medium;
    return EffectLabel::Large;
}

std::string_view to_string(EffectLabel label) {
    switch (label) {
        case EffectLabel::Small: return "small";
        case EffectLabel::Medium: return "medium";
        case EffectLabel::Large: return "large";
    }
    return "unknown";
}

void to_json(nlohmann::json& j, const TestResult& r) {
    j = {{"statistic", r.statistic},
         {"p_value", r.p_value},
         {"effect_size", r.effect_size},
         {"effect_label", std::string(to_string(r.effect_label))},
         {"method", r.method}};
    if (r.statistic_alt) j["statistic_alt"] = *r.statistic_alt;
}

std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

namespace {

// Sum over tie groups of t^3 - t.
double tie_term(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    double term = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        term += t * t * t - t;
        i = j + 1;
    }
    return term;
}

bool has_ties(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
}

// Two-sided p from a discrete null distribution: twice the smaller tail, capped at 1.
double two_sided_from_counts(const std::vector<std::uint64_t>& counts, std::size_t observed) {
    std::uint64_t total = 0;
    std::uint64_t le = 0;
    std::uint64_t ge = 0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
        total += counts[s];
        if (s <= observed) le += counts[s];
        if (s >= observed) ge += counts[s];
    }
    const double p = 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
    return std::min(1.0, p);
}

void require_nonempty(std::span<const double> v, const char* what) {
    if (v.empty()) throw ContractViolation(std::string(what) + " must be nonempty");
}

}  // namespace

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

std::vector<std::uint64_t> mann_whitney_exact_counts(std::size_t n1, std::size_t n2) {
    // table[i][j][u]: orderings of i x's and j y's with U_x = u. The largest element is
    // either an x (beating all j y's) or a y (contributing nothing).
    std::vector<std::vector<std::vector<std::uint64_t>>> table(n1 + 1, std::vector<std::vector<std::uint64_t>>(n2 + 1));
    for (std::size_t i = 0; i <= n1; ++i) {
        for (std::size_t j = 0; j <= n2; ++j) {
            auto& cell = table[i][j];
            cell.assign(i * j + 1, 0);
            if (i == 0 || j == 0) {
                cell[0] = 1;
                continue;
            }
            const auto& x_last = table[i - 1][j];
            const auto& y_last = table[i][j - 1];
            for (std::size_t u = 0; u < x_last.size(); ++u) cell[u + j] += x_last[u];
            for (std::size_t u = 0; u < y_last.size(); ++u) cell[u] += y_last[u];
        }
    }
    return table[n1][n2];
}

double cliffs_delta_from_u(double u, std::size_t n1, std::size_t n2) {
    return 2.0 * u / static_cast<double>(n1 * n2) - 1.0;
}

CliffsDelta cliffs_delta(std::span<const double> x, std::span<const double> y) {
    require_nonempty(x, "first sample");
    require_nonempty(y, "second sample");
    long long more = 0;
    long long less = 0;
    for (double a : x) {
        for (double b : y) {
            if (a > b) ++more;
            else if (a < b) ++less;
        }
    }
    const double delta = static_cast<double>(more - less) / static_cast<double>(x.size() * y.size());
    return {delta, effect_label(delta)};
}

TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y) {
    require_nonempty(x, "first sample");
    require_nonempty(y, "second sample");
    const std::size_t n1 = x.size();
    const std::size_t n2 = y.size();
    const double nn = static_cast<double>(n1 * n2);

    std::vector<double> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    const auto ranks = midranks(pooled);
    const double rank_sum_x = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(n1), 0.0);
    const double u_x = rank_sum_x - static_cast<double>(n1 * (n1 + 1)) / 2.0;

    TestResult r;
    r.statistic = u_x;
    r.statistic_alt = std::min(u_x, nn - u_x);
    const auto delta = cliffs_delta(x, y);
    r.effect_size = delta.delta;
    r.effect_label = delta.label;

    if (n1 + n2 <= kMannWhitneyExactMaxPooled && !has_ties(pooled)) {
        r.p_value = two_sided_from_counts(mann_whitney_exact_counts(n1, n2), static_cast<std::size_t>(std::lround(u_x)));
        r.method = "mann-whitney exact";
        return r;
    }

    const double n = static_cast<double>(n1 + n2);
    const double variance = nn / 12.0 * ((n + 1.0) - tie_term(pooled) / (n * (n - 1.0)));
    if (variance <= 0.0) {
        r.p_value = 1.0;
    } else {
        const double z = std::max(0.0, std::abs(u_x - nn / 2.0) - 0.5) / std::sqrt(variance);
        r.p_value = normal_two_sided_p(z);
    }
    r.method = "mann-whitney normal approximation (tie and continuity corrected)";
    return r;
}

TestResult wilcoxon_signed_rank(std::span<const double> pre, std::span<const double> post) {
    if (pre.size() != post.size()) throw ContractViolation("pre and post must have equal length");
    require_nonempty(pre, "paired samples");

    std::vector<double> diffs;
    for (std::size_t i = 0; i < pre.size(); ++i) {
        const double d = post[i] - pre[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) throw DegenerateInputError("all paired differences are zero");

    std::vector<double> magnitudes;
    magnitudes.reserve(diffs.size());
    for (double d : diffs) magnitudes.push_back(std::abs(d));
    const auto ranks = midranks(magnitudes);

    double w_plus = 0.0;
    double w_minus = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i) (diffs[i] > 0 ? w_plus : w_minus) += ranks[i];

    TestResult r;
    r.statistic = w_minus;
    r.statistic_alt = w_plus;
    r.effect_size = (w_plus - w_minus) / (w_plus + w_minus);
    r.effect_label = effect_label(r.effect_size);

    const std::size_t n = diffs.size();
    if (n <= kWilcoxonExactMaxPairs) {
        // Midranks are multiples of 1/2, so doubled ranks are integers.
        std::vector<std::size_t> doubled;
        std::size_t max_sum = 0;
        for (double rank : ranks) {
            doubled.push_back(static_cast<std::size_t>(std::lround(2.0 * rank)));
            max_sum += doubled.back();
        }
        std::vector<std::uint64_t> counts(max_sum + 1, 0);
        counts[0] = 1;
        std::size_t reach = 0;
        for (auto w : doubled) {
            for (std::size_t s = reach + 1; s-- > 0;) {
                if (counts[s] != 0) counts[s + w] += counts[s];
            }
            reach += w;
        }
        r.p_value = two_sided_from_counts(counts, static_cast<std::size_t>(std::lround(2.0 * w_plus)));
        r.method = "wilcoxon signed-rank exact";
        return r;
    }

    const double nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    const double variance = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term(magnitudes) / 48.0;
    const double z = std::max(0.0, std::abs(w_plus - mean) - 0.5) / std::sqrt(variance);
    r.p_value = normal_two_sided_p(z);
    r.method = "wilcoxon signed-rank normal approximation (tie and continuity corrected)";
    return r;
}

}  // namespace neurowise::stats
