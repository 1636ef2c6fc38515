#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "neurowise/core/domain.hpp"
#include "neurowise/stats/csv.hpp"
#include "neurowise/stats/test_result.hpp"

namespace neurowise::stats {

enum class Feature { StressBar, Interpreter, Coach, Overall };
inline constexpr std::array kFeatures{Feature::StressBar, Feature::Interpreter, Feature::Coach, Feature::Overall};
std::string_view to_string(Feature f);  // "stress_bar" | "interpreter" | "coach" | "overall"

/// One participant. Deficit items are stored as answered (1-7); the composite
/// reverse-scores them so that higher means more deficit framing.
struct StudyRecord {
    std::string participant_id;
    Condition condition = Condition::Baseline;
    std::array<double, 2> deficit_pre{};
    std::array<double, 2> deficit_post{};
    double flexibility_pre = 0.0;
    double flexibility_post = 0.0;
    int turns_to_end = 0;
    int final_stress = 0;
    std::map<Feature, double> ratings;  // NeuroWise only

    double deficit_composite_pre() const;
    double deficit_composite_post() const;
    double deficit_change() const { return deficit_composite_post() - deficit_composite_pre(); }
};

inline constexpr double kLikertMin = 1.0;
inline constexpr double kLikertMax = 7.0;
double reverse_score(double item);  // 8 - item on the 1-7 scale

/// participant_id, condition, deficit_pre_1, deficit_pre_2, deficit_post_1, deficit_post_2,
/// flexibility_pre, flexibility_post, turns_to_end, final_stress, and optionally
/// rating_stress_bar, rating_interpreter, rating_coach, rating_overall (blank cells allowed).
std::vector<StudyRecord> parse_study_records(const CsvTable& table);
std::vector<StudyRecord> read_study_records(const std::filesystem::path& path);
std::string write_study_records(const std::vector<StudyRecord>& records);

struct WithinTest {
    std::optional<TestResult> result;
    std::string note;  // why the test was not run
};

struct ConditionSummary {
    std::size_t n = 0;
    double deficit_pre_mean = 0.0;
    double deficit_post_mean = 0.0;
    double deficit_change_mean = 0.0;
    WithinTest deficit_within;
    double flexibility_pre_mean = 0.0;
    double flexibility_post_mean = 0.0;
    WithinTest flexibility_within;
    double turns_median = 0.0;
    double final_stress_median = 0.0;
};

struct FeatureSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    std::optional<double> helpful_share;  // fraction rated >= cutoff
};

struct StudyReport {
    std::map<Condition, ConditionSummary> conditions;
    TestResult deficit_change_between;  // x = NeuroWise changes, y = Baseline changes
    std::optional<double> alpha_pre;
    std::optional<double> alpha_post;
    std::string alpha_note;
    TestResult turns_between;
    TestResult final_stress_between;
    std::map<Feature, FeatureSummary> features;
    std::optional<double> helpful_cutoff;
};

/// Throws DegenerateInputError when either condition has fewer than two records.
StudyReport run_analysis(const std::vector<StudyRecord>& records, std::optional<double> helpful_cutoff = std::nullopt);

nlohmann::json to_json(const StudyReport& report);
std::string to_table(const StudyReport& report);

}  // namespace neurowise::stats
