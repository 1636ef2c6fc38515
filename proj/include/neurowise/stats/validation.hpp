#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "neurowise/stats/csv.hpp"
#include "neurowise/stats/descriptive.hpp"
#include "neurowise/stats/reliability.hpp"

namespace neurowise::stats {

enum class CorpusLabel { LowStress, HighStress };

std::string_view to_string(CorpusLabel label);  // "low_stress" | "high_stress"
CorpusLabel parse_corpus_label(std::string_view s);

/// One scripted turn scored by human raters and by the stress algorithm.
struct AnnotatedTurn {
    std::string conversation_id;
    int turn_index = 0;
    std::vector<double> rater_scores;
    double algorithm_score = 0.0;
    CorpusLabel corpus_label = CorpusLabel::LowStress;
};

/// Columns: conversation_id, turn_index, rater_1..rater_k, algorithm_score, corpus_label.
/// Collects every bad cell and throws one SchemaError listing them by line.
std::vector<AnnotatedTurn> parse_annotations(const CsvTable& table);
std::vector<AnnotatedTurn> read_annotations(const std::filesystem::path& path);
std::string write_annotations(const std::vector<AnnotatedTurn>& turns);

struct ValidationReport {
    std::size_t conversations = 0;
    std::size_t turns = 0;
    std::size_t raters = 0;
    std::size_t low_conversations = 0;
    std::size_t high_conversations = 0;
    Icc inter_rater;
    double confidence = 0.95;
    Correlation algorithm_vs_raters;  // mean rater score vs algorithm score, per turn
    double discriminant_d = 0.0;      // final algorithm score, HighStress minus LowStress
    double low_final_mean = 0.0;
    double high_final_mean = 0.0;
};

/// Throws DegenerateInputError with fewer than 2 raters or fewer than 2 conversations
/// per corpus label (plus whatever the statistics themselves reject).
ValidationReport run_validation(const std::vector<AnnotatedTurn>& turns, double confidence = 0.95);

nlohmann::json to_json(const ValidationReport& report);
std::string to_table(const ValidationReport& report);

}  // namespace neurowise::stats
