#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "neurowise/core/domain.hpp"
#include "neurowise/stats/validation.hpp"
#include "neurowise/stress/engine.hpp"

namespace neurowise::service {

struct Script {
    std::string id;
    stats::CorpusLabel label = stats::CorpusLabel::LowStress;
    std::vector<std::string> turns;
};

struct ScriptCorpus {
    std::string scenario_id;
    std::vector<Script> scripts;

    std::size_t turn_count() const;
};

/// {"scenario_id": ..., "scripts": [{"id", "label", "turns": [...]}]}. Throws SchemaError.
ScriptCorpus parse_script_corpus(const nlohmann::json& j);
ScriptCorpus load_script_corpus(const std::filesystem::path& path);

struct ScoredTurn {
    int turn_index = 0;  // 1-based
    CategorySet categories;
    int stress_after = 0;
};

/// Runs each user turn through the classifier and the stress update starting from the
/// scenario's initial level. No partner replies and no lifecycle cut-off.
std::vector<ScoredTurn> score_script(const Script& script, const ScenarioConfig& scenario,
                                     const stress::MessageClassifier& classifier, const stress::DeltaTable& table,
                                     const BandThresholds& bands = {});

/// (conversation_id, turn_index) -> rater scores, from a CSV with rater_* columns.
using RatingSheet = std::map<std::pair<std::string, int>, std::vector<double>>;
RatingSheet read_rating_sheet(const std::filesystem::path& path);

/// Joins algorithm scores with the rating sheet. Throws SchemaError listing any
/// scripted turn that has no rating row, or any rating row with no scripted turn.
std::vector<stats::AnnotatedTurn> annotate_corpus(const ScriptCorpus& corpus, const RatingSheet& ratings,
                                                  const ScenarioConfig& scenario,
                                                  const stress::MessageClassifier& classifier,
                                                  const stress::DeltaTable& table, const BandThresholds& bands = {});

}  // namespace neurowise::service
