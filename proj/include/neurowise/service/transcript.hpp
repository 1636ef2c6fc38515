#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "neurowise/service/session.hpp"

namespace neurowise::service {

/// One JSONL line of a session export.
struct TranscriptLine {
    std::string session_id;
    Condition condition = Condition::Baseline;
    std::string scenario_id;
    TurnRecord record;
};

/// Keys: session_id, condition, scenario_id, turn_index, user_text, categories,
/// stress_before, stress_after, applied_delta, triggered, interpretation?, suggestions?,
/// partner_text, lifecycle, ts. Stress fields are present for both conditions.
nlohmann::json transcript_line(const Session& session, const TurnRecord& turn);

/// Full internal export, one line per turn, each terminated by '\n'.
std::string export_jsonl(const Session& session);

TranscriptLine parse_transcript_line(const nlohmann::json& j);

/// Throws SchemaError naming the offending line.
std::vector<TranscriptLine> parse_jsonl(std::string_view text);

}  // namespace neurowise::service
