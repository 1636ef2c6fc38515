#include "neurowise/service/transcript.hpp"

#include <sstream>

#include "neurowise/core/errors.hpp"

namespace neurowise::service {

nlohmann::json transcript_line(const Session& session, const TurnRecord& turn) {
    nlohmann::json categories = nlohmann::json::array();
    for (auto c : turn.categories) categories.push_back(c);

    nlohmann::json j{{"session_id", session.id},
                     {"condition", session.condition},
                     {"scenario_id", session.scenario.id},
                     {"turn_index", turn.turn_index},
                     {"user_text", turn.user_text},
                     {"categories", categories},
                     {"stress_before", turn.stress_before},
                     {"stress_after", turn.stress_after},
                     {"applied_delta", turn.applied_delta},
                     {"triggered", turn.triggered}};
    if (turn.support) {
        j["interpretation"] = turn.support->interpretation;
        j["suggestions"] = turn.support->suggestions;
    }
    j["partner_text"] = turn.partner_text;
    j["lifecycle"] = turn.lifecycle;
    j["ts"] = format_timestamp(turn.ts);
    return j;
}

std::string export_jsonl(const Session& session) {
    std::string out;
    for (const auto& turn : session.turns) {
        out += transcript_line(session, turn).dump();
        out += '\n';
    }
    return out;
}

TranscriptLine parse_transcript_line(const nlohmann::json& j) {
    try {
        TranscriptLine line;
        line.session_id = j.at("session_id").get<std::string>();
        line.condition = j.at("condition").get<Condition>();
        line.scenario_id = j.at("scenario_id").get<std::string>();
        auto& r = line.record;
        r.turn_index = j.at("turn_index").get<std::size_t>();
        r.user_text = j.at("user_text").get<std::string>();
        for (const auto& c : j.at("categories")) r.categories.insert(c.get<CommunicationCategory>());
        r.stress_before = j.at("stress_before").get<int>();
        r.stress_after = j.at("stress_after").get<int>();
        r.applied_delta = j.at("applied_delta").get<int>();
        r.triggered = j.at("triggered").get<bool>();
        if (j.contains("interpretation")) {
            SupportPayload p;
            p.interpretation = j.at("interpretation").get<std::string>();
            p.suggestions = j.value("suggestions", std::vector<Suggestion>{});
            p.triggering_delta = r.applied_delta;
            r.support = std::move(p);
        }
        r.partner_text = j.at("partner_text").get<std::string>();
        r.lifecycle = j.at("lifecycle").get<Lifecycle>();
        r.ts = parse_timestamp(j.at("ts").get<std::string>());
        return line;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("transcript line: ") + e.what());
    }
}

std::vector<TranscriptLine> parse_jsonl(std::string_view text) {
    std::vector<TranscriptLine> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw SchemaError("transcript line " + std::to_string(n) + " is not JSON");
        try {
            out.push_back(parse_transcript_line(j));
        } catch (const SchemaError& e) {
            throw SchemaError("transcript line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace neurowise::service
