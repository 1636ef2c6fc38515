#include "neurowise/service/session.hpp"

#include "neurowise/core/errors.hpp"

namespace neurowise::service {

std::string_view to_string(Lifecycle l) {
    switch (l) {
        case Lifecycle::Active: return "active";
        case Lifecycle::ResolvedEnd: return "resolved_end";
        case Lifecycle::TurnCapEnd: return "turn_cap_end";
        case Lifecycle::Abandoned: return "abandoned";
    }
    return "unknown";
}

std::string_view to_string(Gender g) {
    switch (g) {
        case Gender::Woman: return "woman";
        case Gender::Man: return "man";
        case Gender::Other: return "other";
    }
    return "unknown";
}

std::string_view to_string(ContactFrequency f) {
    return f == ContactFrequency::High ? "high" : "low_moderate";
}

Lifecycle parse_lifecycle(std::string_view s) {
    for (auto l : {Lifecycle::Active, Lifecycle::ResolvedEnd, Lifecycle::TurnCapEnd, Lifecycle::Abandoned}) {
        if (to_string(l) == s) return l;
    }
    throw SchemaError("unknown lifecycle '" + std::string(s) + "'");
}

Gender parse_gender(std::string_view s) {
    for (auto g : {Gender::Woman, Gender::Man, Gender::Other}) {
        if (to_string(g) == s) return g;
    }
    throw SchemaError("unknown gender '" + std::string(s) + "'");
}

ContactFrequency parse_contact_frequency(std::string_view s) {
    for (auto f : {ContactFrequency::LowModerate, ContactFrequency::High}) {
        if (to_string(f) == s) return f;
    }
    throw SchemaError("unknown contact_frequency '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, Lifecycle l) { j = std::string(to_string(l)); }
void from_json(const nlohmann::json& j, Lifecycle& l) { l = parse_lifecycle(j.get<std::string>()); }

void to_json(nlohmann::json& j, const StratumKey& s) {
    j = {{"gender", std::string(to_string(s.gender))},
         {"contact_frequency", std::string(to_string(s.contact_frequency))}};
}

void from_json(const nlohmann::json& j, StratumKey& s) {
    if (!j.is_object() || !j.contains("gender") || !j.contains("contact_frequency")) {
        throw SchemaError("stratum needs gender and contact_frequency");
    }
    s.gender = parse_gender(j.at("gender").get<std::string>());
    s.contact_frequency = parse_contact_frequency(j.at("contact_frequency").get<std::string>());
}

void to_json(nlohmann::json& j, const TurnResult& r) {
    j = {{"turn_index", r.turn_index},
         {"partner_message", r.partner_message},
         {"session_lifecycle", r.session_lifecycle}};
    if (r.stress_view) j["stress_view"] = *r.stress_view;
    if (r.support) j["support"] = *r.support;
}

nlohmann::json gated_view(const Session& session) {
    nlohmann::json j{{"id", session.id},
                     {"condition", session.condition},
                     {"scenario_id", session.scenario.id},
                     {"lifecycle", session.lifecycle},
                     {"turn_count", session.turn_count()},
                     {"messages", session.messages}};
    if (session.condition == Condition::NeuroWise) {
        j["stress"] = session.stress;
        auto& events = j["trigger_events"] = nlohmann::json::array();
        for (const auto& e : session.trigger_events) {
            events.push_back({{"turn_index", e.turn_index}, {"support", e.payload}});
        }
    }
    return j;
}

}  // namespace neurowise::service
