#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "neurowise/core/domain.hpp"

namespace neurowise::service {

enum class Lifecycle { Active, ResolvedEnd, TurnCapEnd, Abandoned };

enum class Gender { Woman, Man, Other };

enum class ContactFrequency { LowModerate, High };

/// Randomization stratum: conditions are balanced within each gender x contact-frequency cell.
struct StratumKey {
    Gender gender = Gender::Woman;
    ContactFrequency contact_frequency = ContactFrequency::LowModerate;

    auto operator<=>(const StratumKey&) const = default;
};

/// Internal record of one processed user turn. Carries stress for both conditions.
struct TurnRecord {
    std::size_t turn_index = 0;  // 1-based count of user turns
    std::string user_text;
    CategorySet categories;
    int stress_before = 0;
    int stress_after = 0;
    int applied_delta = 0;
    bool triggered = false;
    std::optional<SupportPayload> support;
    std::string partner_text;
    Lifecycle lifecycle = Lifecycle::Active;
    Timestamp ts{};

    bool operator==(const TurnRecord&) const = default;
};

struct TriggerEvent {
    std::size_t turn_index = 0;
    SupportPayload payload;

    bool operator==(const TriggerEvent&) const = default;
};

struct Session {
    std::string id;
    Condition condition = Condition::Baseline;
    StratumKey stratum;
    ScenarioConfig scenario;
    std::vector<Message> messages;
    StressState stress;
    std::vector<TriggerEvent> trigger_events;
    std::vector<TurnRecord> turns;
    Lifecycle lifecycle = Lifecycle::Active;
    Timestamp created_at{};
    Timestamp last_activity{};

    std::size_t turn_count() const { return turns.size(); }
};

/// What the client receives for one turn. Baseline results never carry stress or support.
struct TurnResult {
    std::size_t turn_index = 0;
    Message partner_message;
    std::optional<StressState> stress_view;
    std::optional<SupportPayload> support;
    Lifecycle session_lifecycle = Lifecycle::Active;
};

std::string_view to_string(Lifecycle l);
std::string_view to_string(Gender g);
std::string_view to_string(ContactFrequency f);
Lifecycle parse_lifecycle(std::string_view s);
Gender parse_gender(std::string_view s);
ContactFrequency parse_contact_frequency(std::string_view s);

void to_json(nlohmann::json& j, Lifecycle l);
void from_json(const nlohmann::json& j, Lifecycle& l);
void to_json(nlohmann::json& j, const StratumKey& s);
void from_json(const nlohmann::json& j, StratumKey& s);

/// Optional fields are omitted, never null.
void to_json(nlohmann::json& j, const TurnResult& r);

/// The client-facing view: stress and trigger events appear only for NeuroWise sessions.
nlohmann::json gated_view(const Session& session);

}  // namespace neurowise::service
