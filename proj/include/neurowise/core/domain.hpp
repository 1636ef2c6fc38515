#pragma once

#include <chrono>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace neurowise {

using Clock = std::chrono::system_clock;
/// UTC instant, millisecond resolution (the wire format carries milliseconds).
using Timestamp = std::chrono::time_point<Clock, std::chrono::milliseconds>;

Timestamp now_utc();
std::string format_timestamp(Timestamp ts);
Timestamp parse_timestamp(std::string_view text);

enum class Condition { Baseline, NeuroWise };

enum class CommunicationCategory {
    Validation,
    Invalidation,
    Pressure,
    OptionsGiving,
    SensoryAccommodation,
    Neutral,
};

inline constexpr std::size_t kCategoryCount = 6;

/// Ordered by enum value so iteration and serialization are deterministic.
using CategorySet = std::set<CommunicationCategory>;

enum class Role { User, Partner };

enum class StressBand { Calm, Elevated, High };

/// Lower bounds of the Elevated and High bands. Calm is [0, elevated_from).
struct BandThresholds {
    int elevated_from = 30;
    int high_from = 70;

    void validate() const;
    bool operator==(const BandThresholds&) const = default;
};

/// Throws ContractViolation when level is outside [0, 100].
StressBand band_of(int level, const BandThresholds& thresholds = {});

struct StressState {
    int level = 0;
    StressBand band = StressBand::Calm;
    int last_delta = 0;

    /// Builds a state whose band is derived from level.
    static StressState at(int level, int last_delta = 0, const BandThresholds& thresholds = {});

    bool operator==(const StressState&) const = default;
};

struct Message {
    Role role = Role::Partner;
    std::string text;
    std::size_t turn_index = 0;
    Timestamp timestamp{};

    bool operator==(const Message&) const = default;
};

struct ScenarioConfig {
    std::string id;
    std::string persona_brief;
    std::string opener_text;
    int initial_stress = 65;
    std::vector<std::string> sensory_triggers;
    int turn_cap = 20;
    int resolution_stress_max = 30;

    /// Throws SchemaError on violated invariants.
    void validate() const;
    bool operator==(const ScenarioConfig&) const = default;
};

enum class Strategy { Validate, AccommodateSensory, OfferOptions };

struct Suggestion {
    Strategy strategy = Strategy::Validate;
    std::string text;

    bool operator==(const Suggestion&) const = default;
};

struct SupportPayload {
    std::string interpretation;
    std::vector<Suggestion> suggestions;
    int triggering_delta = 0;

    bool operator==(const SupportPayload&) const = default;
};

// Canonical wire names. Parsers throw SchemaError on unknown names.
std::string_view to_string(Condition c);
std::string_view to_string(CommunicationCategory c);
std::string_view to_string(Role r);
std::string_view to_string(StressBand b);
std::string_view to_string(Strategy s);

Condition parse_condition(std::string_view s);
CommunicationCategory parse_category(std::string_view s);
Role parse_role(std::string_view s);
StressBand parse_band(std::string_view s);
Strategy parse_strategy(std::string_view s);

std::string join_categories(const CategorySet& categories, std::string_view sep = ", ");

void to_json(nlohmann::json& j, Condition c);
void from_json(const nlohmann::json& j, Condition& c);
void to_json(nlohmann::json& j, CommunicationCategory c);
void from_json(const nlohmann::json& j, CommunicationCategory& c);
void to_json(nlohmann::json& j, Role r);
void from_json(const nlohmann::json& j, Role& r);
void to_json(nlohmann::json& j, StressBand b);
void from_json(const nlohmann::json& j, StressBand& b);
void to_json(nlohmann::json& j, Strategy s);
void from_json(const nlohmann::json& j, Strategy& s);

void to_json(nlohmann::json& j, const StressState& s);
void from_json(const nlohmann::json& j, StressState& s);
void to_json(nlohmann::json& j, const Message& m);
void from_json(const nlohmann::json& j, Message& m);
void to_json(nlohmann::json& j, const ScenarioConfig& s);
void from_json(const nlohmann::json& j, ScenarioConfig& s);
void to_json(nlohmann::json& j, const Suggestion& s);
void from_json(const nlohmann::json& j, Suggestion& s);
void to_json(nlohmann::json& j, const SupportPayload& p);
void from_json(const nlohmann::json& j, SupportPayload& p);

}  // namespace neurowise
