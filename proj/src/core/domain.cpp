#include "neurowise/core/domain.hpp"

#include <array>
#include <cstdio>
#include <ctime>
#include <utility>

#include "neurowise/core/errors.hpp"

namespace neurowise {

namespace {

template <typename Enum, std::size_t N>
using NameTable = std::array<std::pair<Enum, std::string_view>, N>;

constexpr NameTable<Condition, 2> kConditionNames{{
    {Condition::Baseline, "baseline"},
    {Condition::NeuroWise, "neurowise"},
}};

constexpr NameTable<CommunicationCategory, kCategoryCount> kCategoryNames{{
    {CommunicationCategory::Validation, "validation"},
    {CommunicationCategory::Invalidation, "invalidation"},
    {CommunicationCategory::Pressure, "pressure"},
    {CommunicationCategory::OptionsGiving, "options_giving"},
    {CommunicationCategory::SensoryAccommodation, "sensory_accommodation"},
    {CommunicationCategory::Neutral, "neutral"},
}};

constexpr NameTable<Role, 2> kRoleNames{{
    {Role::User, "user"},
    {Role::Partner, "partner"},
}};

constexpr NameTable<StressBand, 3> kBandNames{{
    {StressBand::Calm, "calm"},
    {StressBand::Elevated, "elevated"},
    {StressBand::High, "high"},
}};

constexpr NameTable<Strategy, 3> kStrategyNames{{
    {Strategy::Validate, "validate"},
    {Strategy::AccommodateSensory, "accommodate-sensory"},
    {Strategy::OfferOptions, "offer-options"},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(const NameTable<Enum, N>& table, Enum value) {
    for (const auto& [e, name] : table) {
        if (e == value) return name;
    }
    return "unknown";
}

template <typename Enum, std::size_t N>
Enum parse_name(const NameTable<Enum, N>& table, std::string_view text, const char* what) {
    for (const auto& [e, name] : table) {
        if (name == text) return e;
    }
    throw SchemaError(std::string("unknown ") + what + " '" + std::string(text) + "'");
}

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw SchemaError(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

}  // namespace

Timestamp now_utc() {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(Clock::now());
}

std::string format_timestamp(Timestamp ts) {
    const auto ms_since_epoch = ts.time_since_epoch().count();
    auto secs = static_cast<std::time_t>(ms_since_epoch / 1000);
    auto millis = static_cast<int>(ms_since_epoch % 1000);
    if (millis < 0) {
        millis += 1000;
        secs -= 1;
    }
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, millis);
    return buf;
}

Timestamp parse_timestamp(std::string_view text) {
    std::tm tm{};
    int millis = 0;
    const std::string s(text);
    int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ", &tm.tm_year, &tm.tm_mon,
                        &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &millis);
    if (n != 7) {
        millis = 0;
        n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2dZ", &tm.tm_year, &tm.tm_mon,
                        &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec);
        if (n != 6) throw SchemaError("malformed timestamp '" + s + "'");
    }
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    const std::time_t secs = timegm(&tm);
    return Timestamp(std::chrono::milliseconds(static_cast<std::int64_t>(secs) * 1000 + millis));
}

void BandThresholds::validate() const {
    if (elevated_from <= 0 || high_from <= elevated_from || high_from > 100) {
        throw SchemaError("band thresholds must satisfy 0 < elevated_from < high_from <= 100");
    }
}

StressBand band_of(int level, const BandThresholds& thresholds) {
    if (level < 0 || level > 100) {
        throw ContractViolation("stress level " + std::to_string(level) + " outside [0, 100]");
    }
    if (level < thresholds.elevated_from) return StressBand::Calm;
    if (level < thresholds.high_from) return StressBand::Elevated;
    return StressBand::High;
}

StressState StressState::at(int level, int last_delta, const BandThresholds& thresholds) {
    return StressState{level, band_of(level, thresholds), last_delta};
}

void ScenarioConfig::validate() const {
    if (id.empty()) throw SchemaError("scenario id must be nonempty");
    if (opener_text.empty()) throw SchemaError("scenario '" + id + "': opener_text must be nonempty");
    if (initial_stress < 0 || initial_stress > 100) {
        throw SchemaError("scenario '" + id + "': initial_stress outside [0, 100]");
    }
    if (resolution_stress_max < 0 || resolution_stress_max > 100) {
        throw SchemaError("scenario '" + id + "': resolution_stress_max outside [0, 100]");
    }
    if (resolution_stress_max >= initial_stress) {
        throw SchemaError("scenario '" + id + "': resolution_stress_max must be below initial_stress");
    }
    if (turn_cap < 1) throw SchemaError("scenario '" + id + "': turn_cap must be >= 1");
}

std::string_view to_string(Condition c) { return name_of(kConditionNames, c); }
std::string_view to_string(CommunicationCategory c) { return name_of(kCategoryNames, c); }
std::string_view to_string(Role r) { return name_of(kRoleNames, r); }
std::string_view to_string(StressBand b) { return name_of(kBandNames, b); }
std::string_view to_string(Strategy s) { return name_of(kStrategyNames, s); }

Condition parse_condition(std::string_view s) { return parse_name(kConditionNames, s, "condition"); }
CommunicationCategory parse_category(std::string_view s) {
    return parse_name(kCategoryNames, s, "category");
}
Role parse_role(std::string_view s) { return parse_name(kRoleNames, s, "role"); }
StressBand parse_band(std::string_view s) { return parse_name(kBandNames, s, "band"); }
Strategy parse_strategy(std::string_view s) { return parse_name(kStrategyNames, s, "strategy"); }

std::string join_categories(const CategorySet& categories, std::string_view sep) {
    std::string out;
    for (auto c : categories) {
        if (!out.empty()) out += sep;
        out += to_string(c);
    }
    return out;
}

void to_json(nlohmann::json& j, Condition c) { j = std::string(to_string(c)); }
void from_json(const nlohmann::json& j, Condition& c) { c = parse_condition(j.get<std::string>()); }
void to_json(nlohmann::json& j, CommunicationCategory c) { j = std::string(to_string(c)); }
void from_json(const nlohmann::json& j, CommunicationCategory& c) {
    c = parse_category(j.get<std::string>());
}
void to_json(nlohmann::json& j, Role r) { j = std::string(to_string(r)); }
void from_json(const nlohmann::json& j, Role& r) { r = parse_role(j.get<std::string>()); }
void to_json(nlohmann::json& j, StressBand b) { j = std::string(to_string(b)); }
void from_json(const nlohmann::json& j, StressBand& b) { b = parse_band(j.get<std::string>()); }
void to_json(nlohmann::json& j, Strategy s) { j = std::string(to_string(s)); }
void from_json(const nlohmann::json& j, Strategy& s) { s = parse_strategy(j.get<std::string>()); }

void to_json(nlohmann::json& j, const StressState& s) {
    j = {{"level", s.level}, {"band", s.band}, {"last_delta", s.last_delta}};
}

void from_json(const nlohmann::json& j, StressState& s) {
    s.level = require(j, "level").get<int>();
    s.band = require(j, "band").get<StressBand>();
    s.last_delta = require(j, "last_delta").get<int>();
    if (s.level < 0 || s.level > 100) throw SchemaError("stress level outside [0, 100]");
}

void to_json(nlohmann::json& j, const Message& m) {
    j = {{"role", m.role},
         {"text", m.text},
         {"turn_index", m.turn_index},
         {"timestamp", format_timestamp(m.timestamp)}};
}

void from_json(const nlohmann::json& j, Message& m) {
    m.role = require(j, "role").get<Role>();
    m.text = require(j, "text").get<std::string>();
    if (m.text.empty()) throw SchemaError("message text must be nonempty");
    m.turn_index = require(j, "turn_index").get<std::size_t>();
    m.timestamp = parse_timestamp(require(j, "timestamp").get<std::string>());
}

void to_json(nlohmann::json& j, const ScenarioConfig& s) {
    j = {{"id", s.id},
         {"persona_brief", s.persona_brief},
         {"opener_text", s.opener_text},
         {"initial_stress", s.initial_stress},
         {"sensory_triggers", s.sensory_triggers},
         {"turn_cap", s.turn_cap},
         {"resolution_stress_max", s.resolution_stress_max}};
}

void from_json(const nlohmann::json& j, ScenarioConfig& s) {
    s.id = require(j, "id").get<std::string>();
    s.persona_brief = j.value("persona_brief", std::string{});
    s.opener_text = require(j, "opener_text").get<std::string>();
    s.initial_stress = j.value("initial_stress", 65);
    s.sensory_triggers = j.value("sensory_triggers", std::vector<std::string>{});
    s.turn_cap = j.value("turn_cap", 20);
    s.resolution_stress_max = j.value("resolution_stress_max", 30);
    s.validate();
}

void to_json(nlohmann::json& j, const Suggestion& s) {
    j = {{"strategy", s.strategy}, {"text", s.text}};
}

void from_json(const nlohmann::json& j, Suggestion& s) {
    s.strategy = require(j, "strategy").get<Strategy>();
    s.text = require(j, "text").get<std::string>();
}

void to_json(nlohmann::json& j, const SupportPayload& p) {
    j = {{"interpretation", p.interpretation},
         {"suggestions", p.suggestions},
         {"triggering_delta", p.triggering_delta}};
}

void from_json(const nlohmann::json& j, SupportPayload& p) {
    p.interpretation = require(j, "interpretation").get<std::string>();
    p.suggestions = require(j, "suggestions").get<std::vector<Suggestion>>();
    p.triggering_delta = require(j, "triggering_delta").get<int>();
    if (p.suggestions.empty()) throw SchemaError("support payload needs at least one suggestion");
}

}  // namespace neurowise
