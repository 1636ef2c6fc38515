#include "neurowise/stress/engine.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include <spdlog/spdlog.h>

#include "neurowise/core/errors.hpp"

namespace neurowise::stress {

using CC = CommunicationCategory;

DeltaTable DeltaTable::defaults() {
    DeltaTable t;
    t.set(CC::Validation, -10);
    t.set(CC::OptionsGiving, -8);
    t.set(CC::SensoryAccommodation, -8);
    t.set(CC::Neutral, 0);
    t.set(CC::Pressure, 12);
    t.set(CC::Invalidation, 15);
    return t;
}

int DeltaTable::aggregate(const CategorySet& categories) const {
    int total = 0;
    if (aggregation == Aggregation::Sum) {
        for (auto c : categories) total += delta(c);
    } else {
        // Largest magnitude wins; a tie between a raise and a drop resolves to the raise.
        for (auto c : categories) {
            const int d = delta(c);
            if (std::abs(d) > std::abs(total) || (std::abs(d) == std::abs(total) && d > total)) total = d;
        }
    }
    if (per_turn_cap) total = std::clamp(total, -*per_turn_cap, *per_turn_cap);
    return total;
}

void DeltaTable::validate() const {
    for (auto c : {CC::Validation, CC::OptionsGiving, CC::SensoryAccommodation}) {
        if (delta(c) > 0) throw SchemaError(std::string(to_string(c)) + " delta must be <= 0");
    }
    for (auto c : {CC::Invalidation, CC::Pressure}) {
        if (delta(c) < 0) throw SchemaError(std::string(to_string(c)) + " delta must be >= 0");
    }
    if (delta(CC::Neutral) != 0) throw SchemaError("neutral delta must be 0");
    if (per_turn_cap && *per_turn_cap < 1) throw SchemaError("per_turn_cap must be >= 1");
}

void TriggerPolicy::validate() const {
    if (min_increase < 1) throw SchemaError("trigger min_increase must be >= 1");
}

StressUpdate update_stress(const StressState& state, const ClassificationResult& classification,
                           const DeltaTable& table, const BandThresholds& thresholds) {
    const int raw = table.aggregate(classification.categories);
    const int level = std::clamp(state.level + raw, 0, 100);
    const int applied = level - state.level;
    return {StressState::at(level, applied, thresholds), applied};
}

bool should_trigger_support(int applied_delta, const TriggerPolicy& policy) {
    return applied_delta >= policy.min_increase;
}

namespace {

std::string fold_category_name(std::string s) {
    for (auto& c : s) {
        if (c == '-' || c == ' ') c = '_';
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (s == "options" || s == "option_giving" || s == "offering_options") s = "options_giving";
    if (s == "sensory" || s == "sensory_accommodations") s = "sensory_accommodation";
    return s;
}

}  // namespace

ClassificationResult parse_classification(std::string_view content, bool* degraded) {
    auto degrade = [&](const std::string& why) {
        spdlog::warn("unparseable classifier output ({}); scoring as neutral", why);
        if (degraded) *degraded = true;
        return ClassificationResult{{CC::Neutral}, "degraded: " + why};
    };
    if (degraded) *degraded = false;

    const auto open = content.find('{');
    const auto close = content.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
        return degrade("no JSON object");
    }
    nlohmann::json j = nlohmann::json::parse(content.substr(open, close - open + 1), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("categories") || !j["categories"].is_array()) {
        return degrade("missing categories array");
    }

    ClassificationResult out;
    out.categories.clear();
    for (const auto& item : j["categories"]) {
        if (!item.is_string()) continue;
        try {
            out.categories.insert(parse_category(fold_category_name(item.get<std::string>())));
        } catch (const SchemaError&) {
            spdlog::warn("classifier returned unknown category '{}'", item.get<std::string>());
        }
    }
    if (out.categories.empty()) return degrade("no known categories");
    if (out.categories.size() > 1) out.categories.erase(CC::Neutral);
    if (j.contains("rationale") && j["rationale"].is_string()) out.rationale = j["rationale"].get<std::string>();
    return out;
}

const std::set<std::string>& classifier_placeholders() {
    static const std::set<std::string> names{"message", "recent_transcript"};
    return names;
}

std::string render_transcript(std::span<const Message> messages, std::string_view partner_name) {
    std::string out;
    for (const auto& m : messages) {
        out += m.role == Role::Partner ? std::string(partner_name) : std::string("User");
        out += ": ";
        out += m.text;
        out += '\n';
    }
    return out;
}

MessageClassifier::MessageClassifier(std::shared_ptr<agents::ChatProvider> provider,
                                     PromptTemplate system_prompt, std::size_t context_window)
    : provider_(std::move(provider)), system_prompt_(std::move(system_prompt)),
      context_window_(context_window) {
    if (!provider_) throw ContractViolation("classifier needs a provider");
}

agents::ProviderRequest MessageClassifier::build_request(std::string_view text,
                                                         std::span<const Message> context) const {
    const auto window = context.size() > context_window_ ? context.last(context_window_) : context;
    agents::ProviderRequest req;
    req.agent = agents::AgentKind::Classifier;
    req.temperature = 0.0;
    req.max_tokens = 128;
    req.bindings = {{"message", std::string(text)}, {"recent_transcript", render_transcript(window)}};
    req.messages = {{"system", system_prompt_.render(req.bindings)}, {"user", std::string(text)}};
    return req;
}

ClassificationResult MessageClassifier::classify(std::string_view text,
                                                 std::span<const Message> context) const {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) throw ContractViolation("cannot classify an empty message");
    const auto request = build_request(text, context);
    agents::ProviderResponse response;
    try {
        response = provider_->complete(request);
    } catch (const agents::ProviderError& e) {
        throw ClassificationUnavailable(std::string("classification unavailable: ") + e.what());
    }
    return parse_classification(response.content);
}

std::string_view to_string(Aggregation a) { return a == Aggregation::Sum ? "sum" : "most_extreme"; }

void to_json(nlohmann::json& j, const DeltaTable& t) {
    j = nlohmann::json::object();
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        j["deltas"][std::string(to_string(static_cast<CC>(i)))] = t.deltas[i];
    }
    j["aggregation"] = std::string(to_string(t.aggregation));
    j["per_turn_cap"] = t.per_turn_cap ? nlohmann::json(*t.per_turn_cap) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, DeltaTable& t) {
    t = DeltaTable::defaults();
    if (j.contains("deltas")) {
        for (const auto& [name, value] : j.at("deltas").items()) t.set(parse_category(name), value.get<int>());
    }
    if (j.contains("aggregation")) {
        const auto a = j.at("aggregation").get<std::string>();
        if (a == "sum") t.aggregation = Aggregation::Sum;
        else if (a == "most_extreme") t.aggregation = Aggregation::MostExtreme;
        else throw SchemaError("unknown aggregation '" + a + "'");
    }
    if (j.contains("per_turn_cap")) {
        t.per_turn_cap = j.at("per_turn_cap").is_null() ? std::nullopt
                                                        : std::optional<int>(j.at("per_turn_cap").get<int>());
    }
    t.validate();
}

void to_json(nlohmann::json& j, const TriggerPolicy& p) { j = {{"min_increase", p.min_increase}}; }

void from_json(const nlohmann::json& j, TriggerPolicy& p) {
    p.min_increase = j.value("min_increase", 10);
    p.validate();
}

}  // namespace neurowise::stress
