#include "neurowise/agents/agents.hpp"

#include <spdlog/spdlog.h>

#include "neurowise/core/errors.hpp"

namespace neurowise::agents {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += sep;
        out += s;
    }
    return out;
}

ProviderRequest make_request(const ConversationContext& ctx, const AgentSpec& spec,
                             std::map<std::string, std::string> bindings) {
    ProviderRequest req;
    req.agent = spec.role;
    req.temperature = spec.temperature;
    req.max_tokens = spec.max_reply_tokens;
    req.messages.push_back({"system", spec.system_prompt.render(bindings)});
    req.bindings = std::move(bindings);

    const auto window = ctx.messages.size() > ctx.window ? ctx.messages.last(ctx.window) : ctx.messages;
    if (spec.role == AgentKind::Partner) {
        // Alex speaks as the assistant; the user's lines stay user turns.
        for (const auto& m : window) {
            req.messages.push_back({m.role == Role::Partner ? "assistant" : "user", m.text});
        }
    } else {
        req.messages.push_back({"user", "Conversation so far:\n" + req.bindings.at("recent_transcript")});
    }
    return req;
}

void require_trigger(const TriggerContext& trigger, const char* who) {
    if (!stress::should_trigger_support(trigger.applied_delta, trigger.policy)) {
        throw ContractViolation(std::string(who) + " called without a trigger (delta " +
                                std::to_string(trigger.applied_delta) + ")");
    }
}

AgentSpec load_spec(const std::filesystem::path& path, AgentKind role, double temperature, int max_tokens) {
    AgentSpec spec{role, PromptTemplate::load(path, agent_placeholders()), max_tokens, temperature};
    spec.validate();
    return spec;
}

}  // namespace

const std::set<std::string>& agent_placeholders() {
    static const std::set<std::string> names{"persona",          "stress_band",       "stress_level",
                                             "sensory_triggers", "recent_transcript", "categories"};
    return names;
}

void AgentSpec::validate() const {
    if (max_reply_tokens <= 0) throw SchemaError("max_reply_tokens must be positive");
    if (temperature < 0.0 || temperature > 2.0) throw SchemaError("temperature outside [0, 2]");
    for (const auto& p : system_prompt.placeholders()) {
        if (!agent_placeholders().contains(p)) throw SchemaError("unknown placeholder {" + p + "}");
    }
}

AgentSet AgentSet::load(const std::filesystem::path& dir) {
    return AgentSet{load_spec(dir / "partner.txt", AgentKind::Partner, 0.7, 200),
                    load_spec(dir / "interpreter.txt", AgentKind::Interpreter, 0.2, 300),
                    load_spec(dir / "coach.txt", AgentKind::Coach, 0.2, 300)};
}

std::map<std::string, std::string> agent_bindings(const ConversationContext& ctx, const StressState& stress,
                                                  const CategorySet& categories) {
    const auto window = ctx.messages.size() > ctx.window ? ctx.messages.last(ctx.window) : ctx.messages;
    return {{"persona", ctx.scenario.persona_brief},
            {"stress_band", std::string(to_string(stress.band))},
            {"stress_level", std::to_string(stress.level)},
            {"sensory_triggers", join(ctx.scenario.sensory_triggers, "; ")},
            {"recent_transcript", stress::render_transcript(window)},
            {"categories", join_categories(categories)}};
}

Message generate_partner_reply(const ConversationContext& ctx, const StressState& stress,
                               const CategorySet& last_categories, ChatProvider& provider,
                               const AgentSpec& spec, Timestamp timestamp) {
    if (ctx.messages.empty()) return Message{Role::Partner, ctx.scenario.opener_text, 0, timestamp};
    if (ctx.messages.back().role != Role::User) {
        throw ContractViolation("partner reply requested but the last message is not the user's");
    }
    auto response = provider.complete(make_request(ctx, spec, agent_bindings(ctx, stress, last_categories)));
    std::string text = trim(response.content);
    if (text.rfind("Alex:", 0) == 0) text = trim(std::string_view(text).substr(5));
    if (text.empty()) {
        throw ProviderError(ProviderError::Kind::Malformed,
                            "partner reply is empty (finish reason " + response.finish_reason + ")");
    }
    return Message{Role::Partner, std::move(text), ctx.messages.size(), timestamp};
}

std::string generate_interpretation(const ConversationContext& ctx, const StressState& stress,
                                    const TriggerContext& trigger, ChatProvider& provider,
                                    const AgentSpec& spec) {
    require_trigger(trigger, "interpreter");
    auto response = provider.complete(make_request(ctx, spec, agent_bindings(ctx, stress, trigger.categories)));
    std::string text = trim(response.content);
    if (text.empty()) {
        throw ProviderError(ProviderError::Kind::Malformed,
                            "interpretation is empty (finish reason " + response.finish_reason + ")");
    }
    return text;
}

std::vector<Suggestion> parse_suggestions(std::string_view content) {
    const auto open = content.find_first_of("{[");
    const auto close = content.find_last_of("}]");
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) return {};
    auto j = nlohmann::json::parse(content.substr(open, close - open + 1), nullptr, false);
    if (j.is_discarded()) return {};
    const nlohmann::json* list = &j;
    if (j.is_object()) {
        if (!j.contains("suggestions")) return {};
        list = &j["suggestions"];
    }
    if (!list->is_array()) return {};

    std::vector<Suggestion> out;
    for (const auto& item : *list) {
        if (!item.is_object() || !item.contains("strategy") || !item.contains("text")) continue;
        if (!item["strategy"].is_string() || !item["text"].is_string()) continue;
        try {
            Suggestion s{parse_strategy(item["strategy"].get<std::string>()), trim(item["text"].get<std::string>())};
            if (!s.text.empty()) out.push_back(std::move(s));
        } catch (const SchemaError& e) {
            spdlog::warn("coach suggestion dropped: {}", e.what());
        }
    }
    return out;
}

std::vector<Suggestion> generate_coaching(const ConversationContext& ctx, const StressState& stress,
                                          const TriggerContext& trigger, ChatProvider& provider,
                                          const AgentSpec& spec, const stress::Lexicon* safety_filter) {
    require_trigger(trigger, "coach");
    auto response = provider.complete(make_request(ctx, spec, agent_bindings(ctx, stress, trigger.categories)));

    std::vector<Suggestion> out;
    for (auto& s : parse_suggestions(response.content)) {
        if (safety_filter) {
            const auto flagged = safety_filter->categories(s.text);
            if (flagged.contains(CommunicationCategory::Pressure) ||
                flagged.contains(CommunicationCategory::Invalidation)) {
                spdlog::warn("coach suggestion dropped as pressuring: '{}'", s.text);
                continue;
            }
        }
        out.push_back(std::move(s));
        if (out.size() == 3) break;
    }
    if (out.empty()) throw CoachingUnavailable("coach returned no usable suggestions");
    return out;
}

}  // namespace neurowise::agents
