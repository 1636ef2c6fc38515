#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "neurowise/agents/provider.hpp"
#include "neurowise/core/domain.hpp"
#include "neurowise/core/prompt_template.hpp"
#include "neurowise/stress/engine.hpp"
#include "neurowise/stress/lexicon.hpp"

namespace neurowise::agents {

/// Placeholders available to Partner, Interpreter and Coach prompt templates.
const std::set<std::string>& agent_placeholders();

struct AgentSpec {
    AgentKind role = AgentKind::Partner;
    PromptTemplate system_prompt;
    int max_reply_tokens = 200;
    double temperature = 0.7;

    void validate() const;
};

/// Prompt set for the three generative roles.
struct AgentSet {
    AgentSpec partner;
    AgentSpec interpreter;
    AgentSpec coach;

    /// Reads partner.txt, interpreter.txt and coach.txt from `prompt_dir`. Partner samples
    /// at 0.7, Interpreter and Coach at 0.2.
    static AgentSet load(const std::filesystem::path& prompt_dir);
};

/// The conversation an agent call is about.
struct ConversationContext {
    const ScenarioConfig& scenario;
    std::span<const Message> messages;
    /// How many trailing messages are rendered into {recent_transcript}.
    std::size_t window = 6;
};

/// The single-turn increase that licensed an Interpreter or Coach call.
struct TriggerContext {
    int applied_delta = 0;
    CategorySet categories;
    stress::TriggerPolicy policy;
};

/// The Coach produced no usable suggestion. Support is omitted for the turn.
class CoachingUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::map<std::string, std::string> agent_bindings(const ConversationContext& ctx, const StressState& stress,
                                                  const CategorySet& categories);

/// Empty context yields the scenario opener verbatim; otherwise the last message must be
/// the user's. The returned message carries turn_index = messages.size().
Message generate_partner_reply(const ConversationContext& ctx, const StressState& stress,
                               const CategorySet& last_categories, ChatProvider& provider,
                               const AgentSpec& spec, Timestamp timestamp);

/// Throws ContractViolation when the trigger does not meet its policy.
std::string generate_interpretation(const ConversationContext& ctx, const StressState& stress,
                                    const TriggerContext& trigger, ChatProvider& provider,
                                    const AgentSpec& spec);

/// 1-3 tagged suggestions. Suggestions the lexicon flags as pressure or invalidation are
/// dropped. Throws CoachingUnavailable when nothing usable remains.
std::vector<Suggestion> generate_coaching(const ConversationContext& ctx, const StressState& stress,
                                          const TriggerContext& trigger, ChatProvider& provider,
                                          const AgentSpec& spec, const stress::Lexicon* safety_filter);

/// Parses Coach output ({"suggestions": [{"strategy", "text"}]}) without filtering.
std::vector<Suggestion> parse_suggestions(std::string_view content);

}  // namespace neurowise::agents
