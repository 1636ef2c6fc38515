#include "neurowise/agents/provider.hpp"

#include "neurowise/core/errors.hpp"

namespace neurowise::agents {

std::string_view to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::Classifier: return "classifier";
        case AgentKind::Partner: return "partner";
        case AgentKind::Interpreter: return "interpreter";
        case AgentKind::Coach: return "coach";
    }
    return "unknown";
}

std::string_view to_string(ProviderError::Kind kind) {
    switch (kind) {
        case ProviderError::Kind::Auth: return "auth";
        case ProviderError::Kind::Timeout: return "timeout";
        case ProviderError::Kind::Unavailable: return "unavailable";
        case ProviderError::Kind::Rejected: return "rejected";
        case ProviderError::Kind::Malformed: return "malformed";
    }
    return "unknown";
}

void ProviderRequest::validate() const {
    if (messages.empty()) throw ContractViolation("provider request has no messages");
    if (temperature < 0.0 || temperature > 2.0) {
        throw ContractViolation("temperature outside [0, 2]");
    }
    if (max_tokens <= 0) throw ContractViolation("max_tokens must be positive");
}

std::string ProviderRequest::canonical() const {
    nlohmann::json j;
    j["agent"] = std::string(to_string(agent));
    auto& msgs = j["messages"] = nlohmann::json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    j["temperature"] = temperature;
    j["max_tokens"] = max_tokens;
    j["bindings"] = bindings;  // std::map keeps key order stable
    return j.dump();
}

void ProviderResponse::validate() const {
    if (content.empty() && finish_reason == "stop") {
        throw ProviderError(ProviderError::Kind::Malformed,
                            "empty completion with normal finish reason");
    }
}

}  // namespace neurowise::agents
