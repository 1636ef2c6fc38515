#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace neurowise::agents {

/// Which generative role a request serves. Carried as request metadata; never sent on the wire.
enum class AgentKind { Classifier, Partner, Interpreter, Coach };

std::string_view to_string(AgentKind kind);

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct ProviderRequest {
    AgentKind agent = AgentKind::Partner;
    std::vector<ChatMessage> messages;
    double temperature = 0.7;
    int max_tokens = 256;
    /// Template bindings used to render the system prompt. The mock provider keys on these.
    std::map<std::string, std::string> bindings;

    /// Throws ContractViolation if messages is empty or sampling params are out of range.
    void validate() const;
    /// Stable serialization of everything that defines the request.
    std::string canonical() const;
};

struct ProviderResponse {
    std::string content;
    std::string finish_reason = "stop";
    std::int64_t latency_ms = 0;
    /// Where the content came from: a mock template tag or the live model name.
    std::string source_tag;

    /// Throws ProviderError(Malformed) if content is empty with a normal finish reason.
    void validate() const;
};

class ProviderError : public std::runtime_error {
public:
    enum class Kind {
        Auth,         // credential rejected; not retried
        Timeout,      // unreachable or timed out; retried
        Unavailable,  // 429 / 5xx; retried
        Rejected,     // other 4xx; not retried
        Malformed,    // response body not a chat completion; not retried
    };

    ProviderError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }
    bool retryable() const noexcept { return kind_ == Kind::Timeout || kind_ == Kind::Unavailable; }

private:
    Kind kind_;
};

std::string_view to_string(ProviderError::Kind kind);

/// A chat-completion backend. Implementations must be safe to call from several threads.
class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual ProviderResponse complete(const ProviderRequest& request) = 0;
    virtual std::string name() const = 0;
};

}  // namespace neurowise::agents
