#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "neurowise/agents/provider.hpp"

namespace neurowise::agents {

struct HttpReply {
    int status = 0;
    std::string body;
};

/// Connection refused, DNS failure, read timeout.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    /// Throws TransportError when no HTTP response was received.
    virtual HttpReply post(const std::string& url, const std::map<std::string, std::string>& headers,
                           const std::string& body, std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib backed transport; supports http:// and https:// URLs.
std::unique_ptr<HttpTransport> make_default_transport();

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{250};
    double multiplier = 2.0;

    /// Delay before attempt number `attempt` (2-based: the first retry is attempt 2).
    std::chrono::milliseconds backoff_before(int attempt) const;
};

struct LiveProviderConfig {
    /// Full chat-completions URL, e.g. https://api.openai.com/v1/chat/completions
    std::string endpoint;
    std::string model = "gpt-4o-mini";
    std::string api_key;
    std::chrono::milliseconds timeout{30000};
    RetryPolicy retry;
};

/// OpenAI-compatible chat-completion client with bounded exponential-backoff retries.
class LiveProvider final : public ChatProvider {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    LiveProvider(LiveProviderConfig config, std::unique_ptr<HttpTransport> transport,
                 Sleeper sleeper = {});

    ProviderResponse complete(const ProviderRequest& request) override;
    std::string name() const override { return "live:" + config_.model; }

    /// Request body in the chat-completion wire format.
    std::string encode(const ProviderRequest& request) const;
    /// Parses a 200 response body; throws ProviderError(Malformed).
    ProviderResponse decode(const std::string& body) const;

private:
    ProviderResponse attempt(const std::string& body);

    LiveProviderConfig config_;
    std::unique_ptr<HttpTransport> transport_;
    Sleeper sleeper_;
};

}  // namespace neurowise::agents
