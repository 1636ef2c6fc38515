#include "neurowise/agents/live_provider.hpp"

#include <cmath>
#include <thread>
#include <utility>

#include <spdlog/spdlog.h>

#include <httplib.h>

#include "neurowise/core/errors.hpp"

namespace neurowise::agents {

namespace {

using Kind = ProviderError::Kind;

class HttplibTransport final : public HttpTransport {
public:
    HttpReply post(const std::string& url, const std::map<std::string, std::string>& headers,
                   const std::string& body, std::chrono::milliseconds timeout) override {
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) throw TransportError("endpoint has no scheme: " + url);
        const auto path_start = url.find('/', scheme_end + 3);
        const std::string origin = url.substr(0, path_start);
        const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

        httplib::Client client(origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());

        httplib::Headers h;
        for (const auto& [k, v] : headers) h.emplace(k, v);
        auto res = client.Post(path, h, body, "application/json");
        if (!res) throw TransportError("request to " + origin + " failed: " + httplib::to_string(res.error()));
        return HttpReply{res->status, res->body};
    }
};

}  // namespace

std::unique_ptr<HttpTransport> make_default_transport() { return std::make_unique<HttplibTransport>(); }

std::chrono::milliseconds RetryPolicy::backoff_before(int attempt) const {
    if (attempt <= 1) return std::chrono::milliseconds{0};
    const double scale = std::pow(multiplier, attempt - 2);
    return std::chrono::milliseconds{static_cast<std::int64_t>(initial_backoff.count() * scale)};
}

LiveProvider::LiveProvider(LiveProviderConfig config, std::unique_ptr<HttpTransport> transport,
                           Sleeper sleeper)
    : config_(std::move(config)), transport_(std::move(transport)), sleeper_(std::move(sleeper)) {
    if (config_.endpoint.empty()) throw ContractViolation("live provider needs an endpoint");
    if (config_.retry.max_attempts < 1) throw ContractViolation("max_attempts must be >= 1");
    if (!transport_) transport_ = make_default_transport();
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string LiveProvider::encode(const ProviderRequest& request) const {
    nlohmann::json body;
    body["model"] = config_.model;
    auto& msgs = body["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_tokens;
    return body.dump();
}

ProviderResponse LiveProvider::decode(const std::string& body) const {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(Kind::Malformed, std::string("response is not JSON: ") + e.what());
    }
    try {
        const auto& choice = j.at("choices").at(0);
        ProviderResponse out;
        const auto& content = choice.at("message").at("content");
        out.content = content.is_null() ? std::string{} : content.get<std::string>();
        if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
            out.finish_reason = choice["finish_reason"].get<std::string>();
        }
        out.source_tag = j.value("model", config_.model);
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(Kind::Malformed, std::string("unexpected completion shape: ") + e.what());
    }
}

ProviderResponse LiveProvider::attempt(const std::string& body) {
    std::map<std::string, std::string> headers{{"Content-Type", "application/json"}};
    if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;

    HttpReply reply;
    try {
        reply = transport_->post(config_.endpoint, headers, body, config_.timeout);
    } catch (const TransportError& e) {
        throw ProviderError(Kind::Timeout, e.what());
    }
    if (reply.status == 401 || reply.status == 403) {
        throw ProviderError(Kind::Auth, "provider rejected credential (HTTP " + std::to_string(reply.status) + ")");
    }
    if (reply.status == 408) throw ProviderError(Kind::Timeout, "provider timed out (HTTP 408)");
    if (reply.status == 429 || reply.status >= 500) {
        throw ProviderError(Kind::Unavailable, "provider unavailable (HTTP " + std::to_string(reply.status) + ")");
    }
    if (reply.status != 200) {
        throw ProviderError(Kind::Rejected, "provider rejected request (HTTP " + std::to_string(reply.status) + ")");
    }
    auto response = decode(reply.body);
    response.validate();
    return response;
}

ProviderResponse LiveProvider::complete(const ProviderRequest& request) {
    request.validate();
    const std::string body = encode(request);
    const auto started = std::chrono::steady_clock::now();

    for (int n = 1;; ++n) {
        if (n > 1) sleeper_(config_.retry.backoff_before(n));
        try {
            auto response = attempt(body);
            response.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                      std::chrono::steady_clock::now() - started)
                                      .count();
            return response;
        } catch (const ProviderError& e) {
            if (!e.retryable() || n >= config_.retry.max_attempts) {
                spdlog::warn("{} request failed after {} attempt(s): {}", to_string(request.agent), n, e.what());
                throw;
            }
            spdlog::info("{} request attempt {} failed ({}), retrying", to_string(request.agent), n, e.what());
        }
    }
}

}  // namespace neurowise::agents
