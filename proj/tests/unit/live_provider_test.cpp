#include <gtest/gtest.h>

#include <deque>

#include "neurowise/agents/live_provider.hpp"
#include "neurowise/core/errors.hpp"

using namespace neurowise;
using namespace neurowise::agents;
using Kind = ProviderError::Kind;

namespace {

struct Call {
    std::string url;
    std::map<std::string, std::string> headers;
    std::string body;
};

class FakeTransport : public HttpTransport {
public:
    FakeTransport(std::deque<HttpReply> replies, std::vector<Call>* calls, bool unreachable = false)
        : replies_(std::move(replies)), calls_(calls), unreachable_(unreachable) {}

    HttpReply post(const std::string& url, const std::map<std::string, std::string>& headers,
                   const std::string& body, std::chrono::milliseconds) override {
        calls_->push_back({url, headers, body});
        if (unreachable_) throw TransportError("connection refused");
        auto r = replies_.front();
        if (replies_.size() > 1) replies_.pop_front();
        return r;
    }

private:
    std::deque<HttpReply> replies_;
    std::vector<Call>* calls_;
    bool unreachable_;
};

const std::string kOk = R"({"model": "m-1", "choices": [{"message": {"content": "hi there"}, "finish_reason": "stop"}]})";

ProviderRequest request() {
    ProviderRequest r;
    r.agent = AgentKind::Coach;
    r.messages = {{"system", "be kind"}, {"user", "help"}};
    r.temperature = 0.2;
    r.max_tokens = 200;
    return r;
}

struct Harness {
    std::vector<Call> calls;
    std::vector<std::chrono::milliseconds> sleeps;

    LiveProvider make(std::deque<HttpReply> replies, bool unreachable = false) {
        LiveProviderConfig cfg;
        cfg.endpoint = "http://127.0.0.1:9/v1/chat/completions";
        cfg.api_key = "k";
        return LiveProvider(cfg, std::make_unique<FakeTransport>(std::move(replies), &calls, unreachable),
                            [this](std::chrono::milliseconds d) { sleeps.push_back(d); });
    }
};

Kind kind_of(LiveProvider& p) {
    try {
        p.complete(request());
    } catch (const ProviderError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error";
    return Kind::Rejected;
}

}  // namespace

TEST(LiveProvider, SuccessDecodesContentAndModel) {
    Harness h;
    auto p = h.make({{200, kOk}});
    const auto r = p.complete(request());
    EXPECT_EQ(r.content, "hi there");
    EXPECT_EQ(r.finish_reason, "stop");
    EXPECT_EQ(r.source_tag, "m-1");
    ASSERT_EQ(h.calls.size(), 1u);
    EXPECT_EQ(h.calls[0].headers.at("Authorization"), "Bearer k");
}

TEST(LiveProvider, EncodesChatCompletionBody) {
    Harness h;
    auto p = h.make({{200, kOk}});
    const auto j = nlohmann::json::parse(p.encode(request()));
    EXPECT_EQ(j.at("model"), "gpt-4o-mini");
    EXPECT_EQ(j.at("messages").size(), 2u);
    EXPECT_EQ(j.at("messages")[0].at("role"), "system");
    EXPECT_DOUBLE_EQ(j.at("temperature").get<double>(), 0.2);
    EXPECT_EQ(j.at("max_tokens"), 200);
}

TEST(LiveProvider, UnreachableEndpointTimesOutAfterThreeAttempts) {
    Harness h;
    auto p = h.make({}, true);
    EXPECT_EQ(kind_of(p), Kind::Timeout);
    EXPECT_EQ(h.calls.size(), 3u);
    EXPECT_EQ(h.sleeps, (std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(250), std::chrono::milliseconds(500)}));
}

TEST(LiveProvider, AuthIsNotRetried) {
    Harness h;
    auto p = h.make({{401, "{}"}});
    EXPECT_EQ(kind_of(p), Kind::Auth);
    EXPECT_EQ(h.calls.size(), 1u);
}

TEST(LiveProvider, RateLimitIsRetried) {
    Harness h;
    auto p = h.make({{429, ""}, {503, ""}, {200, kOk}});
    EXPECT_EQ(p.complete(request()).content, "hi there");
    EXPECT_EQ(h.calls.size(), 3u);
}

TEST(LiveProvider, ClientErrorIsRejectedWithoutRetry) {
    Harness h;
    auto p = h.make({{400, "bad"}});
    EXPECT_EQ(kind_of(p), Kind::Rejected);
    EXPECT_EQ(h.calls.size(), 1u);
}

TEST(LiveProvider, MalformedBodies) {
    Harness a;
    auto p = a.make({{200, "<html>"}});
    EXPECT_EQ(kind_of(p), Kind::Malformed);
    Harness b;
    auto q = b.make({{200, R"({"choices": []})"}});
    EXPECT_EQ(kind_of(q), Kind::Malformed);
}

TEST(LiveProvider, NeedsEndpoint) {
    EXPECT_THROW(LiveProvider(LiveProviderConfig{}, nullptr), ContractViolation);
}

TEST(RetryPolicyTest, ExponentialBackoff) {
    const RetryPolicy r;
    EXPECT_EQ(r.backoff_before(1).count(), 0);
    EXPECT_EQ(r.backoff_before(2).count(), 250);
    EXPECT_EQ(r.backoff_before(3).count(), 500);
    EXPECT_EQ(r.backoff_before(4).count(), 1000);
}
