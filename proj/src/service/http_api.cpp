#include "neurowise/service/http_api.hpp"

#include <atomic>
#include <condition_variable>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "neurowise/core/errors.hpp"

namespace neurowise::service {

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view kind, std::string_view message) {
    send_json(res, status, {{"error", kind}, {"message", message}});
}

// Runs a handler and maps the library's exceptions to HTTP statuses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
    try {
        fn();
    } catch (const NotFoundError& e) {
        send_error(res, 404, "not_found", e.what());
    } catch (const ConflictError& e) {
        send_error(res, 409, "conflict", e.what());
    } catch (const ContractViolation& e) {
        send_error(res, 400, "invalid_request", e.what());
    } catch (const SchemaError& e) {
        send_error(res, 400, "invalid_request", e.what());
    } catch (const nlohmann::json::exception& e) {
        send_error(res, 400, "invalid_request", e.what());
    } catch (const stress::ClassificationUnavailable& e) {
        send_error(res, 502, "classification_unavailable", e.what());
    } catch (const agents::ProviderError& e) {
        send_error(res, 502, "provider_" + std::string(agents::to_string(e.kind())), e.what());
    } catch (const std::exception& e) {
        spdlog::error("unhandled error: {}", e.what());
        send_error(res, 500, "internal", e.what());
    }
}

nlohmann::json parse_body(const httplib::Request& req) {
    auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw SchemaError("request body must be a JSON object");
    return j;
}

}  // namespace

void mount_routes(httplib::Server& server, Orchestrator& orch) {
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"status", "ok"}});
    });

    server.Post("/sessions", [&orch](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto body = parse_body(req);
            if (!body.contains("stratum")) throw SchemaError("missing field 'stratum'");
            if (!body.contains("scenario_id")) throw SchemaError("missing field 'scenario_id'");
            const auto stratum = body.at("stratum").get<StratumKey>();
            const auto session = orch.create_session(stratum, body.at("scenario_id").get<std::string>());
            send_json(res, 201, gated_view(session));
        });
    });

    server.Post(R"(/sessions/([0-9a-zA-Z_-]+)/messages)", [&orch](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto body = parse_body(req);
            if (!body.contains("text") || !body.at("text").is_string()) throw SchemaError("missing string field 'text'");
            const auto result = orch.process_turn(req.matches[1], body.at("text").get<std::string>());
            send_json(res, 200, result);
        });
    });

    server.Post(R"(/sessions/([0-9a-zA-Z_-]+)/end)", [&orch](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { send_json(res, 200, gated_view(orch.end_session(req.matches[1]))); });
    });

    server.Get(R"(/sessions/([0-9a-zA-Z_-]+))", [&orch](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { send_json(res, 200, gated_view(orch.snapshot(req.matches[1]))); });
    });

    server.Get(R"(/sessions/([0-9a-zA-Z_-]+)/export)", [&orch](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            res.status = 200;
            res.set_content(orch.export_session(req.matches[1]), "application/x-ndjson");
        });
    });
}

int serve(Orchestrator& orch) {
    httplib::Server server;
    mount_routes(server, orch);

    std::mutex m;
    std::condition_variable cv;
    bool stopping = false;
    std::thread sweeper([&] {
        std::unique_lock lock(m);
        while (!cv.wait_for(lock, std::chrono::minutes(1), [&] { return stopping; })) {
            if (auto n = orch.sweep_idle(); n > 0) spdlog::info("marked {} idle session(s) abandoned", n);
        }
    });

    const auto& cfg = orch.config();
    spdlog::info("listening on {}:{}", cfg.host, cfg.port);
    const bool ok = server.listen(cfg.host, cfg.port);
    {
        std::lock_guard lock(m);
        stopping = true;
    }
    cv.notify_all();
    sweeper.join();
    if (!ok) {
        spdlog::error("could not listen on {}:{}", cfg.host, cfg.port);
        return 1;
    }
    return 0;
}

}  // namespace neurowise::service
