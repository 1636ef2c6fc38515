// neurowise: coaching service entry point.

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "neurowise/core/errors.hpp"
#include "neurowise/core/prompt_template.hpp"
#include "neurowise/service/config.hpp"
#include "neurowise/service/http_api.hpp"
#include "neurowise/service/orchestrator.hpp"
#include "neurowise/service/transcript.hpp"

namespace {

using namespace neurowise;

constexpr int kExitSchema = 2;
constexpr int kExitMismatch = 4;

service::ServiceConfig load_config(const std::string& path) {
    if (!path.empty()) return service::ServiceConfig::load(path);
#ifdef NEUROWISE_DEFAULT_DATA_DIR
    return service::ServiceConfig::defaults(NEUROWISE_DEFAULT_DATA_DIR);
#else
    return service::ServiceConfig::defaults("data");
#endif
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NeuroWise communication-coaching service"};
    app.require_subcommand(1);

    std::string config_path, transcript, host;
    int port = -1;
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--config", config_path, "Service config JSON");
    serve->add_option("--host", host, "Override server.host");
    serve->add_option("--port", port, "Override server.port")->check(CLI::Range(0, 65535));

    auto* replay = app.add_subcommand("replay", "Re-run an exported transcript and compare trajectories");
    replay->add_option("--config", config_path, "Service config JSON");
    replay->add_option("--transcript", transcript, "Exported JSONL")->required();

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

    try {
        auto config = load_config(config_path);
        if (!host.empty()) config.host = host;
        if (port >= 0) config.port = port;

        if (*serve) {
            auto orch = service::Orchestrator::from_config(config);
            if (!config.transcripts_dir.empty() && std::filesystem::exists(config.transcripts_dir)) {
                spdlog::info("recovered {} session(s)", orch->recover(config.transcripts_dir));
            }
            return service::serve(*orch);
        }

        // Replay never writes transcripts of its own.
        config.transcripts_dir.clear();
        auto orch = service::Orchestrator::from_config(config);
        const auto original = service::parse_jsonl(read_text_file(transcript));
        const auto rerun = service::replay_transcript(*orch, original);
        std::string diff;
        if (!service::same_trajectory(original, rerun, &diff)) {
            std::cout << "MISMATCH " << diff << '\n';
            return kExitMismatch;
        }
        std::cout << "IDENTICAL " << original.size() << " turn(s)\n";
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
