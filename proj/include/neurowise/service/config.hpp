#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "neurowise/core/domain.hpp"
#include "neurowise/stress/engine.hpp"

namespace neurowise::service {

struct ProviderSettings {
    std::string kind = "mock";  // "mock" | "live"
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-4o-mini";
    std::chrono::milliseconds timeout{30000};
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{250};
};

struct ServiceConfig {
    ProviderSettings provider;
    stress::DeltaTable delta_table = stress::DeltaTable::defaults();
    stress::TriggerPolicy trigger_policy;
    BandThresholds bands;
    std::vector<ScenarioConfig> scenarios;

    std::string host = "127.0.0.1";
    int port = 8080;
    std::chrono::minutes idle_timeout{30};
    std::size_t classifier_context = 4;
    std::size_t agent_window = 6;
    /// Seeds condition assignment and session ids; random when absent.
    std::optional<std::uint64_t> seed;

    std::filesystem::path prompts_dir;
    std::filesystem::path mock_templates_dir;
    std::filesystem::path lexicon_path;
    /// Write-ahead JSONL directory; persistence is off when empty.
    std::filesystem::path transcripts_dir;

    /// Defaults with every data path rooted at `data_dir` and the pizza-night scenario.
    static ServiceConfig defaults(const std::filesystem::path& data_dir);
    /// Reads a JSON config. Relative paths resolve against the file's directory.
    static ServiceConfig load(const std::filesystem::path& path);
    static ServiceConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

    const ScenarioConfig* find_scenario(const std::string& id) const;
    void validate() const;
};

/// Alex's Friday pizza night, disrupted by Thai takeaway.
ScenarioConfig pizza_night_scenario();

}  // namespace neurowise::service
