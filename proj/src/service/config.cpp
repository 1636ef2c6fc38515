#include "neurowise/service/config.hpp"

#include <fstream>
#include <set>

#include "neurowise/core/errors.hpp"

namespace neurowise::service {

ScenarioConfig pizza_night_scenario() {
    ScenarioConfig s;
    s.id = "friday-pizza-night";
    s.persona_brief =
        "Alex is an autistic adult who shares a flat with the user. Every Friday they order pizza "
        "at six and eat at seven; the routine makes the end of the week predictable. Tonight the "
        "user came home with Thai takeaway instead, without warning. Alex is sensitive to strong "
        "smells, and the curry smell fills the flat. Alex speaks literally and directly.";
    s.opener_text =
        "You brought Thai food. It is Friday. Friday is pizza night. And the curry smell is very "
        "strong. I did not know the plan changed.";
    s.initial_stress = 65;
    s.sensory_triggers = {"strong curry smell", "unexpected changes to the Friday routine",
                          "uncertainty about what happens next"};
    s.turn_cap = 20;
    s.resolution_stress_max = 30;
    return s;
}

ServiceConfig ServiceConfig::defaults(const std::filesystem::path& data_dir) {
    ServiceConfig c;
    c.scenarios = {pizza_night_scenario()};
    c.prompts_dir = data_dir / "prompts";
    c.mock_templates_dir = data_dir / "mock";
    c.lexicon_path = data_dir / "lexicon.tsv";
    return c;
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base) {
    ServiceConfig c;
    c.scenarios = {pizza_night_scenario()};
    try {
        if (j.contains("provider")) {
            const auto& p = j.at("provider");
            c.provider.kind = p.value("kind", c.provider.kind);
            c.provider.endpoint = p.value("endpoint", c.provider.endpoint);
            c.provider.model = p.value("model", c.provider.model);
            c.provider.timeout = std::chrono::milliseconds(p.value("timeout_ms", 30000));
            c.provider.max_attempts = p.value("max_attempts", 3);
            c.provider.initial_backoff = std::chrono::milliseconds(p.value("initial_backoff_ms", 250));
        }
        if (j.contains("delta_table")) c.delta_table = j.at("delta_table").get<stress::DeltaTable>();
        if (j.contains("trigger_policy")) c.trigger_policy = j.at("trigger_policy").get<stress::TriggerPolicy>();
        if (j.contains("bands")) {
            c.bands.elevated_from = j.at("bands").value("elevated_from", 30);
            c.bands.high_from = j.at("bands").value("high_from", 70);
        }
        if (j.contains("scenarios")) c.scenarios = j.at("scenarios").get<std::vector<ScenarioConfig>>();
        if (j.contains("server")) {
            const auto& s = j.at("server");
            c.host = s.value("host", c.host);
            c.port = s.value("port", c.port);
            c.idle_timeout = std::chrono::minutes(s.value("idle_timeout_minutes", 30));
        }
        c.classifier_context = j.value("classifier_context", c.classifier_context);
        c.agent_window = j.value("agent_window", c.agent_window);
        if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();

        const auto& paths = j.contains("paths") ? j.at("paths") : nlohmann::json::object();
        c.prompts_dir = resolve(base, paths.value("prompts", "prompts"));
        c.mock_templates_dir = resolve(base, paths.value("mock_templates", "mock"));
        c.lexicon_path = resolve(base, paths.value("lexicon", "lexicon.tsv"));
        if (paths.contains("transcripts")) c.transcripts_dir = resolve(base, paths.at("transcripts").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open config " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw SchemaError("config " + path.string() + " is not valid JSON");
    return from_json(j, path.parent_path());
}

const ScenarioConfig* ServiceConfig::find_scenario(const std::string& id) const {
    for (const auto& s : scenarios) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

void ServiceConfig::validate() const {
    if (provider.kind != "mock" && provider.kind != "live") {
        throw SchemaError("provider.kind must be 'mock' or 'live'");
    }
    if (provider.max_attempts < 1) throw SchemaError("provider.max_attempts must be >= 1");
    delta_table.validate();
    trigger_policy.validate();
    bands.validate();
    if (scenarios.empty()) throw SchemaError("at least one scenario is required");
    std::set<std::string> ids;
    for (const auto& s : scenarios) {
        s.validate();
        if (!ids.insert(s.id).second) throw SchemaError("duplicate scenario id '" + s.id + "'");
    }
    if (port < 0 || port > 65535) throw SchemaError("server.port outside [0, 65535]");
    if (idle_timeout.count() < 1) throw SchemaError("idle_timeout_minutes must be >= 1");
}

}  // namespace neurowise::service
