#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "neurowise/agents/agents.hpp"
#include "neurowise/agents/provider.hpp"
#include "neurowise/core/prompt_template.hpp"
#include "neurowise/service/assignment.hpp"
#include "neurowise/service/config.hpp"
#include "neurowise/service/session.hpp"
#include "neurowise/service/transcript.hpp"
#include "neurowise/stress/engine.hpp"
#include "neurowise/stress/lexicon.hpp"

namespace neurowise::service {

/// In-process session map. Reads take a shared lock on the map and on the slot;
/// turns hold the slot's turn mutex for their whole duration.
class SessionStore {
public:
    struct Slot {
        std::mutex turn_mutex;
        mutable std::shared_mutex state_mutex;
        Session session;
    };

    void insert(Session session);
    /// Throws NotFoundError.
    std::shared_ptr<Slot> find(const std::string& id) const;
    std::vector<std::shared_ptr<Slot>> all() const;
    std::size_t size() const;

private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, std::shared_ptr<Slot>> slots_;
};

/// Everything the turn pipeline needs besides configuration.
struct PipelineParts {
    std::shared_ptr<agents::ChatProvider> provider;
    agents::AgentSet agents;
    PromptTemplate classifier_prompt;
    /// Drops coach suggestions that read as pressure; optional.
    std::optional<stress::Lexicon> safety_lexicon;
};

/// Builds provider, prompts and lexicon from the config's paths. A live provider reads
/// its credential from NEUROWISE_API_KEY.
PipelineParts load_pipeline_parts(const ServiceConfig& config);

/// Session lifecycle and the per-turn pipeline: classify, update stress, decide on
/// support, generate Interpreter + Coach output, generate Alex's reply, check lifecycle,
/// persist, then gate the result by condition.
class Orchestrator {
public:
    using ClockFn = std::function<Timestamp()>;

    Orchestrator(ServiceConfig config, PipelineParts parts, ClockFn clock = now_utc);

    static std::unique_ptr<Orchestrator> from_config(const ServiceConfig& config);

    /// Assigns the condition by blocked randomization within the stratum.
    /// Throws NotFoundError for an unknown scenario.
    Session create_session(const StratumKey& stratum, const std::string& scenario_id);

    /// Bypasses randomization; used by replay and tests.
    Session create_session_with_condition(Condition condition, const std::string& scenario_id,
                                          const StratumKey& stratum = {});

    /// Throws NotFoundError, ConflictError (ended session or turn in flight),
    /// ContractViolation (empty text), stress::ClassificationUnavailable or
    /// agents::ProviderError. On any error the session is left exactly as before.
    TurnResult process_turn(const std::string& session_id, const std::string& user_text);

    Session snapshot(const std::string& session_id) const;
    std::string export_session(const std::string& session_id) const;

    /// Client-initiated end: an Active session becomes Abandoned.
    Session end_session(const std::string& session_id);

    /// Marks Active sessions idle for longer than the configured timeout as Abandoned.
    std::size_t sweep_idle();

    /// Rebuilds sessions from write-ahead JSONL files. Returns how many were restored.
    std::size_t recover(const std::filesystem::path& dir);

    const ServiceConfig& config() const { return config_; }
    const BlockRandomizer& randomizer() const { return randomizer_; }

private:
    std::string new_session_id();
    void persist(const Session& session, const TurnRecord& turn) const;

    ServiceConfig config_;
    PipelineParts parts_;
    stress::MessageClassifier classifier_;
    ClockFn clock_;
    BlockRandomizer randomizer_;
    SessionStore store_;
    std::mutex id_mutex_;
    std::mt19937_64 id_rng_;
};

/// Re-runs an exported transcript's user messages through a fresh session with the same
/// condition and scenario and returns the new export.
std::vector<TranscriptLine> replay_transcript(Orchestrator& orchestrator, const std::vector<TranscriptLine>& lines);

/// True when two exports agree on everything but session ids and timestamps.
bool same_trajectory(const std::vector<TranscriptLine>& a, const std::vector<TranscriptLine>& b,
                     std::string* first_difference = nullptr);

}  // namespace neurowise::service
