#include "neurowise/service/orchestrator.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>

#include <spdlog/spdlog.h>

#include "neurowise/agents/live_provider.hpp"
#include "neurowise/agents/mock_provider.hpp"
#include "neurowise/core/errors.hpp"

namespace neurowise::service {

void SessionStore::insert(Session session) {
    auto slot = std::make_shared<Slot>();
    const std::string id = session.id;
    slot->session = std::move(session);
    std::unique_lock lock(mutex_);
    slots_[id] = std::move(slot);
}

std::shared_ptr<SessionStore::Slot> SessionStore::find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = slots_.find(id);
    if (it == slots_.end()) throw NotFoundError("unknown session '" + id + "'");
    return it->second;
}

std::vector<std::shared_ptr<SessionStore::Slot>> SessionStore::all() const {
    std::shared_lock lock(mutex_);
    std::vector<std::shared_ptr<Slot>> out;
    out.reserve(slots_.size());
    for (const auto& [id, slot] : slots_) out.push_back(slot);
    return out;
}

std::size_t SessionStore::size() const {
    std::shared_lock lock(mutex_);
    return slots_.size();
}

PipelineParts load_pipeline_parts(const ServiceConfig& config) {
    PipelineParts parts;
    parts.agents = agents::AgentSet::load(config.prompts_dir);
    parts.classifier_prompt =
        PromptTemplate::load(config.prompts_dir / "classifier.txt", stress::classifier_placeholders());
    parts.safety_lexicon = stress::Lexicon::load(config.lexicon_path);

    if (config.provider.kind == "mock") {
        parts.provider = std::make_shared<agents::MockProvider>(
            agents::MockTables::load(config.mock_templates_dir, config.lexicon_path));
    } else {
        agents::LiveProviderConfig live;
        live.endpoint = config.provider.endpoint;
        live.model = config.provider.model;
        live.timeout = config.provider.timeout;
        live.retry.max_attempts = config.provider.max_attempts;
        live.retry.initial_backoff = config.provider.initial_backoff;
        if (const char* key = std::getenv("NEUROWISE_API_KEY")) live.api_key = key;
        if (live.api_key.empty()) spdlog::warn("NEUROWISE_API_KEY is not set; live provider calls will be unauthenticated");
        parts.provider = std::make_shared<agents::LiveProvider>(std::move(live), agents::make_default_transport());
    }
    return parts;
}

Orchestrator::Orchestrator(ServiceConfig config, PipelineParts parts, ClockFn clock)
    : config_(std::move(config)),
      parts_(std::move(parts)),
      classifier_(parts_.provider, parts_.classifier_prompt, config_.classifier_context),
      clock_(std::move(clock)),
      randomizer_(config_.seed ? *config_.seed : std::random_device{}()),
      id_rng_(config_.seed ? *config_.seed ^ 0x5e551011ULL : std::random_device{}()) {
    config_.validate();
}

std::unique_ptr<Orchestrator> Orchestrator::from_config(const ServiceConfig& config) {
    return std::make_unique<Orchestrator>(config, load_pipeline_parts(config));
}

std::string Orchestrator::new_session_id() {
    std::lock_guard lock(id_mutex_);
    for (;;) {
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(id_rng_()));
        try {
            store_.find(buf);
        } catch (const NotFoundError&) {
            return buf;
        }
    }
}

Session Orchestrator::create_session(const StratumKey& stratum, const std::string& scenario_id) {
    if (!config_.find_scenario(scenario_id)) throw NotFoundError("unknown scenario '" + scenario_id + "'");
    return create_session_with_condition(randomizer_.assign(stratum), scenario_id, stratum);
}

Session Orchestrator::create_session_with_condition(Condition condition, const std::string& scenario_id,
                                                    const StratumKey& stratum) {
    const auto* scenario = config_.find_scenario(scenario_id);
    if (!scenario) throw NotFoundError("unknown scenario '" + scenario_id + "'");

    Session s;
    s.id = new_session_id();
    s.condition = condition;
    s.stratum = stratum;
    s.scenario = *scenario;
    s.created_at = s.last_activity = clock_();
    s.stress = StressState::at(scenario->initial_stress, 0, config_.bands);

    agents::ConversationContext ctx{s.scenario, {}, config_.agent_window};
    s.messages.push_back(agents::generate_partner_reply(ctx, s.stress, {}, *parts_.provider,
                                                        parts_.agents.partner, s.created_at));
    store_.insert(s);
    spdlog::info("session {} created ({}, scenario {})", s.id, to_string(condition), scenario_id);
    return s;
}

TurnResult Orchestrator::process_turn(const std::string& session_id, const std::string& user_text) {
    auto slot = store_.find(session_id);
    std::unique_lock turn(slot->turn_mutex, std::try_to_lock);
    if (!turn.owns_lock()) throw ConflictError("a turn is already in flight for session " + session_id);

    Session working;
    {
        std::shared_lock read(slot->state_mutex);
        working = slot->session;
    }
    const Timestamp now = clock_();

    if (working.lifecycle == Lifecycle::Active && now - working.last_activity > config_.idle_timeout) {
        std::unique_lock write(slot->state_mutex);
        slot->session.lifecycle = Lifecycle::Abandoned;
        throw ConflictError("session " + session_id + " was abandoned after inactivity");
    }
    if (working.lifecycle != Lifecycle::Active) {
        throw ConflictError("session " + session_id + " has ended (" + std::string(to_string(working.lifecycle)) + ")");
    }
    if (user_text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw ContractViolation("message text must be nonempty");
    }

    // (1) classify against the conversation so far
    const auto classification = classifier_.classify(user_text, working.messages);
    working.messages.push_back(Message{Role::User, user_text, working.messages.size(), now});

    // (2) update stress, (3) trigger predicate
    const StressState before = working.stress;
    const auto update = stress::update_stress(before, classification, config_.delta_table, config_.bands);
    const bool triggered = stress::should_trigger_support(update.applied_delta, config_.trigger_policy);

    // (4) Interpreter and Coach, NeuroWise only
    agents::ConversationContext ctx{working.scenario, working.messages, config_.agent_window};
    std::optional<SupportPayload> support;
    if (triggered && working.condition == Condition::NeuroWise) {
        const agents::TriggerContext trigger{update.applied_delta, classification.categories, config_.trigger_policy};
        const stress::Lexicon* filter = parts_.safety_lexicon ? &*parts_.safety_lexicon : nullptr;
        auto interpretation = std::async(std::launch::async, [&] {
            return agents::generate_interpretation(ctx, update.state, trigger, *parts_.provider, parts_.agents.interpreter);
        });
        auto coaching = std::async(std::launch::async, [&] {
            return agents::generate_coaching(ctx, update.state, trigger, *parts_.provider, parts_.agents.coach, filter);
        });
        std::string text = interpretation.get();
        try {
            support = SupportPayload{std::move(text), coaching.get(), update.applied_delta};
        } catch (const agents::CoachingUnavailable& e) {
            spdlog::warn("session {}: support omitted: {}", session_id, e.what());
        }
    }

    // (5) Alex replies to the post-update stress
    auto reply = agents::generate_partner_reply(ctx, update.state, classification.categories, *parts_.provider,
                                                parts_.agents.partner, now);
    working.messages.push_back(reply);

    // (6) lifecycle
    TurnRecord record;
    record.turn_index = working.turns.size() + 1;
    if (update.state.level <= working.scenario.resolution_stress_max) {
        working.lifecycle = Lifecycle::ResolvedEnd;
    } else if (record.turn_index >= static_cast<std::size_t>(working.scenario.turn_cap)) {
        working.lifecycle = Lifecycle::TurnCapEnd;
    }

    record.user_text = user_text;
    record.categories = classification.categories;
    record.stress_before = before.level;
    record.stress_after = update.state.level;
    record.applied_delta = update.applied_delta;
    record.triggered = triggered;
    record.support = support;
    record.partner_text = reply.text;
    record.lifecycle = working.lifecycle;
    record.ts = now;

    working.stress = update.state;
    working.last_activity = now;
    if (support) working.trigger_events.push_back({record.turn_index, *support});
    working.turns.push_back(record);

    // (7) write-ahead, then commit
    persist(working, record);
    {
        std::unique_lock write(slot->state_mutex);
        slot->session = working;
    }

    // (8) gate by condition
    TurnResult result;
    result.turn_index = record.turn_index;
    result.partner_message = std::move(reply);
    result.session_lifecycle = working.lifecycle;
    if (working.condition == Condition::NeuroWise) {
        result.stress_view = working.stress;
        result.support = std::move(support);
    }
    return result;
}

void Orchestrator::persist(const Session& session, const TurnRecord& turn) const {
    if (config_.transcripts_dir.empty()) return;
    std::filesystem::create_directories(config_.transcripts_dir);
    const auto path = config_.transcripts_dir / (session.id + ".jsonl");
    std::ofstream out(path, std::ios::app);
    out << transcript_line(session, turn).dump() << '\n';
    out.flush();
    if (!out) throw std::runtime_error("cannot append to transcript " + path.string());
}

Session Orchestrator::snapshot(const std::string& session_id) const {
    auto slot = store_.find(session_id);
    std::shared_lock read(slot->state_mutex);
    return slot->session;
}

std::string Orchestrator::export_session(const std::string& session_id) const {
    return export_jsonl(snapshot(session_id));
}

Session Orchestrator::end_session(const std::string& session_id) {
    auto slot = store_.find(session_id);
    std::unique_lock turn(slot->turn_mutex, std::try_to_lock);
    if (!turn.owns_lock()) throw ConflictError("a turn is already in flight for session " + session_id);
    std::unique_lock write(slot->state_mutex);
    if (slot->session.lifecycle == Lifecycle::Active) {
        slot->session.lifecycle = Lifecycle::Abandoned;
        slot->session.last_activity = clock_();
    }
    return slot->session;
}

std::size_t Orchestrator::sweep_idle() {
    const Timestamp now = clock_();
    std::size_t n = 0;
    for (const auto& slot : store_.all()) {
        std::unique_lock turn(slot->turn_mutex, std::try_to_lock);
        if (!turn.owns_lock()) continue;  // a turn in flight is activity
        std::unique_lock write(slot->state_mutex);
        auto& s = slot->session;
        if (s.lifecycle == Lifecycle::Active && now - s.last_activity > config_.idle_timeout) {
            s.lifecycle = Lifecycle::Abandoned;
            ++n;
        }
    }
    return n;
}

std::size_t Orchestrator::recover(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) return 0;
    std::size_t restored = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".jsonl") continue;
        std::vector<TranscriptLine> lines;
        try {
            lines = parse_jsonl(read_text_file(entry.path()));
        } catch (const SchemaError& e) {
            spdlog::warn("skipping {}: {}", entry.path().string(), e.what());
            continue;
        }
        if (lines.empty()) continue;
        const auto* scenario = config_.find_scenario(lines.front().scenario_id);
        if (!scenario) {
            spdlog::warn("skipping {}: unknown scenario {}", entry.path().string(), lines.front().scenario_id);
            continue;
        }

        Session s;
        s.id = lines.front().session_id;
        s.condition = lines.front().condition;
        s.scenario = *scenario;
        s.created_at = lines.front().record.ts;
        s.messages.push_back(Message{Role::Partner, scenario->opener_text, 0, s.created_at});
        for (const auto& line : lines) {
            const auto& r = line.record;
            s.messages.push_back(Message{Role::User, r.user_text, s.messages.size(), r.ts});
            s.messages.push_back(Message{Role::Partner, r.partner_text, s.messages.size(), r.ts});
            if (r.support) s.trigger_events.push_back({r.turn_index, *r.support});
            s.turns.push_back(r);
        }
        const auto& last = lines.back().record;
        s.stress = StressState::at(last.stress_after, last.applied_delta, config_.bands);
        s.lifecycle = last.lifecycle;
        s.last_activity = last.ts;
        store_.insert(std::move(s));
        ++restored;
    }
    return restored;
}

std::vector<TranscriptLine> replay_transcript(Orchestrator& orchestrator, const std::vector<TranscriptLine>& lines) {
    if (lines.empty()) return {};
    const auto session =
        orchestrator.create_session_with_condition(lines.front().condition, lines.front().scenario_id);
    for (const auto& line : lines) orchestrator.process_turn(session.id, line.record.user_text);
    return parse_jsonl(orchestrator.export_session(session.id));
}

bool same_trajectory(const std::vector<TranscriptLine>& a, const std::vector<TranscriptLine>& b,
                     std::string* first_difference) {
    auto differ = [&](const std::string& why) {
        if (first_difference) *first_difference = why;
        return false;
    };
    if (a.size() != b.size()) {
        return differ("turn count " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto ra = a[i].record;
        auto rb = b[i].record;
        ra.ts = rb.ts = Timestamp{};
        if (a[i].condition != b[i].condition || a[i].scenario_id != b[i].scenario_id) {
            return differ("turn " + std::to_string(i + 1) + ": session metadata");
        }
        if (!(ra == rb)) return differ("turn " + std::to_string(i + 1) + ": record");
    }
    return true;
}

}  // namespace neurowise::service
