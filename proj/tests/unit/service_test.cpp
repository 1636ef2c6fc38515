#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <future>
#include <thread>

#include "neurowise/agents/mock_provider.hpp"
#include "neurowise/core/errors.hpp"
#include "neurowise/service/orchestrator.hpp"
#include "neurowise/service/script_corpus.hpp"

using namespace neurowise;
using namespace neurowise::service;
using Cat = CommunicationCategory;

namespace {

const std::filesystem::path kData = NEUROWISE_DATA_DIR;
const std::string kScenario = "friday-pizza-night";

class HookedProvider : public agents::ChatProvider {
public:
    using Hook = std::function<void(const agents::ProviderRequest&)>;
    HookedProvider(std::shared_ptr<agents::ChatProvider> inner, Hook hook)
        : inner_(std::move(inner)), hook_(std::move(hook)) {}
    agents::ProviderResponse complete(const agents::ProviderRequest& r) override {
        hook_(r);
        return inner_->complete(r);
    }
    std::string name() const override { return "hooked"; }

private:
    std::shared_ptr<agents::ChatProvider> inner_;
    Hook hook_;
};

struct ManualClock {
    Timestamp now{std::chrono::milliseconds(1718100000000)};
    Orchestrator::ClockFn fn() {
        return [this] { return now; };
    }
};

ServiceConfig test_config() {
    auto c = ServiceConfig::defaults(kData);
    c.seed = 17;
    return c;
}

std::unique_ptr<Orchestrator> make(ServiceConfig config = test_config(), HookedProvider::Hook hook = {},
                                   ManualClock* clock = nullptr) {
    auto parts = load_pipeline_parts(config);
    if (hook) parts.provider = std::make_shared<HookedProvider>(parts.provider, hook);
    return std::make_unique<Orchestrator>(std::move(config), std::move(parts),
                                          clock ? clock->fn() : Orchestrator::ClockFn(now_utc));
}

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    return dir;
}

const std::string kPressure = "Just eat it, we're eating this.";
const std::string kInvalidation = "It's not a big deal, you're overreacting.";
const std::string kValidation = "I'm sorry, that must be hard.";
const std::string kOptions = "Would you like to order pizza tomorrow instead?";

}  // namespace

TEST(Orchestrator, NewSessionStartsWithOpener) {
    auto o = make();
    const auto s = o->create_session_with_condition(Condition::NeuroWise, kScenario);
    ASSERT_EQ(s.messages.size(), 1u);
    EXPECT_EQ(s.messages[0].text, pizza_night_scenario().opener_text);
    EXPECT_EQ(s.stress.level, 65);
    EXPECT_EQ(s.lifecycle, Lifecycle::Active);
}

TEST(Orchestrator, UnknownScenarioIsNotFound) {
    auto o = make();
    EXPECT_THROW(o->create_session({}, "beach-day"), NotFoundError);
    EXPECT_THROW(o->process_turn("nope", "hi"), NotFoundError);
}

TEST(Orchestrator, BaselineResultsCarryNoStressOrSupport) {
    auto o = make();
    const auto s = o->create_session_with_condition(Condition::Baseline, kScenario);
    const auto r = o->process_turn(s.id, kInvalidation);
    EXPECT_FALSE(r.stress_view);
    EXPECT_FALSE(r.support);
    const nlohmann::json j = r;
    EXPECT_FALSE(j.contains("stress_view"));
    EXPECT_FALSE(j.contains("support"));
    const auto view = gated_view(o->snapshot(s.id));
    EXPECT_FALSE(view.contains("stress"));
    EXPECT_FALSE(view.contains("trigger_events"));

    const auto internal = o->snapshot(s.id);
    EXPECT_EQ(internal.stress.level, 80);
    EXPECT_TRUE(internal.turns[0].triggered);
    EXPECT_FALSE(internal.turns[0].support);
}

TEST(Orchestrator, BaselineMakesNoSupportAgentCalls) {
    std::atomic<int> support_calls{0};
    auto o = make(test_config(), [&](const agents::ProviderRequest& r) {
        if (r.agent == agents::AgentKind::Interpreter || r.agent == agents::AgentKind::Coach) ++support_calls;
    });
    const auto s = o->create_session_with_condition(Condition::Baseline, kScenario);
    o->process_turn(s.id, kInvalidation);
    o->process_turn(s.id, kPressure);
    EXPECT_EQ(support_calls, 0);
}

TEST(Orchestrator, NeuroWiseInvalidationTriggersSupport) {
    auto o = make();
    const auto s = o->create_session_with_condition(Condition::NeuroWise, kScenario);
    const auto r = o->process_turn(s.id, kInvalidation);
    ASSERT_TRUE(r.stress_view);
    EXPECT_EQ(r.stress_view->level, 80);
    EXPECT_EQ(r.stress_view->band, StressBand::High);
    ASSERT_TRUE(r.support);
    EXPECT_EQ(r.support->triggering_delta, 15);
    EXPECT_FALSE(r.support->interpretation.empty());
    EXPECT_GE(r.support->suggestions.size(), 1u);
    EXPECT_LE(r.support->suggestions.size(), 3u);
    EXPECT_EQ(o->snapshot(s.id).trigger_events.size(), 1u);
}

TEST(Orchestrator, DecreaseNeverTriggers) {
    auto o = make();
    const auto s = o->create_session_with_condition(Condition::NeuroWise, kScenario);
    const auto r = o->process_turn(s.id, kValidation);
    EXPECT_EQ(r.stress_view->level, 55);
    EXPECT_FALSE(r.support);
}

TEST(Orchestrator, ValidationFromThirtyFiveResolves) {
    auto config = test_config();
    config.scenarios[0].initial_stress = 35;
    auto o = make(config);
    const auto s = o->create_session_with_condition(Condition::NeuroWise, kScenario);
    const auto r = o->process_turn(s.id, kValidation);
    EXPECT_EQ(r.stress_view->level, 25);
    EXPECT_EQ(r.session_lifecycle, Lifecycle::ResolvedEnd);
    EXPECT_THROW(o->process_turn(s.id, "hello?"), ConflictError);
}

TEST(Orchestrator, TurnCapEndsSession) {
    auto config = test_config();
    config.scenarios[0].turn_cap = 3;
    auto o = make(config);
    const auto s = o->create_session_with_condition(Condition::Baseline, kScenario);
    EXPECT_EQ(o->process_turn(s.id, "How was work?").session_lifecycle, Lifecycle::Active);
    EXPECT_EQ(o->process_turn(s.id, "Okay.").session_lifecycle, Lifecycle::Active);
    EXPECT_EQ(o->process_turn(s.id, "Right.").session_lifecycle, Lifecycle::TurnCapEnd);
    EXPECT_THROW(o->process_turn(s.id, "Still there?"), ConflictError);
    EXPECT_EQ(o->snapshot(s.id).turn_count(), 3u);
}

TEST(Orchestrator, EmptyTextIsRejectedWithoutChange) {
    auto o = make();
    const auto s = o->create_session_with_condition(Condition::NeuroWise, kScenario);
    EXPECT_THROW(o->process_turn(s.id, "  \n"), ContractViolation);
    EXPECT_EQ(o->snapshot(s.id).messages.size(), 1u);
}

TEST(Orchestrator, ConcurrentTurnIsAConflict) {
    std::promise<void> entered, release;
    auto released = release.get_future().share();
    std::atomic<bool> first{true};
    auto o = make(test_config(), [&](const agents::ProviderRequest& r) {
        if (r.agent == agents::AgentKind::Classifier && first.exchange(false)) {
            entered.set_value();
            released.wait();
        }
    });
    const auto s = o->create_session_with_condition(Condition::NeuroWise, kScenario);
    auto in_flight = std::async(std::launch::async, [&] { return o->process_turn(s.id, kValidation); });
    entered.get_future().wait();
    EXPECT_THROW(o->process_turn(s.id, kPressure), ConflictError);
    EXPECT_THROW(o->end_session(s.id), ConflictError);
    EXPECT_EQ(o->snapshot(s.id).turn_count(), 0u);
    release.set_value();
    EXPECT_EQ(in_flight.get().turn_index, 1u);
    EXPECT_EQ(o->snapshot(s.id).turn_count(), 1u);
}

TEST(Orchestrator, ProviderFailureLeavesSessionUntouched) {
    std::atomic<bool> fail{false};
    std::atomic<agents::AgentKind> target{agents::AgentKind::Partner};
    auto o = make(test_config(), [&](const agents::ProviderRequest& r) {
        if (fail && r.agent == target) throw agents::ProviderError(agents::ProviderError::Kind::Unavailable, "injected");
    });
    const auto s = o->create_session_with_condition(Condition::NeuroWise, kScenario);
    o->process_turn(s.id, kValidation);
    const auto before = o->snapshot(s.id);

    fail = true;
    for (auto kind : {agents::AgentKind::Partner, agents::AgentKind::Interpreter}) {
        target = kind;
        EXPECT_THROW(o->process_turn(s.id, kInvalidation), agents::ProviderError);
        const auto after = o->snapshot(s.id);
        EXPECT_EQ(after.messages, before.messages);
        EXPECT_EQ(after.stress, before.stress);
        EXPECT_EQ(after.turns, before.turns);
        EXPECT_EQ(after.trigger_events.size(), before.trigger_events.size());
    }
    target = agents::AgentKind::Classifier;
    EXPECT_THROW(o->process_turn(s.id, kInvalidation), stress::ClassificationUnavailable);
    EXPECT_EQ(o->snapshot(s.id).turns, before.turns);

    fail = false;
    EXPECT_EQ(o->process_turn(s.id, kInvalidation).turn_index, 2u);
}

TEST(Orchestrator, CoachFailureOmitsSupportButKeepsTurn) {
    auto o = make(test_config(), [&](const agents::ProviderRequest& r) {
        if (r.agent == agents::AgentKind::Coach) throw agents::CoachingUnavailable("none usable");
    });
    const auto s = o->create_session_with_condition(Condition::NeuroWise, kScenario);
    const auto r = o->process_turn(s.id, kInvalidation);
    EXPECT_FALSE(r.support);
    EXPECT_TRUE(o->snapshot(s.id).turns[0].triggered);
}

TEST(Orchestrator, IdleSessionsAreAbandoned) {
    ManualClock clock;
    auto o = make(test_config(), {}, &clock);
    const auto a = o->create_session_with_condition(Condition::NeuroWise, kScenario);
    const auto b = o->create_session_with_condition(Condition::Baseline, kScenario);
    clock.now += std::chrono::minutes(20);
    o->process_turn(b.id, kValidation);
    clock.now += std::chrono::minutes(15);
    EXPECT_EQ(o->sweep_idle(), 1u);
    EXPECT_EQ(o->snapshot(a.id).lifecycle, Lifecycle::Abandoned);
    EXPECT_EQ(o->snapshot(b.id).lifecycle, Lifecycle::Active);
    clock.now += std::chrono::minutes(31);
    EXPECT_THROW(o->process_turn(b.id, kValidation), ConflictError);
    EXPECT_EQ(o->snapshot(b.id).lifecycle, Lifecycle::Abandoned);
}

TEST(Orchestrator, ClientEndAbandons) {
    auto o = make();
    const auto s = o->create_session_with_condition(Condition::NeuroWise, kScenario);
    EXPECT_EQ(o->end_session(s.id).lifecycle, Lifecycle::Abandoned);
    EXPECT_THROW(o->process_turn(s.id, kValidation), ConflictError);
}

TEST(Export, BaselineExportCarriesStress) {
    auto o = make();
    const auto s = o->create_session_with_condition(Condition::Baseline, kScenario);
    o->process_turn(s.id, kPressure);
    o->process_turn(s.id, kOptions);
    const auto lines = parse_jsonl(o->export_session(s.id));
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0].condition, Condition::Baseline);
    EXPECT_EQ(lines[0].record.stress_before, 65);
    EXPECT_EQ(lines[0].record.stress_after, 77);
    EXPECT_EQ(lines[1].record.turn_index, 2u);
    EXPECT_EQ(lines[1].record.categories, (CategorySet{Cat::OptionsGiving}));
    const auto raw = nlohmann::json::parse(o->export_session(s.id).substr(0, o->export_session(s.id).find('\n')));
    EXPECT_TRUE(raw.contains("stress_after"));
    EXPECT_FALSE(raw.contains("suggestions"));
}

TEST(Export, RoundTripsThroughJsonl) {
    auto o = make();
    const auto s = o->create_session_with_condition(Condition::NeuroWise, kScenario);
    o->process_turn(s.id, kInvalidation);
    o->process_turn(s.id, kValidation);
    const auto text = o->export_session(s.id);
    const auto lines = parse_jsonl(text);
    const auto snap = o->snapshot(s.id);
    ASSERT_EQ(lines.size(), snap.turns.size());
    for (std::size_t i = 0; i < lines.size(); ++i) EXPECT_EQ(lines[i].record, snap.turns[i]);
    EXPECT_THROW(parse_jsonl("{\"session_id\": 1}\n"), SchemaError);
}

TEST(Recovery, RebuildsSessionsFromWriteAhead) {
    const auto dir = fresh_dir("nw_recovery_test");
    auto config = test_config();
    config.transcripts_dir = dir;
    std::string id;
    Session original;
    {
        auto o = make(config);
        id = o->create_session_with_condition(Condition::NeuroWise, kScenario).id;
        o->process_turn(id, kInvalidation);
        o->process_turn(id, kOptions);
        original = o->snapshot(id);
    }
    std::ofstream(dir / "garbage.jsonl") << "not json\n";
    auto fresh = make(config);
    EXPECT_EQ(fresh->recover(dir), 1u);
    const auto restored = fresh->snapshot(id);
    EXPECT_EQ(restored.turns, original.turns);
    EXPECT_EQ(restored.stress.level, original.stress.level);
    EXPECT_EQ(restored.messages.size(), original.messages.size());
    EXPECT_EQ(restored.trigger_events.size(), original.trigger_events.size());
    EXPECT_EQ(fresh->process_turn(id, kValidation).turn_index, 3u);
    std::filesystem::remove_all(dir);
}

TEST(Replay, MockReplayIsIdentical) {
    auto o = make();
    const auto s = o->create_session_with_condition(Condition::NeuroWise, kScenario);
    for (const auto& t : {kPressure, kInvalidation, kValidation, kOptions, std::string("Open the window?")}) {
        o->process_turn(s.id, t);
    }
    const auto original = parse_jsonl(o->export_session(s.id));
    auto other = make();
    const auto replayed = replay_transcript(*other, original);
    std::string diff;
    EXPECT_TRUE(same_trajectory(original, replayed, &diff)) << diff;

    auto tampered = replayed;
    tampered[2].record.stress_after += 1;
    EXPECT_FALSE(same_trajectory(original, tampered, &diff));
    EXPECT_FALSE(diff.empty());
}

TEST(Randomization, BlocksOfTwoBalanceEachStratum) {
    BlockRandomizer r(5);
    const StratumKey a{Gender::Woman, ContactFrequency::High}, b{Gender::Man, ContactFrequency::LowModerate};
    for (int i = 0; i < 41; ++i) {
        r.assign(a);
        if (i % 3 == 0) r.assign(b);
        const auto c = r.counts(a);
        ASSERT_LE(std::abs(c.baseline - c.neurowise), 1);
        if ((i + 1) % 2 == 0) ASSERT_EQ(c.baseline, c.neurowise);
    }
    const auto cb = r.counts(b);
    EXPECT_LE(std::abs(cb.baseline - cb.neurowise), 1);
}

TEST(Randomization, BothOrdersOccur) {
    BlockRandomizer r(123);
    int baseline_first = 0;
    for (int block = 0; block < 100; ++block) {
        const StratumKey k{Gender::Other, ContactFrequency::High};
        baseline_first += r.assign(k) == Condition::Baseline;
        r.assign(k);
    }
    EXPECT_GT(baseline_first, 20);
    EXPECT_LT(baseline_first, 80);
}

TEST(Randomization, OrchestratorAssignsThroughStrata) {
    auto o = make();
    const StratumKey k{Gender::Man, ContactFrequency::High};
    const auto first = o->create_session(k, kScenario);
    const auto second = o->create_session(k, kScenario);
    EXPECT_NE(first.condition, second.condition);
    EXPECT_NE(first.id, second.id);
}

TEST(ScriptCorpusTest, EveryLowScriptEndsBelowEveryHighScript) {
    const auto corpus = load_script_corpus(kData / "validation" / "scripts.json");
    const auto config = test_config();
    const auto parts = load_pipeline_parts(config);
    const stress::MessageClassifier classifier(parts.provider, parts.classifier_prompt, config.classifier_context);
    int low_max = -1, high_min = 101;
    for (const auto& script : corpus.scripts) {
        const auto scored = score_script(script, *config.find_scenario(corpus.scenario_id), classifier,
                                         config.delta_table, config.bands);
        ASSERT_EQ(scored.size(), script.turns.size());
        const int final = scored.back().stress_after;
        if (script.label == stats::CorpusLabel::LowStress) low_max = std::max(low_max, final);
        else high_min = std::min(high_min, final);
    }
    EXPECT_LT(low_max, high_min);
}

TEST(Config, LoadsBundledConfigAndRejectsBadValues) {
    const auto c = ServiceConfig::load(kData / "config" / "neurowise.json");
    EXPECT_EQ(c.provider.kind, "mock");
    EXPECT_EQ(c.trigger_policy.min_increase, 10);
    EXPECT_TRUE(std::filesystem::exists(c.lexicon_path));
    EXPECT_NE(c.find_scenario(kScenario), nullptr);

    auto j = nlohmann::json::parse(R"({"trigger_policy": {"min_increase": 0}})");
    EXPECT_THROW(ServiceConfig::from_json(j, kData), SchemaError);
    j = nlohmann::json::parse(R"({"provider": {"kind": "psychic"}})");
    EXPECT_THROW(ServiceConfig::from_json(j, kData), SchemaError);
}
