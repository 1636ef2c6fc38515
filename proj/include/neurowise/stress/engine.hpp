#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "neurowise/agents/provider.hpp"
#include "neurowise/core/domain.hpp"
#include "neurowise/core/prompt_template.hpp"

namespace neurowise::stress {

struct ClassificationResult {
    /// Nonempty; Neutral only ever appears alone.
    CategorySet categories{CommunicationCategory::Neutral};
    std::string rationale;

    bool operator==(const ClassificationResult&) const = default;
};

enum class Aggregation { Sum, MostExtreme };

/// Rule-based stress deltas per communication category.
struct DeltaTable {
    std::array<int, kCategoryCount> deltas{};
    Aggregation aggregation = Aggregation::Sum;
    /// Bound on |aggregate| for one turn, applied before clamping to [0, 100].
    std::optional<int> per_turn_cap = 20;

    /// Validation -10, OptionsGiving -8, SensoryAccommodation -8, Neutral 0,
    /// Pressure +12, Invalidation +15; Sum; cap 20.
    static DeltaTable defaults();

    int delta(CommunicationCategory c) const { return deltas[static_cast<std::size_t>(c)]; }
    void set(CommunicationCategory c, int value) { deltas[static_cast<std::size_t>(c)] = value; }

    /// Aggregated, capped delta for a category set (before clamping).
    int aggregate(const CategorySet& categories) const;

    /// Throws SchemaError when a supportive category raises stress, a harmful one lowers
    /// it, Neutral is nonzero, or the cap is not positive.
    void validate() const;
};

struct TriggerPolicy {
    int min_increase = 10;

    void validate() const;
};

struct StressUpdate {
    StressState state;
    int applied_delta = 0;  // post-clamp
};

StressUpdate update_stress(const StressState& state, const ClassificationResult& classification,
                           const DeltaTable& table, const BandThresholds& thresholds = {});

/// Inclusive threshold on single-turn increases.
bool should_trigger_support(int applied_delta, const TriggerPolicy& policy);

/// The provider failed even after its own retries; the turn must be rejected.
class ClassificationUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses classifier output: a JSON object {"categories": [...], "rationale": "..."},
/// optionally wrapped in prose or a code fence. Anything unusable yields {Neutral} and
/// sets `degraded`.
ClassificationResult parse_classification(std::string_view content, bool* degraded = nullptr);

/// Placeholders a classifier prompt may use.
const std::set<std::string>& classifier_placeholders();

/// Renders recent messages as "Alex: ..." / "User: ..." lines.
std::string render_transcript(std::span<const Message> messages, std::string_view partner_name = "Alex");

/// LLM half of the hybrid estimator: asks a chat provider to label one user message.
class MessageClassifier {
public:
    MessageClassifier(std::shared_ptr<agents::ChatProvider> provider, PromptTemplate system_prompt,
                      std::size_t context_window = 4);

    /// `context` is the conversation so far; only the last `context_window` messages are sent.
    /// Throws ContractViolation on empty text and ClassificationUnavailable on provider failure.
    ClassificationResult classify(std::string_view text, std::span<const Message> context) const;

    agents::ProviderRequest build_request(std::string_view text, std::span<const Message> context) const;

private:
    std::shared_ptr<agents::ChatProvider> provider_;
    PromptTemplate system_prompt_;
    std::size_t context_window_;
};

std::string_view to_string(Aggregation a);
void to_json(nlohmann::json& j, const DeltaTable& t);
/// Missing categories keep their default delta.
void from_json(const nlohmann::json& j, DeltaTable& t);
void to_json(nlohmann::json& j, const TriggerPolicy& p);
void from_json(const nlohmann::json& j, TriggerPolicy& p);

}  // namespace neurowise::stress
