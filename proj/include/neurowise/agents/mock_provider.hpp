#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "neurowise/agents/provider.hpp"
#include "neurowise/core/domain.hpp"
#include "neurowise/stress/lexicon.hpp"

namespace neurowise::agents {

/// Keyword lexicon plus template tables. Loaded from a directory holding
/// `partner_<band>.txt`, `interpreter_<category>.txt`, `coach_<category>.tsv`
/// (and `*_general` fallbacks); one entry per line, `#` comments allowed.
struct MockTables {
    stress::Lexicon lexicon;
    std::map<StressBand, std::vector<std::string>> partner;
    std::map<CommunicationCategory, std::vector<std::string>> interpreter;
    std::vector<std::string> interpreter_general;
    std::map<CommunicationCategory, std::vector<Suggestion>> coach;
    std::vector<Suggestion> coach_general;

    /// Throws SchemaError when a band has no partner templates or a general table is empty.
    static MockTables load(const std::filesystem::path& template_dir, const std::filesystem::path& lexicon_path);
};

/// Deterministic offline provider: every response is a pure function of the request.
/// Template choice is keyed on a hash of the canonical request, so replays reproduce
/// replies byte for byte while different conversations still see varied text.
class MockProvider final : public ChatProvider {
public:
    explicit MockProvider(MockTables tables);

    ProviderResponse complete(const ProviderRequest& request) override;
    std::string name() const override { return "mock"; }

    const MockTables& tables() const { return tables_; }

private:
    ProviderResponse classify(const ProviderRequest& request) const;
    ProviderResponse partner(const ProviderRequest& request, std::uint64_t h) const;
    ProviderResponse interpret(const ProviderRequest& request, std::uint64_t h) const;
    ProviderResponse coach(const ProviderRequest& request, std::uint64_t h) const;

    MockTables tables_;
};

std::uint64_t fnv1a64(std::string_view data);

/// Parses the comma-separated category names carried in request bindings.
CategorySet parse_category_list(std::string_view joined);

}  // namespace neurowise::agents
