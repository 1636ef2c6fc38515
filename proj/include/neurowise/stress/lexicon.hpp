#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "neurowise/core/domain.hpp"

namespace neurowise::stress {

/// One `category<TAB>phrase` line. A phrase written as `^just` only matches at the
/// start of a sentence.
struct LexiconEntry {
    CommunicationCategory category = CommunicationCategory::Neutral;
    std::string phrase;  // normalized
    bool sentence_start = false;
};

struct LexiconMatch {
    CommunicationCategory category;
    std::string phrase;
};

/// Keyword table used by the deterministic mock classifier and by the coach's
/// no-pressure filter.
class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(std::vector<LexiconEntry> entries);

    /// Parses TSV text. Blank lines and `#` comments are skipped. Throws SchemaError
    /// with the offending line number.
    static Lexicon parse(std::string_view tsv);
    static Lexicon load(const std::filesystem::path& path);

    /// All entries found in `text`, in table order, one per distinct phrase.
    std::vector<LexiconMatch> match(std::string_view text) const;

    /// Matched categories; empty when nothing matched.
    CategorySet categories(std::string_view text) const;

    const std::vector<LexiconEntry>& entries() const { return entries_; }

private:
    std::vector<LexiconEntry> entries_;
};

/// Lowercases, folds typographic apostrophes, and collapses everything that is not a
/// letter, digit, or apostrophe into single spaces.
std::string normalize_text(std::string_view text);

}  // namespace neurowise::stress
