#include "neurowise/stress/lexicon.hpp"

#include <cctype>
#include <sstream>

#include "neurowise/core/errors.hpp"
#include "neurowise/core/prompt_template.hpp"

namespace neurowise::stress {

namespace {

// Splits raw text into sentences on terminal punctuation and line breaks.
std::vector<std::string> sentences_of(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (c == '.' || c == '!' || c == '?' || c == '\n' || c == ';') {
            out.push_back(normalize_text(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    out.push_back(normalize_text(current));
    return out;
}

bool starts_with_words(const std::string& sentence, const std::string& phrase) {
    if (sentence.size() < phrase.size() || sentence.compare(0, phrase.size(), phrase) != 0) {
        return false;
    }
    return sentence.size() == phrase.size() || sentence[phrase.size()] == ' ';
}

}  // namespace

std::string normalize_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        auto c = static_cast<unsigned char>(text[i]);
        // U+2018 / U+2019 in UTF-8: E2 80 98 / E2 80 99
        if (c == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x80 &&
            (static_cast<unsigned char>(text[i + 2]) == 0x98 ||
             static_cast<unsigned char>(text[i + 2]) == 0x99)) {
            c = '\'';
            i += 2;
        }
        if (std::isalnum(c) != 0 || c == '\'') {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending_space = true;
        }
    }
    return out;
}

Lexicon::Lexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {}

Lexicon Lexicon::parse(std::string_view tsv) {
    std::vector<LexiconEntry> entries;
    std::istringstream in{std::string(tsv)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw SchemaError("lexicon line " + std::to_string(line_no) + ": expected category<TAB>phrase");
        }
        LexiconEntry entry;
        try {
            entry.category = parse_category(line.substr(0, tab));
        } catch (const SchemaError& e) {
            throw SchemaError("lexicon line " + std::to_string(line_no) + ": " + e.what());
        }
        std::string phrase = line.substr(tab + 1);
        if (!phrase.empty() && phrase.front() == '^') {
            entry.sentence_start = true;
            phrase.erase(0, 1);
        }
        entry.phrase = normalize_text(phrase);
        if (entry.phrase.empty()) {
            throw SchemaError("lexicon line " + std::to_string(line_no) + ": empty phrase");
        }
        entries.push_back(std::move(entry));
    }
    return Lexicon(std::move(entries));
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    try {
        return parse(read_text_file(path));
    } catch (const SchemaError& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

std::vector<LexiconMatch> Lexicon::match(std::string_view text) const {
    const std::string padded = " " + normalize_text(text) + " ";
    std::vector<std::string> sentences;
    std::vector<LexiconMatch> out;
    for (const auto& entry : entries_) {
        bool hit = false;
        if (entry.sentence_start) {
            if (sentences.empty()) sentences = sentences_of(text);
            for (const auto& s : sentences) {
                if (starts_with_words(s, entry.phrase)) {
                    hit = true;
                    break;
                }
            }
        } else {
            hit = padded.find(" " + entry.phrase + " ") != std::string::npos;
        }
        if (hit) out.push_back({entry.category, entry.phrase});
    }
    return out;
}

CategorySet Lexicon::categories(std::string_view text) const {
    CategorySet out;
    for (const auto& m : match(text)) out.insert(m.category);
    return out;
}

}  // namespace neurowise::stress
