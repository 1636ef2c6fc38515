#include "neurowise/agents/mock_provider.hpp"

#include <sstream>

#include "neurowise/core/errors.hpp"
#include "neurowise/core/prompt_template.hpp"

namespace neurowise::agents {

namespace {

using CC = CommunicationCategory;

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::vector<std::string> out;
    if (!std::filesystem::exists(path)) return out;
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        out.push_back(line);
    }
    return out;
}

std::vector<Suggestion> read_suggestions(const std::filesystem::path& path) {
    std::vector<Suggestion> out;
    int n = 0;
    for (const auto& line : read_lines(path)) {
        ++n;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw SchemaError(path.string() + ": entry " + std::to_string(n) + " needs strategy<TAB>text");
        }
        out.push_back({parse_strategy(line.substr(0, tab)), line.substr(tab + 1)});
    }
    return out;
}

template <typename T>
const T& pick(const std::vector<T>& options, std::uint64_t h) {
    return options[h % options.size()];
}

std::uint64_t mix(std::uint64_t h, std::uint64_t salt) {
    h ^= salt + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::string binding(const ProviderRequest& request, const std::string& key) {
    auto it = request.bindings.find(key);
    if (it == request.bindings.end()) {
        throw ContractViolation("mock provider: request has no '" + key + "' binding");
    }
    return it->second;
}

// Categories that get their own interpreter sentence or coach entry, most harmful first.
constexpr CC kPriority[] = {CC::Invalidation, CC::Pressure, CC::Validation, CC::OptionsGiving,
                            CC::SensoryAccommodation, CC::Neutral};

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

CategorySet parse_category_list(std::string_view joined) {
    CategorySet out;
    std::string token;
    auto flush = [&] {
        auto b = token.find_first_not_of(' ');
        auto e = token.find_last_not_of(' ');
        if (b != std::string::npos) out.insert(parse_category(token.substr(b, e - b + 1)));
        token.clear();
    };
    for (char c : joined) {
        if (c == ',') flush();
        else token.push_back(c);
    }
    flush();
    return out;
}

MockTables MockTables::load(const std::filesystem::path& dir, const std::filesystem::path& lexicon_path) {
    MockTables t;
    t.lexicon = stress::Lexicon::load(lexicon_path);
    for (auto band : {StressBand::Calm, StressBand::Elevated, StressBand::High}) {
        auto lines = read_lines(dir / ("partner_" + std::string(to_string(band)) + ".txt"));
        if (lines.empty()) {
            throw SchemaError("mock templates: no partner replies for band " + std::string(to_string(band)));
        }
        t.partner[band] = std::move(lines);
    }
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        const auto c = static_cast<CC>(i);
        const std::string name(to_string(c));
        if (auto lines = read_lines(dir / ("interpreter_" + name + ".txt")); !lines.empty()) {
            t.interpreter[c] = std::move(lines);
        }
        if (auto s = read_suggestions(dir / ("coach_" + name + ".tsv")); !s.empty()) t.coach[c] = std::move(s);
    }
    t.interpreter_general = read_lines(dir / "interpreter_general.txt");
    t.coach_general = read_suggestions(dir / "coach_general.tsv");
    if (t.interpreter_general.empty() || t.coach_general.empty()) {
        throw SchemaError("mock templates: interpreter_general.txt and coach_general.tsv must be nonempty");
    }
    return t;
}

MockProvider::MockProvider(MockTables tables) : tables_(std::move(tables)) {}

ProviderResponse MockProvider::complete(const ProviderRequest& request) {
    request.validate();
    const auto h = fnv1a64(request.canonical());
    switch (request.agent) {
        case AgentKind::Classifier: return classify(request);
        case AgentKind::Partner: return partner(request, h);
        case AgentKind::Interpreter: return interpret(request, h);
        case AgentKind::Coach: return coach(request, h);
    }
    throw ContractViolation("mock provider: unknown agent");
}

ProviderResponse MockProvider::classify(const ProviderRequest& request) const {
    const auto text = binding(request, "message");
    nlohmann::json categories = nlohmann::json::array();
    std::string rationale;
    CategorySet seen;
    for (const auto& m : tables_.lexicon.match(text)) {
        if (seen.insert(m.category).second) categories.push_back(std::string(to_string(m.category)));
        rationale += (rationale.empty() ? "matched: " : ", ") + m.phrase;
    }
    if (categories.empty()) {
        categories.push_back("neutral");
        rationale = "no lexicon match";
    }
    nlohmann::json body{{"categories", categories}, {"rationale", rationale}};
    return {body.dump(), "stop", 0, "mock/classifier"};
}

ProviderResponse MockProvider::partner(const ProviderRequest& request, std::uint64_t h) const {
    const auto band = parse_band(binding(request, "stress_band"));
    const auto& options = tables_.partner.at(band);
    const auto index = h % options.size();
    return {options[index], "stop", 0,
            "mock/partner/" + std::string(to_string(band)) + "#" + std::to_string(index)};
}

ProviderResponse MockProvider::interpret(const ProviderRequest& request, std::uint64_t h) const {
    const auto categories = parse_category_list(binding(request, "categories"));
    std::string text;
    std::string tag = "mock/interpreter";
    int sentences = 0;
    for (auto c : kPriority) {
        if (sentences == 2) break;
        auto it = tables_.interpreter.find(c);
        if (!categories.contains(c) || it == tables_.interpreter.end()) continue;
        if (!text.empty()) text += ' ';
        text += pick(it->second, mix(h, static_cast<std::uint64_t>(c)));
        tag += "/" + std::string(to_string(c));
        ++sentences;
    }
    if (text.empty()) {
        text = pick(tables_.interpreter_general, h);
        tag += "/general";
    }
    return {text, "stop", 0, tag};
}

ProviderResponse MockProvider::coach(const ProviderRequest& request, std::uint64_t h) const {
    const auto categories = parse_category_list(binding(request, "categories"));
    std::vector<Suggestion> chosen;
    auto add = [&](const Suggestion& s) {
        if (chosen.size() >= 3) return;
        for (const auto& c : chosen) {
            if (c.strategy == s.strategy || c.text == s.text) return;
        }
        chosen.push_back(s);
    };
    for (auto c : kPriority) {
        auto it = tables_.coach.find(c);
        if (!categories.contains(c) || it == tables_.coach.end()) continue;
        // The first entry's strategy is the category's primary strategy; always offer one of those.
        const auto primary = it->second.front().strategy;
        std::vector<Suggestion> primaries;
        for (const auto& s : it->second) {
            if (s.strategy == primary) primaries.push_back(s);
        }
        add(pick(primaries, mix(h, static_cast<std::uint64_t>(c))));
    }
    add(pick(tables_.coach_general, mix(h, 0xC0AC)));

    nlohmann::json body{{"suggestions", chosen}};
    return {body.dump(), "stop", 0, "mock/coach"};
}

}  // namespace neurowise::agents
