#include "neurowise/service/script_corpus.hpp"

#include <set>

#include "neurowise/core/errors.hpp"
#include "neurowise/core/prompt_template.hpp"
#include "neurowise/stats/csv.hpp"

namespace neurowise::service {

std::size_t ScriptCorpus::turn_count() const {
    std::size_t n = 0;
    for (const auto& s : scripts) n += s.turns.size();
    return n;
}

ScriptCorpus parse_script_corpus(const nlohmann::json& j) {
    ScriptCorpus c;
    try {
        c.scenario_id = j.at("scenario_id").get<std::string>();
        std::set<std::string> ids;
        for (const auto& s : j.at("scripts")) {
            Script script;
            script.id = s.at("id").get<std::string>();
            script.label = stats::parse_corpus_label(s.at("label").get<std::string>());
            script.turns = s.at("turns").get<std::vector<std::string>>();
            if (script.turns.empty()) throw SchemaError("script " + script.id + " has no turns");
            if (!ids.insert(script.id).second) throw SchemaError("duplicate script id " + script.id);
            c.scripts.push_back(std::move(script));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("script corpus: ") + e.what());
    }
    return c;
}

ScriptCorpus load_script_corpus(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    return parse_script_corpus(j);
}

std::vector<ScoredTurn> score_script(const Script& script, const ScenarioConfig& scenario,
                                     const stress::MessageClassifier& classifier, const stress::DeltaTable& table,
                                     const BandThresholds& bands) {
    std::vector<Message> context;
    context.push_back({Role::Partner, scenario.opener_text, 0, Timestamp{}});
    auto state = StressState::at(scenario.initial_stress, 0, bands);
    std::vector<ScoredTurn> out;
    int turn = 0;
    for (const auto& text : script.turns) {
        const auto classification = classifier.classify(text, context);
        const auto update = stress::update_stress(state, classification, table, bands);
        state = update.state;
        out.push_back({++turn, classification.categories, state.level});
        context.push_back({Role::User, text, context.size(), Timestamp{}});
    }
    return out;
}

RatingSheet read_rating_sheet(const std::filesystem::path& path) {
    const auto t = stats::read_csv(path);
    const auto conv = t.column("conversation_id");
    const auto turn = t.column("turn_index");
    std::vector<std::size_t> raters;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i].starts_with("rater_")) raters.push_back(i);
    }
    if (!conv || !turn || raters.empty()) {
        throw SchemaError(path.string() + ": rating sheet needs conversation_id, turn_index and rater_* columns");
    }
    RatingSheet sheet;
    std::vector<std::string> problems;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string where = "line " + std::to_string(t.line_numbers[r]) + ": ";
        if (row.size() != t.header.size()) {
            problems.push_back(where + "wrong number of cells");
            continue;
        }
        const auto ti = stats::parse_number(row[*turn]);
        if (!ti || *ti < 1 || *ti != static_cast<int>(*ti)) {
            problems.push_back(where + "turn_index must be a positive integer");
            continue;
        }
        std::vector<double> scores;
        for (auto c : raters) {
            const auto v = stats::parse_number(row[c]);
            if (!v) problems.push_back(where + t.header[c] + " is not a number");
            else scores.push_back(*v);
        }
        if (!sheet.emplace(std::pair{row[*conv], static_cast<int>(*ti)}, std::move(scores)).second) {
            problems.push_back(where + "duplicate rating row");
        }
    }
    if (!problems.empty()) {
        std::string msg = path.string() + ": rating sheet errors:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw SchemaError(msg);
    }
    return sheet;
}

std::vector<stats::AnnotatedTurn> annotate_corpus(const ScriptCorpus& corpus, const RatingSheet& ratings,
                                                  const ScenarioConfig& scenario,
                                                  const stress::MessageClassifier& classifier,
                                                  const stress::DeltaTable& table, const BandThresholds& bands) {
    std::vector<stats::AnnotatedTurn> out;
    std::vector<std::string> missing;
    std::set<std::pair<std::string, int>> used;
    for (const auto& script : corpus.scripts) {
        for (const auto& scored : score_script(script, scenario, classifier, table, bands)) {
            const std::pair key{script.id, scored.turn_index};
            auto it = ratings.find(key);
            if (it == ratings.end()) {
                missing.push_back(script.id + " turn " + std::to_string(scored.turn_index) + " has no rating");
                continue;
            }
            used.insert(key);
            out.push_back({script.id, scored.turn_index, it->second, static_cast<double>(scored.stress_after),
                           script.label});
        }
    }
    for (const auto& [key, scores] : ratings) {
        if (!used.contains(key)) {
            missing.push_back("rating for " + key.first + " turn " + std::to_string(key.second) +
                              " matches no scripted turn");
        }
    }
    if (!missing.empty()) {
        std::string msg = "ratings do not line up with the script corpus:";
        for (const auto& m : missing) msg += "\n  " + m;
        throw SchemaError(msg);
    }
    return out;
}

}  // namespace neurowise::service
