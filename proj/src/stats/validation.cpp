#include "neurowise/stats/validation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "neurowise/core/errors.hpp"

namespace neurowise::stats {

std::string_view to_string(CorpusLabel label) {
    return label == CorpusLabel::LowStress ? "low_stress" : "high_stress";
}

CorpusLabel parse_corpus_label(std::string_view s) {
    if (s == "low_stress") return CorpusLabel::LowStress;
    if (s == "high_stress") return CorpusLabel::HighStress;
    throw SchemaError("corpus_label must be low_stress or high_stress, got '" + std::string(s) + "'");
}

std::vector<AnnotatedTurn> parse_annotations(const CsvTable& t) {
    std::vector<std::string> problems;
    const auto conv = t.column("conversation_id");
    const auto turn = t.column("turn_index");
    const auto algo = t.column("algorithm_score");
    const auto label = t.column("corpus_label");
    std::vector<std::size_t> raters;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i].starts_with("rater_")) raters.push_back(i);
    }
    if (!conv) problems.push_back("header: missing column conversation_id");
    if (!turn) problems.push_back("header: missing column turn_index");
    if (!algo) problems.push_back("header: missing column algorithm_score");
    if (!label) problems.push_back("header: missing column corpus_label");
    if (raters.empty()) problems.push_back("header: no rater_* columns");
    if (!problems.empty()) {
        std::string msg = "annotation schema errors:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw SchemaError(msg);
    }

    std::vector<AnnotatedTurn> out;
    std::set<std::pair<std::string, int>> seen;
    std::map<std::string, CorpusLabel> label_of;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string where = "line " + std::to_string(t.line_numbers[r]) + ": ";
        if (row.size() != t.header.size()) {
            problems.push_back(where + "expected " + std::to_string(t.header.size()) + " cells, found " +
                               std::to_string(row.size()));
            continue;
        }
        AnnotatedTurn a;
        a.conversation_id = row[*conv];
        if (a.conversation_id.empty()) problems.push_back(where + "empty conversation_id");
        const auto ti = parse_number(row[*turn]);
        if (!ti || *ti < 0 || *ti != static_cast<int>(*ti)) {
            problems.push_back(where + "turn_index must be a nonnegative integer");
        } else {
            a.turn_index = static_cast<int>(*ti);
        }
        for (auto c : raters) {
            const auto v = parse_number(row[c]);
            if (!v) problems.push_back(where + t.header[c] + " is not a number");
            else a.rater_scores.push_back(*v);
        }
        const auto s = parse_number(row[*algo]);
        if (!s) problems.push_back(where + "algorithm_score is not a number");
        else a.algorithm_score = *s;
        try {
            a.corpus_label = parse_corpus_label(row[*label]);
            auto [it, inserted] = label_of.emplace(a.conversation_id, a.corpus_label);
            if (!inserted && it->second != a.corpus_label) {
                problems.push_back(where + "conversation " + a.conversation_id + " has conflicting corpus labels");
            }
        } catch (const SchemaError& e) {
            problems.push_back(where + e.what());
        }
        if (!seen.emplace(a.conversation_id, a.turn_index).second) {
            problems.push_back(where + "duplicate turn " + std::to_string(a.turn_index) + " in " + a.conversation_id);
        }
        out.push_back(std::move(a));
    }
    if (!problems.empty()) {
        std::string msg = "annotation schema errors:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw SchemaError(msg);
    }
    return out;
}

std::vector<AnnotatedTurn> read_annotations(const std::filesystem::path& path) {
    return parse_annotations(read_csv(path));
}

std::string write_annotations(const std::vector<AnnotatedTurn>& turns) {
    const std::size_t k = turns.empty() ? 0 : turns.front().rater_scores.size();
    std::string out = "conversation_id,turn_index";
    for (std::size_t i = 1; i <= k; ++i) out += ",rater_" + std::to_string(i);
    out += ",algorithm_score,corpus_label\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        return std::string(buf);
    };
    for (const auto& t : turns) {
        out += csv_escape(t.conversation_id) + "," + std::to_string(t.turn_index);
        for (double s : t.rater_scores) out += "," + num(s);
        out += "," + num(t.algorithm_score) + "," + std::string(to_string(t.corpus_label)) + "\n";
    }
    return out;
}

ValidationReport run_validation(const std::vector<AnnotatedTurn>& turns, double confidence) {
    if (turns.empty()) throw DegenerateInputError("no annotated turns");
    const std::size_t k = turns.front().rater_scores.size();
    if (k < 2) throw DegenerateInputError("validation needs at least two raters, found " + std::to_string(k));
    for (const auto& t : turns) {
        if (t.rater_scores.size() != k) throw ContractViolation("every turn needs the same number of rater scores");
    }

    ValidationReport rep;
    rep.turns = turns.size();
    rep.raters = k;
    rep.confidence = confidence;

    Matrix ratings(turns.size(), k);
    std::vector<double> rater_mean(turns.size());
    std::vector<double> algorithm(turns.size());
    for (std::size_t i = 0; i < turns.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            ratings(i, j) = turns[i].rater_scores[j];
            sum += turns[i].rater_scores[j];
        }
        rater_mean[i] = sum / static_cast<double>(k);
        algorithm[i] = turns[i].algorithm_score;
    }

    // Final algorithm score per conversation = score at its highest turn index.
    std::map<std::string, const AnnotatedTurn*> last;
    for (const auto& t : turns) {
        auto& slot = last[t.conversation_id];
        if (!slot || t.turn_index > slot->turn_index) slot = &t;
    }
    std::vector<double> low;
    std::vector<double> high;
    for (const auto& [id, t] : last) {
        (t->corpus_label == CorpusLabel::LowStress ? low : high).push_back(t->algorithm_score);
    }
    rep.conversations = last.size();
    rep.low_conversations = low.size();
    rep.high_conversations = high.size();
    if (low.size() < 2 || high.size() < 2) {
        throw DegenerateInputError("validation needs at least two conversations per corpus label");
    }

    rep.inter_rater = icc_2_1(ratings, confidence);
    rep.algorithm_vs_raters = pearson_r(rater_mean, algorithm);
    rep.discriminant_d = cohens_d(high, low);
    rep.low_final_mean = mean(low);
    rep.high_final_mean = mean(high);
    return rep;
}

nlohmann::json to_json(const ValidationReport& r) {
    return {{"conversations", r.conversations},
            {"turns", r.turns},
            {"raters", r.raters},
            {"low_stress_conversations", r.low_conversations},
            {"high_stress_conversations", r.high_conversations},
            {"icc_2_1", {{"icc", r.inter_rater.icc},
                         {"ci_low", r.inter_rater.ci_low},
                         {"ci_high", r.inter_rater.ci_high},
                         {"confidence", r.confidence}}},
            {"pearson", {{"r", r.algorithm_vs_raters.r}, {"p_value", r.algorithm_vs_raters.p_value}}},
            {"cohens_d", {{"d", r.discriminant_d},
                          {"low_stress_final_mean", r.low_final_mean},
                          {"high_stress_final_mean", r.high_final_mean}}}};
}

std::string to_table(const ValidationReport& r) {
    char buf[512];
    std::string out;
    std::snprintf(buf, sizeof(buf), "Stress algorithm validation: %zu conversations (%zu low, %zu high), %zu turns, %zu raters\n",
                  r.conversations, r.low_conversations, r.high_conversations, r.turns, r.raters);
    out += buf;
    out += "------------------------------------------------------------------\n";
    std::snprintf(buf, sizeof(buf), "  Inter-rater ICC(2,1)         %7.3f   %.0f%% CI [%.3f, %.3f]\n", r.inter_rater.icc,
                  r.confidence * 100.0, r.inter_rater.ci_low, r.inter_rater.ci_high);
    out += buf;
    std::snprintf(buf, sizeof(buf), "  Algorithm vs raters, r       %7.3f   p = %.3g\n", r.algorithm_vs_raters.r,
                  r.algorithm_vs_raters.p_value);
    out += buf;
    std::snprintf(buf, sizeof(buf), "  Low vs high stress, Cohen d  %7.2f   (final means %.1f vs %.1f)\n", r.discriminant_d,
                  r.low_final_mean, r.high_final_mean);
    out += buf;
    return out;
}

}  // namespace neurowise::stats
