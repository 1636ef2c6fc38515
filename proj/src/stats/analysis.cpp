#include "neurowise/stats/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "neurowise/core/errors.hpp"
#include "neurowise/stats/descriptive.hpp"
#include "neurowise/stats/nonparametric.hpp"
#include "neurowise/stats/reliability.hpp"

namespace neurowise::stats {

namespace {

constexpr std::array<const char*, 10> kRequired{"participant_id", "condition",       "deficit_pre_1",
                                                "deficit_pre_2",  "deficit_post_1",  "deficit_post_2",
                                                "flexibility_pre", "flexibility_post", "turns_to_end",
                                                "final_stress"};

std::string rating_column(Feature f) { return "rating_" + std::string(to_string(f)); }

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string num(double v) { return fmt("%.10g", v); }

[[noreturn]] void throw_problems(const std::vector<std::string>& problems) {
    std::string msg = "study record schema errors:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw SchemaError(msg);
}

WithinTest within(const std::vector<double>& pre, const std::vector<double>& post) {
    WithinTest w;
    try {
        w.result = wilcoxon_signed_rank(pre, post);
    } catch (const DegenerateInputError& e) {
        w.note = e.what();
    }
    return w;
}

std::optional<double> alpha_of(const std::vector<StudyRecord>& rs, bool post, std::string& note) {
    Matrix m(rs.size(), 2);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto& items = post ? rs[i].deficit_post : rs[i].deficit_pre;
        m(i, 0) = reverse_score(items[0]);
        m(i, 1) = reverse_score(items[1]);
    }
    try {
        return cronbach_alpha(m);
    } catch (const DegenerateInputError& e) {
        if (!note.empty()) note += "; ";
        note += (post ? "post: " : "pre: ") + std::string(e.what());
        return std::nullopt;
    }
}

nlohmann::json within_json(const WithinTest& w) {
    if (w.result) return *w.result;
    return {{"skipped", w.note}};
}

std::string test_line(const char* label, const TestResult& t) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "  %-28s U = %6.1f (min %.1f)  p = %.4f  delta = %+.2f %s\n", label, t.statistic,
                  t.statistic_alt.value_or(t.statistic), t.p_value, t.effect_size,
                  std::string(to_string(t.effect_label)).c_str());
    return buf;
}

std::string within_line(const char* label, const WithinTest& w) {
    if (!w.result) return "  " + std::string(label) + "  skipped: " + w.note + "\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf), "  %-28s W- = %5.1f W+ = %5.1f  p = %.4f  r = %+.2f %s\n", label,
                  w.result->statistic, w.result->statistic_alt.value_or(0.0), w.result->p_value,
                  w.result->effect_size, std::string(to_string(w.result->effect_label)).c_str());
    return buf;
}

}  // namespace

std::string_view to_string(Feature f) {
    switch (f) {
        case Feature::StressBar: return "stress_bar";
        case Feature::Interpreter: return "interpreter";
        case Feature::Coach: return "coach";
        case Feature::Overall: return "overall";
    }
    return "?";
}

double reverse_score(double item) { return kLikertMax + kLikertMin - item; }

double StudyRecord::deficit_composite_pre() const {
    return (reverse_score(deficit_pre[0]) + reverse_score(deficit_pre[1])) / 2.0;
}

double StudyRecord::deficit_composite_post() const {
    return (reverse_score(deficit_post[0]) + reverse_score(deficit_post[1])) / 2.0;
}

std::vector<StudyRecord> parse_study_records(const CsvTable& t) {
    std::vector<std::string> problems;
    std::array<std::size_t, kRequired.size()> col{};
    for (std::size_t i = 0; i < kRequired.size(); ++i) {
        const auto c = t.column(kRequired[i]);
        if (!c) problems.push_back(std::string("header: missing column ") + kRequired[i]);
        else col[i] = *c;
    }
    if (!problems.empty()) throw_problems(problems);
    std::map<Feature, std::size_t> rating_col;
    for (auto f : kFeatures) {
        if (auto c = t.column(rating_column(f))) rating_col[f] = *c;
    }

    std::vector<StudyRecord> out;
    std::set<std::string> ids;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string where = "line " + std::to_string(t.line_numbers[r]) + ": ";
        if (row.size() != t.header.size()) {
            problems.push_back(where + "expected " + std::to_string(t.header.size()) + " cells, found " +
                               std::to_string(row.size()));
            continue;
        }
        StudyRecord s;
        s.participant_id = row[col[0]];
        if (s.participant_id.empty()) problems.push_back(where + "empty participant_id");
        else if (!ids.insert(s.participant_id).second) problems.push_back(where + "duplicate participant_id " + s.participant_id);
        try {
            s.condition = parse_condition(row[col[1]]);
        } catch (const SchemaError& e) {
            problems.push_back(where + e.what());
        }
        auto likert = [&](std::size_t c, double& dst) {
            const auto v = parse_number(row[c]);
            if (!v || *v < kLikertMin || *v > kLikertMax) {
                problems.push_back(where + t.header[c] + " must be a number in [1, 7]");
            } else {
                dst = *v;
            }
        };
        likert(col[2], s.deficit_pre[0]);
        likert(col[3], s.deficit_pre[1]);
        likert(col[4], s.deficit_post[0]);
        likert(col[5], s.deficit_post[1]);
        for (auto [c, dst] : {std::pair{col[6], &s.flexibility_pre}, std::pair{col[7], &s.flexibility_post}}) {
            const auto v = parse_number(row[c]);
            if (!v) problems.push_back(where + t.header[c] + " is not a number");
            else *dst = *v;
        }
        const auto turns = parse_number(row[col[8]]);
        if (!turns || *turns < 0 || *turns != std::floor(*turns)) {
            problems.push_back(where + "turns_to_end must be a nonnegative integer");
        } else {
            s.turns_to_end = static_cast<int>(*turns);
        }
        const auto stress = parse_number(row[col[9]]);
        if (!stress || *stress < 0 || *stress > 100 || *stress != std::floor(*stress)) {
            problems.push_back(where + "final_stress must be an integer in [0, 100]");
        } else {
            s.final_stress = static_cast<int>(*stress);
        }
        for (const auto& [f, c] : rating_col) {
            if (row[c].empty()) continue;
            double v = 0.0;
            likert(c, v);
            if (s.condition != Condition::NeuroWise) {
                problems.push_back(where + t.header[c] + " is only collected in the neurowise condition");
            }
            s.ratings[f] = v;
        }
        out.push_back(std::move(s));
    }
    if (!problems.empty()) throw_problems(problems);
    return out;
}

std::vector<StudyRecord> read_study_records(const std::filesystem::path& path) {
    return parse_study_records(read_csv(path));
}

std::string write_study_records(const std::vector<StudyRecord>& records) {
    std::string out;
    for (const char* h : kRequired) out += std::string(out.empty() ? "" : ",") + h;
    for (auto f : kFeatures) out += "," + rating_column(f);
    out += "\n";
    for (const auto& s : records) {
        out += csv_escape(s.participant_id) + "," + std::string(to_string(s.condition));
        for (double v : s.deficit_pre) out += "," + num(v);
        for (double v : s.deficit_post) out += "," + num(v);
        out += "," + num(s.flexibility_pre) + "," + num(s.flexibility_post);
        out += "," + std::to_string(s.turns_to_end) + "," + std::to_string(s.final_stress);
        for (auto f : kFeatures) {
            out += ",";
            if (auto it = s.ratings.find(f); it != s.ratings.end()) out += num(it->second);
        }
        out += "\n";
    }
    return out;
}

StudyReport run_analysis(const std::vector<StudyRecord>& records, std::optional<double> helpful_cutoff) {
    std::map<Condition, std::vector<StudyRecord>> by;
    for (const auto& r : records) by[r.condition].push_back(r);
    for (auto c : {Condition::Baseline, Condition::NeuroWise}) {
        if (by[c].size() < 2) {
            throw DegenerateInputError("analysis needs at least two records per condition; " +
                                       std::string(to_string(c)) + " has " + std::to_string(by[c].size()));
        }
    }

    StudyReport rep;
    rep.helpful_cutoff = helpful_cutoff;
    std::map<Condition, std::vector<double>> change, turns, stress;
    for (auto& [cond, rs] : by) {
        std::vector<double> dpre, dpost, fpre, fpost;
        for (const auto& r : rs) {
            dpre.push_back(r.deficit_composite_pre());
            dpost.push_back(r.deficit_composite_post());
            fpre.push_back(r.flexibility_pre);
            fpost.push_back(r.flexibility_post);
            change[cond].push_back(r.deficit_change());
            turns[cond].push_back(r.turns_to_end);
            stress[cond].push_back(r.final_stress);
        }
        auto& s = rep.conditions[cond];
        s.n = rs.size();
        s.deficit_pre_mean = mean(dpre);
        s.deficit_post_mean = mean(dpost);
        s.deficit_change_mean = mean(change[cond]);
        s.deficit_within = within(dpre, dpost);
        s.flexibility_pre_mean = mean(fpre);
        s.flexibility_post_mean = mean(fpost);
        s.flexibility_within = within(fpre, fpost);
        s.turns_median = median(turns[cond]);
        s.final_stress_median = median(stress[cond]);
    }

    constexpr auto nw = Condition::NeuroWise;
    constexpr auto bl = Condition::Baseline;
    rep.deficit_change_between = mann_whitney_u(change[nw], change[bl]);
    rep.turns_between = mann_whitney_u(turns[nw], turns[bl]);
    rep.final_stress_between = mann_whitney_u(stress[nw], stress[bl]);
    rep.alpha_pre = alpha_of(records, false, rep.alpha_note);
    rep.alpha_post = alpha_of(records, true, rep.alpha_note);

    for (auto f : kFeatures) {
        std::vector<double> v;
        for (const auto& r : by[nw]) {
            if (auto it = r.ratings.find(f); it != r.ratings.end()) v.push_back(it->second);
        }
        if (v.empty()) continue;
        FeatureSummary fs;
        fs.n = v.size();
        fs.mean = mean(v);
        fs.sd = v.size() >= 2 ? stddev(v) : 0.0;
        if (helpful_cutoff) {
            std::size_t hits = 0;
            for (double x : v) hits += x >= *helpful_cutoff ? 1 : 0;
            fs.helpful_share = static_cast<double>(hits) / static_cast<double>(v.size());
        }
        rep.features[f] = fs;
    }
    return rep;
}

nlohmann::json to_json(const StudyReport& r) {
    nlohmann::json j;
    for (const auto& [c, s] : r.conditions) {
        j["conditions"][std::string(to_string(c))] = {
            {"n", s.n},
            {"deficit", {{"pre_mean", s.deficit_pre_mean},
                         {"post_mean", s.deficit_post_mean},
                         {"change_mean", s.deficit_change_mean},
                         {"wilcoxon", within_json(s.deficit_within)}}},
            {"flexibility", {{"pre_mean", s.flexibility_pre_mean},
                             {"post_mean", s.flexibility_post_mean},
                             {"wilcoxon", within_json(s.flexibility_within)}}},
            {"turns_to_end_median", s.turns_median},
            {"final_stress_median", s.final_stress_median}};
    }
    j["deficit_change_mann_whitney"] = r.deficit_change_between;
    j["cronbach_alpha"] = {{"pre", r.alpha_pre ? nlohmann::json(*r.alpha_pre) : nlohmann::json(nullptr)},
                           {"post", r.alpha_post ? nlohmann::json(*r.alpha_post) : nlohmann::json(nullptr)}};
    if (!r.alpha_note.empty()) j["cronbach_alpha"]["note"] = r.alpha_note;
    j["turns_to_end_mann_whitney"] = r.turns_between;
    j["final_stress_mann_whitney"] = r.final_stress_between;
    j["feature_ratings"] = nlohmann::json::object();
    for (const auto& [f, s] : r.features) {
        nlohmann::json fj = {{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}};
        if (s.helpful_share) fj["helpful_share"] = *s.helpful_share;
        j["feature_ratings"][std::string(to_string(f))] = fj;
    }
    if (r.helpful_cutoff) j["helpful_cutoff"] = *r.helpful_cutoff;
    return j;
}

std::string to_table(const StudyReport& r) {
    std::string out = "Study analysis\n";
    out += "------------------------------------------------------------------\n";
    char buf[256];
    out += "Deficit framing (2-item composite, reverse-scored; higher = more deficit)\n";
    for (const auto& [c, s] : r.conditions) {
        std::snprintf(buf, sizeof(buf), "  %-10s n = %2zu  pre %.2f  post %.2f  change %+.2f\n",
                      std::string(to_string(c)).c_str(), s.n, s.deficit_pre_mean, s.deficit_post_mean,
                      s.deficit_change_mean);
        out += buf;
    }
    out += test_line("Change, neurowise vs baseline", r.deficit_change_between);
    for (const auto& [c, s] : r.conditions) {
        out += within_line(("Within " + std::string(to_string(c))).c_str(), s.deficit_within);
    }
    out += "  Cronbach alpha  pre " + (r.alpha_pre ? fmt("%.2f", *r.alpha_pre) : std::string("n/a")) + "  post " +
           (r.alpha_post ? fmt("%.2f", *r.alpha_post) : std::string("n/a")) + "\n";
    if (!r.alpha_note.empty()) out += "    (" + r.alpha_note + ")\n";

    out += "Flexibility\n";
    for (const auto& [c, s] : r.conditions) {
        std::snprintf(buf, sizeof(buf), "  %-10s pre %.2f  post %.2f\n", std::string(to_string(c)).c_str(),
                      s.flexibility_pre_mean, s.flexibility_post_mean);
        out += buf;
        out += within_line(("Within " + std::string(to_string(c))).c_str(), s.flexibility_within);
    }

    out += "Conversation outcomes\n";
    for (const auto& [c, s] : r.conditions) {
        std::snprintf(buf, sizeof(buf), "  %-10s turns to end Mdn = %.1f  final stress Mdn = %.1f\n",
                      std::string(to_string(c)).c_str(), s.turns_median, s.final_stress_median);
        out += buf;
    }
    out += test_line("Turns to end", r.turns_between);
    out += test_line("Final stress", r.final_stress_between);

    if (!r.features.empty()) {
        out += "Feature ratings (neurowise, 1-7)\n";
        for (const auto& [f, s] : r.features) {
            std::snprintf(buf, sizeof(buf), "  %-12s n = %2zu  M = %.2f  SD = %.2f", std::string(to_string(f)).c_str(),
                          s.n, s.mean, s.sd);
            out += buf;
            if (s.helpful_share) out += "  helpful (>= " + fmt("%g", *r.helpful_cutoff) + ") " + fmt("%.0f%%", *s.helpful_share * 100.0);
            out += "\n";
        }
    }
    return out;
}

}  // namespace neurowise::stats
