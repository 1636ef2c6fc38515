#include "neurowise/service/study_export.hpp"

#include <algorithm>
#include <map>

#include "neurowise/core/errors.hpp"
#include "neurowise/core/prompt_template.hpp"

namespace neurowise::service {

std::vector<TranscriptLine> read_transcripts(const std::filesystem::path& path) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(path)) {
        for (const auto& e : std::filesystem::directory_iterator(path)) {
            if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(path);
    }
    std::vector<TranscriptLine> out;
    for (const auto& f : files) {
        auto lines = parse_jsonl(read_text_file(f));
        out.insert(out.end(), std::make_move_iterator(lines.begin()), std::make_move_iterator(lines.end()));
    }
    return out;
}

std::vector<stats::StudyRecord> flatten_study(const std::vector<TranscriptLine>& lines, const stats::CsvTable& survey) {
    struct Outcome {
        Condition condition;
        int turns = 0;
        int final_stress = 0;
    };
    std::map<std::string, Outcome> sessions;
    for (const auto& l : lines) {
        auto [it, inserted] = sessions.try_emplace(l.session_id, Outcome{l.condition});
        if (static_cast<int>(l.record.turn_index) >= it->second.turns) {
            it->second.turns = static_cast<int>(l.record.turn_index);
            it->second.final_stress = l.record.stress_after;
        }
    }

    const auto sid = survey.column("session_id");
    if (!sid) throw SchemaError("survey sheet: missing column session_id");

    stats::CsvTable joined;
    std::vector<std::size_t> carried;
    for (std::size_t c = 0; c < survey.header.size(); ++c) {
        if (c == *sid || survey.header[c] == "condition" || survey.header[c] == "turns_to_end" ||
            survey.header[c] == "final_stress") {
            continue;
        }
        carried.push_back(c);
        joined.header.push_back(survey.header[c]);
    }
    joined.header.insert(joined.header.end(), {"condition", "turns_to_end", "final_stress"});

    std::vector<std::string> problems;
    for (std::size_t r = 0; r < survey.rows.size(); ++r) {
        const auto& row = survey.rows[r];
        const std::string where = "survey line " + std::to_string(survey.line_numbers[r]) + ": ";
        if (row.size() != survey.header.size()) {
            problems.push_back(where + "wrong number of cells");
            continue;
        }
        const auto it = sessions.find(row[*sid]);
        if (it == sessions.end()) {
            problems.push_back(where + "no transcript for session " + row[*sid]);
            continue;
        }
        std::vector<std::string> out;
        for (auto c : carried) out.push_back(row[c]);
        out.emplace_back(to_string(it->second.condition));
        out.push_back(std::to_string(it->second.turns));
        out.push_back(std::to_string(it->second.final_stress));
        joined.rows.push_back(std::move(out));
        joined.line_numbers.push_back(survey.line_numbers[r]);
    }
    if (!problems.empty()) {
        std::string msg = "survey join errors:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw SchemaError(msg);
    }
    return stats::parse_study_records(joined);
}

}  // namespace neurowise::service
