#pragma once

#include <filesystem>
#include <vector>

#include "neurowise/service/transcript.hpp"
#include "neurowise/stats/analysis.hpp"
#include "neurowise/stats/csv.hpp"

namespace neurowise::service {

/// Reads every *.jsonl file in `path` (or the single file `path`).
std::vector<TranscriptLine> read_transcripts(const std::filesystem::path& path);

/// Joins session exports with a survey sheet into StudyRecords.
/// Survey columns: participant_id, session_id, deficit_pre_1, deficit_pre_2,
/// deficit_post_1, deficit_post_2, flexibility_pre, flexibility_post and optional
/// rating_* columns. Condition, turns_to_end and final_stress come from the transcript.
/// Throws SchemaError on unknown sessions or bad survey cells.
std::vector<stats::StudyRecord> flatten_study(const std::vector<TranscriptLine>& lines, const stats::CsvTable& survey);

}  // namespace neurowise::service
