// neurowise-stats: algorithm validation and study analysis pipelines.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "neurowise/core/errors.hpp"
#include "neurowise/service/config.hpp"
#include "neurowise/service/orchestrator.hpp"
#include "neurowise/service/script_corpus.hpp"
#include "neurowise/service/study_export.hpp"
#include "neurowise/stats/analysis.hpp"
#include "neurowise/stats/validation.hpp"

namespace {

using namespace neurowise;

constexpr int kExitSchema = 2;
constexpr int kExitDegenerate = 3;

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write " + path);
    out << text;
}

service::ServiceConfig config_or_defaults(const std::string& path) {
    if (!path.empty()) return service::ServiceConfig::load(path);
#ifdef NEUROWISE_DEFAULT_DATA_DIR
    return service::ServiceConfig::defaults(NEUROWISE_DEFAULT_DATA_DIR);
#else
    return service::ServiceConfig::defaults("data");
#endif
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stress-algorithm validation and study analysis"};
    app.require_subcommand(1);

    std::string annotations, records, report, format = "table", config_path, scripts, ratings, transcripts, survey;
    std::optional<double> helpful_cutoff;
    double confidence = 0.95;

    auto* validate = app.add_subcommand("validate", "ICC, Pearson r and Cohen's d over annotated conversations");
    validate->add_option("--annotations", annotations, "Annotated-turn CSV")->required();
    validate->add_option("--report", report, "Write the report here instead of stdout");
    validate->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));
    validate->add_option("--confidence", confidence, "ICC confidence level")->check(CLI::Range(0.5, 0.999));

    auto* analyze = app.add_subcommand("analyze", "Between- and within-condition study analysis");
    analyze->add_option("--records", records, "StudyRecord CSV")->required();
    analyze->add_option("--report", report, "Write the report here instead of stdout");
    analyze->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));
    analyze->add_option("--helpful-cutoff", helpful_cutoff, "Rating at or above which a feature counts as helpful")
        ->check(CLI::Range(1.0, 7.0));

    auto* annotate = app.add_subcommand("annotate", "Score scripted conversations and join them with rater scores");
    annotate->add_option("--scripts", scripts, "Script corpus JSON")->required();
    annotate->add_option("--ratings", ratings, "Rater sheet CSV")->required();
    annotate->add_option("--config", config_path, "Service config (defaults to the bundled data)");
    annotate->add_option("--out", report, "Write the annotation CSV here instead of stdout");

    auto* flatten = app.add_subcommand("flatten", "Join session exports and survey answers into StudyRecord CSV");
    flatten->add_option("--transcripts", transcripts, "JSONL file or directory of JSONL files")->required();
    flatten->add_option("--survey", survey, "Survey CSV keyed by session_id")->required();
    flatten->add_option("--out", report, "Write the StudyRecord CSV here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            const auto rep = stats::run_validation(stats::read_annotations(annotations), confidence);
            emit(format == "json" ? stats::to_json(rep).dump(2) : stats::to_table(rep), report);
        } else if (*analyze) {
            const auto rep = stats::run_analysis(stats::read_study_records(records), helpful_cutoff);
            emit(format == "json" ? stats::to_json(rep).dump(2) : stats::to_table(rep), report);
        } else if (*annotate) {
            const auto config = config_or_defaults(config_path);
            const auto corpus = service::load_script_corpus(scripts);
            const auto* scenario = config.find_scenario(corpus.scenario_id);
            if (!scenario) throw SchemaError("unknown scenario '" + corpus.scenario_id + "'");
            auto parts = service::load_pipeline_parts(config);
            const stress::MessageClassifier classifier(parts.provider, parts.classifier_prompt,
                                                       config.classifier_context);
            const auto turns = service::annotate_corpus(corpus, service::read_rating_sheet(ratings), *scenario,
                                                        classifier, config.delta_table, config.bands);
            emit(stats::write_annotations(turns), report);
        } else if (*flatten) {
            const auto rows =
                service::flatten_study(service::read_transcripts(transcripts), stats::read_csv(survey));
            emit(stats::write_study_records(rows), report);
        }
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const DegenerateInputError& e) {
        std::cerr << "degenerate input: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
