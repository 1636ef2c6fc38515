#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>

#include "neurowise/service/orchestrator.hpp"
#include "neurowise/stats/analysis.hpp"

using namespace neurowise;
using nlohmann::json;

namespace {

const std::filesystem::path kData = NEUROWISE_DATA_DIR;
const std::filesystem::path kTestData = NEUROWISE_TEST_DATA_DIR;

struct Run {
    int exit_code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {};
    Run r;
    std::array<char, 4096> buf{};
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string stats_cli(const std::string& args) { return std::string(NEUROWISE_STATS_BIN) + " " + args; }
std::string main_cli(const std::string& args) { return std::string(NEUROWISE_BIN) + " " + args; }

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(StatsCli, AnalyzeJsonReproducesFixture) {
    const auto r = run(stats_cli("analyze --records " + (kTestData / "study_u57.csv").string() + " --format json"));
    ASSERT_EQ(r.exit_code, 0);
    const auto j = json::parse(r.out);
    EXPECT_DOUBLE_EQ(j.at("deficit_change_mann_whitney").at("statistic").get<double>(), 57.0);
    EXPECT_NEAR(j.at("deficit_change_mann_whitney").at("effect_size").get<double>(), -0.4933, 5e-5);
    EXPECT_FALSE(j.contains("helpful_cutoff"));
}

TEST(StatsCli, AnalyzeTableWithCutoffWritesReport) {
    const auto dir = scratch("nw_cli_analyze");
    const auto r = run(stats_cli("analyze --records " + (kTestData / "study_u57.csv").string() +
                                 " --helpful-cutoff 5 --report " + (dir / "r.txt").string()));
    ASSERT_EQ(r.exit_code, 0);
    std::ifstream in(dir / "r.txt");
    const std::string text((std::istreambuf_iterator<char>(in)), {});
    EXPECT_NE(text.find("U =   57.0"), std::string::npos) << text;
    EXPECT_NE(text.find("helpful"), std::string::npos);
}

TEST(StatsCli, SchemaErrorsExitTwo) {
    const auto dir = scratch("nw_cli_schema");
    write(dir / "bad.csv", "participant_id,condition\nP1,neurowise\n");
    EXPECT_EQ(run(stats_cli("analyze --records " + (dir / "bad.csv").string())).exit_code, 2);
    EXPECT_EQ(run(stats_cli("analyze --records " + (dir / "missing.csv").string())).exit_code, 2);
    EXPECT_EQ(run(stats_cli("validate --annotations " + (dir / "bad.csv").string())).exit_code, 2);
}

TEST(StatsCli, DegenerateInputExitsThree) {
    const auto dir = scratch("nw_cli_degenerate");
    std::ifstream in(kTestData / "study_u57.csv");
    std::string header, line, kept;
    std::getline(in, header);
    kept = header + "\n";
    while (std::getline(in, line)) {
        if (line.find("baseline") == std::string::npos) kept += line + "\n";
    }
    write(dir / "one_arm.csv", kept);
    EXPECT_EQ(run(stats_cli("analyze --records " + (dir / "one_arm.csv").string())).exit_code, 3);
}

TEST(StatsCli, UsageErrorsAreNonzero) {
    EXPECT_NE(run(stats_cli("analyze")).exit_code, 0);
    EXPECT_NE(run(stats_cli("validate --annotations x --format xml")).exit_code, 0);
}

TEST(StatsCli, AnnotateThenValidateBundledCorpus) {
    const auto dir = scratch("nw_cli_annotate");
    const auto a = run(stats_cli("annotate --scripts " + (kData / "validation" / "scripts.json").string() +
                                 " --ratings " + (kData / "validation" / "ratings.csv").string() + " --out " +
                                 (dir / "annotations.csv").string()));
    ASSERT_EQ(a.exit_code, 0);
    const auto v = run(stats_cli("validate --annotations " + (dir / "annotations.csv").string() + " --format json"));
    ASSERT_EQ(v.exit_code, 0);
    const auto j = json::parse(v.out);
    EXPECT_GE(j.at("icc_2_1").at("icc").get<double>(), 0.75);
    EXPECT_GE(j.at("pearson").at("r").get<double>(), 0.5);
    EXPECT_GE(j.at("cohens_d").at("d").get<double>(), 0.8);
    const auto t = run(stats_cli("validate --annotations " + (dir / "annotations.csv").string()));
    EXPECT_NE(t.out.find("ICC(2,1)"), std::string::npos);
}

TEST(StatsCli, FlattenJoinsTranscriptsAndSurvey) {
    const auto dir = scratch("nw_cli_flatten");
    auto config = service::ServiceConfig::defaults(kData);
    config.seed = 1;
    config.transcripts_dir = dir / "transcripts";
    auto orch = service::Orchestrator::from_config(config);
    std::string survey = "participant_id,session_id,deficit_pre_1,deficit_pre_2,deficit_post_1,deficit_post_2,"
                         "flexibility_pre,flexibility_post,rating_stress_bar,rating_interpreter,rating_coach,"
                         "rating_overall\n";
    for (int i = 0; i < 4; ++i) {
        const auto cond = i % 2 ? Condition::Baseline : Condition::NeuroWise;
        const auto s = orch->create_session_with_condition(cond, "friday-pizza-night");
        orch->process_turn(s.id, "Just eat it.");
        orch->process_turn(s.id, "I'm sorry, that must be hard.");
        survey += "P" + std::to_string(i) + "," + s.id + ",4,5,3,4,4,5," +
                  (cond == Condition::NeuroWise ? "6,5,6,6" : ",,,") + "\n";
    }
    write(dir / "survey.csv", survey);
    const auto r = run(stats_cli("flatten --transcripts " + (dir / "transcripts").string() + " --survey " +
                                 (dir / "survey.csv").string() + " --out " + (dir / "records.csv").string()));
    ASSERT_EQ(r.exit_code, 0);
    const auto records = stats::read_study_records(dir / "records.csv");
    ASSERT_EQ(records.size(), 4u);
    for (const auto& rec : records) {
        EXPECT_EQ(rec.turns_to_end, 2);
        EXPECT_EQ(rec.final_stress, 67);
    }
    EXPECT_EQ(run(stats_cli("analyze --records " + (dir / "records.csv").string())).exit_code, 0);

    write(dir / "survey_bad.csv", survey + "P9,unknown-session,4,5,3,4,4,5,,,,\n");
    EXPECT_EQ(run(stats_cli("flatten --transcripts " + (dir / "transcripts").string() + " --survey " +
                            (dir / "survey_bad.csv").string()))
                  .exit_code,
              2);
}

TEST(MainCli, ReplayReportsIdentical) {
    const auto dir = scratch("nw_cli_replay");
    auto orch = service::Orchestrator::from_config(service::ServiceConfig::defaults(kData));
    const auto s = orch->create_session_with_condition(Condition::NeuroWise, "friday-pizza-night");
    for (const char* t : {"Just eat it.", "It's not a big deal.", "I'm sorry, that must be hard.",
                          "Would you like to order pizza tomorrow instead?"}) {
        orch->process_turn(s.id, t);
    }
    write(dir / "t.jsonl", orch->export_session(s.id));
    const auto r = run(main_cli("replay --transcript " + (dir / "t.jsonl").string()));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("IDENTICAL 4 turn(s)"), std::string::npos) << r.out;

    auto text = orch->export_session(s.id);
    const auto pos = text.find("\"stress_after\":");
    ASSERT_NE(pos, std::string::npos);
    const auto value_start = pos + std::string("\"stress_after\":").size();
    const auto value_end = text.find_first_of(",}", value_start);
    text.replace(value_start, value_end - value_start, "99");
    write(dir / "tampered.jsonl", text);
    EXPECT_EQ(run(main_cli("replay --transcript " + (dir / "tampered.jsonl").string())).exit_code, 4);

    write(dir / "broken.jsonl", "{\n");
    EXPECT_EQ(run(main_cli("replay --transcript " + (dir / "broken.jsonl").string())).exit_code, 2);
}
