#include <gtest/gtest.h>

#include "neurowise/core/errors.hpp"
#include "neurowise/stats/analysis.hpp"
#include "neurowise/stats/csv.hpp"
#include "neurowise/stats/validation.hpp"

using namespace neurowise;
using namespace neurowise::stats;

namespace {

const std::filesystem::path kTestData = NEUROWISE_TEST_DATA_DIR;

std::string perfect_annotations() {
    std::string csv = "conversation_id,turn_index,rater_1,rater_2,algorithm_score,corpus_label\n";
    const char* rows[] = {"a,1,50,50,50,low_stress",  "a,2,40,40,40,low_stress",  "b,1,55,55,55,low_stress",
                          "b,2,35,35,35,low_stress",  "c,1,80,80,80,high_stress", "c,2,95,95,95,high_stress",
                          "d,1,75,75,75,high_stress", "d,2,100,100,100,high_stress"};
    for (const char* r : rows) csv += std::string(r) + "\n";
    return csv;
}

std::string expect_schema_error(const std::string& csv) {
    try {
        parse_annotations(parse_csv(csv));
    } catch (const SchemaError& e) {
        return e.what();
    }
    ADD_FAILURE() << "no schema error";
    return {};
}

StudyRecord record(const std::string& id, Condition c, double change_items, int turns) {
    StudyRecord r;
    r.participant_id = id;
    r.condition = c;
    r.deficit_pre = {3, 4};
    r.deficit_post = {3 + change_items, 4 + change_items};
    r.flexibility_pre = 4;
    r.flexibility_post = 5;
    r.turns_to_end = turns;
    r.final_stress = 40;
    return r;
}

}  // namespace

TEST(Csv, QuotedFieldsBomAndBlankLines) {
    const auto t = parse_csv("\xEF\xBB\xBF" "a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\n\n1,2\n");
    ASSERT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0][0], "x, y");
    EXPECT_EQ(t.rows[0][1], "say \"hi\"");
    EXPECT_EQ(t.line_numbers[1], 4u);
    EXPECT_THROW(parse_csv("a\n\"open"), SchemaError);
    EXPECT_THROW(parse_csv(""), SchemaError);
}

TEST(Csv, EscapeRoundTrip) {
    const std::string tricky = "he said \"no\", twice";
    const auto t = parse_csv("h\n" + csv_escape(tricky) + "\n");
    EXPECT_EQ(t.rows[0][0], tricky);
}

TEST(Csv, StrictNumbers) {
    EXPECT_EQ(parse_number(" 4.5 "), 4.5);
    EXPECT_EQ(parse_number("+3"), 3.0);
    EXPECT_FALSE(parse_number("4,5"));
    EXPECT_FALSE(parse_number("4.5x"));
    EXPECT_FALSE(parse_number(""));
    EXPECT_FALSE(parse_number("nan"));
}

TEST(Validation, PerfectAgreementFixture) {
    const auto rep = run_validation(parse_annotations(parse_csv(perfect_annotations())));
    EXPECT_DOUBLE_EQ(rep.inter_rater.icc, 1.0);
    EXPECT_NEAR(rep.algorithm_vs_raters.r, 1.0, 1e-12);
    EXPECT_EQ(rep.conversations, 4u);
    EXPECT_EQ(rep.raters, 2u);
    EXPECT_GT(rep.discriminant_d, 3.0);
    EXPECT_DOUBLE_EQ(rep.low_final_mean, 37.5);
    EXPECT_DOUBLE_EQ(rep.high_final_mean, 97.5);
}

TEST(Validation, ReportFormats) {
    const auto rep = run_validation(parse_annotations(parse_csv(perfect_annotations())));
    const auto j = to_json(rep);
    EXPECT_DOUBLE_EQ(j.at("icc_2_1").at("icc").get<double>(), 1.0);
    EXPECT_TRUE(j.contains("pearson"));
    EXPECT_TRUE(j.contains("cohens_d"));
    const auto table = to_table(rep);
    EXPECT_NE(table.find("ICC(2,1)"), std::string::npos);
    EXPECT_NE(table.find("Cohen d"), std::string::npos);
}

TEST(Validation, SingleRaterIsAPreconditionError) {
    const auto turns = parse_annotations(parse_csv("conversation_id,turn_index,rater_1,algorithm_score,corpus_label\n"
                                                   "a,1,50,50,low_stress\nb,1,40,40,low_stress\n"
                                                   "c,1,90,90,high_stress\nd,1,80,80,high_stress\n"));
    EXPECT_THROW(run_validation(turns), DegenerateInputError);
}

TEST(Validation, NeedsTwoConversationsPerLabel) {
    const auto turns = parse_annotations(parse_csv("conversation_id,turn_index,rater_1,rater_2,algorithm_score,corpus_label\n"
                                                   "a,1,50,52,50,low_stress\na,2,40,41,40,low_stress\n"
                                                   "c,1,90,88,90,high_stress\nd,1,80,81,80,high_stress\n"));
    EXPECT_THROW(run_validation(turns), DegenerateInputError);
}

TEST(Validation, SchemaDiagnosticsNameEveryBadLine) {
    const auto msg = expect_schema_error(
        "conversation_id,turn_index,rater_1,rater_2,algorithm_score,corpus_label\n"
        "a,1,50,50,50,low_stress\n"
        "a,x,50,50,50,low_stress\n"
        "b,1,fifty,50,50,medium\n");
    EXPECT_NE(msg.find("line 3"), std::string::npos);
    EXPECT_NE(msg.find("line 4"), std::string::npos);
    EXPECT_NE(msg.find("rater_1"), std::string::npos);
    EXPECT_NE(msg.find("corpus_label"), std::string::npos);
}

TEST(Validation, SchemaRejectsMissingColumnsDuplicatesAndLabelConflicts) {
    EXPECT_NE(expect_schema_error("conversation_id,rater_1\na,1\n").find("turn_index"), std::string::npos);
    EXPECT_NE(expect_schema_error("conversation_id,turn_index,rater_1,algorithm_score,corpus_label\n"
                                  "a,1,5,5,low_stress\na,1,5,5,low_stress\n")
                  .find("duplicate"),
              std::string::npos);
    EXPECT_NE(expect_schema_error("conversation_id,turn_index,rater_1,algorithm_score,corpus_label\n"
                                  "a,1,5,5,low_stress\na,2,5,5,high_stress\n")
                  .find("conflicting"),
              std::string::npos);
}

TEST(Validation, AnnotationsRoundTrip) {
    const auto turns = parse_annotations(parse_csv(perfect_annotations()));
    const auto again = parse_annotations(parse_csv(write_annotations(turns)));
    ASSERT_EQ(again.size(), turns.size());
    for (std::size_t i = 0; i < turns.size(); ++i) {
        EXPECT_EQ(again[i].conversation_id, turns[i].conversation_id);
        EXPECT_EQ(again[i].rater_scores, turns[i].rater_scores);
        EXPECT_EQ(again[i].algorithm_score, turns[i].algorithm_score);
        EXPECT_EQ(again[i].corpus_label, turns[i].corpus_label);
    }
}

TEST(Analysis, ReverseScoring) {
    EXPECT_DOUBLE_EQ(reverse_score(1), 7);
    EXPECT_DOUBLE_EQ(reverse_score(7), 1);
    StudyRecord r;
    r.deficit_pre = {2, 4};
    r.deficit_post = {5, 5};
    EXPECT_DOUBLE_EQ(r.deficit_composite_pre(), 5.0);
    EXPECT_DOUBLE_EQ(r.deficit_change(), -2.0);
}

// Values below were computed independently (scipy) from tests/data/study_u57.csv.
TEST(Analysis, SyntheticU57Fixture) {
    const auto rep = run_analysis(read_study_records(kTestData / "study_u57.csv"), 5.0);
    const auto& between = rep.deficit_change_between;
    EXPECT_DOUBLE_EQ(between.statistic, 57.0);
    EXPECT_NEAR(between.effect_size, -0.4933, 5e-4);
    EXPECT_EQ(between.effect_label, EffectLabel::Large);
    EXPECT_NEAR(between.p_value, 0.02107845309466094, 1e-9);

    const auto& nw = rep.conditions.at(Condition::NeuroWise);
    const auto& bl = rep.conditions.at(Condition::Baseline);
    EXPECT_EQ(nw.n, 15u);
    EXPECT_NEAR(nw.deficit_change_mean, -0.6333333333, 1e-9);
    EXPECT_NEAR(bl.deficit_change_mean, 0.30, 1e-9);
    ASSERT_TRUE(nw.deficit_within.result);
    EXPECT_DOUBLE_EQ(nw.deficit_within.result->statistic, 68.0);
    EXPECT_DOUBLE_EQ(*nw.deficit_within.result->statistic_alt, 10.0);
    EXPECT_DOUBLE_EQ(bl.deficit_within.result->statistic, 31.5);
    EXPECT_DOUBLE_EQ(*bl.deficit_within.result->statistic_alt, 59.5);

    EXPECT_DOUBLE_EQ(nw.turns_median, 8.0);
    EXPECT_DOUBLE_EQ(bl.turns_median, 11.0);
    EXPECT_DOUBLE_EQ(rep.turns_between.statistic, 40.5);
    EXPECT_NEAR(rep.turns_between.p_value, 0.002737033996636219, 1e-9);
    EXPECT_DOUBLE_EQ(nw.final_stress_median, 30.0);
    EXPECT_DOUBLE_EQ(bl.final_stress_median, 70.0);
    EXPECT_DOUBLE_EQ(rep.final_stress_between.statistic, 28.0);
    EXPECT_NEAR(rep.final_stress_between.p_value, 0.0004454046645173775, 1e-9);

    ASSERT_TRUE(rep.alpha_pre && rep.alpha_post);
    EXPECT_NEAR(*rep.alpha_pre, 0.8782867985904041, 1e-9);
    EXPECT_NEAR(*rep.alpha_post, 0.926088806922968, 1e-9);

    const auto& bar = rep.features.at(Feature::StressBar);
    EXPECT_EQ(bar.n, 15u);
    EXPECT_NEAR(bar.mean, 5.666666666666667, 1e-12);
    EXPECT_NEAR(bar.sd, 1.2344267996967353, 1e-12);
    EXPECT_NEAR(*bar.helpful_share, 0.7333333333333333, 1e-12);
}

TEST(Analysis, ReportPrintsDeltaAndLabel) {
    const auto rep = run_analysis(read_study_records(kTestData / "study_u57.csv"));
    const auto table = to_table(rep);
    EXPECT_NE(table.find("delta = -0.49 large"), std::string::npos) << table;
    EXPECT_NE(table.find("Mdn = 8.0"), std::string::npos);
    EXPECT_NE(table.find("Mdn = 11.0"), std::string::npos);
    EXPECT_EQ(table.find("helpful"), std::string::npos);
    const auto j = to_json(rep);
    EXPECT_EQ(j.at("deficit_change_mann_whitney").at("effect_label"), "large");
    EXPECT_FALSE(j.contains("helpful_cutoff"));
}

TEST(Analysis, IdenticalConditionsGiveZeroDelta) {
    std::vector<StudyRecord> rs;
    int i = 0;
    for (auto c : {Condition::Baseline, Condition::NeuroWise}) {
        rs.push_back(record("p" + std::to_string(i++), c, 1, 8));
        rs.push_back(record("p" + std::to_string(i++), c, 0, 9));
        rs.push_back(record("p" + std::to_string(i++), c, -1, 10));
    }
    const auto rep = run_analysis(rs);
    EXPECT_DOUBLE_EQ(rep.deficit_change_between.effect_size, 0.0);
    EXPECT_EQ(rep.deficit_change_between.effect_label, EffectLabel::Small);
}

TEST(Analysis, MediansOfConstantTurnColumns) {
    std::vector<StudyRecord> rs;
    for (int i = 0; i < 3; ++i) rs.push_back(record("n" + std::to_string(i), Condition::NeuroWise, -1, 8));
    for (int i = 0; i < 3; ++i) rs.push_back(record("b" + std::to_string(i), Condition::Baseline, 1, 11));
    const auto rep = run_analysis(rs);
    EXPECT_DOUBLE_EQ(rep.conditions.at(Condition::NeuroWise).turns_median, 8.0);
    EXPECT_DOUBLE_EQ(rep.conditions.at(Condition::Baseline).turns_median, 11.0);
}

TEST(Analysis, DegenerateWithinTestsAreNotedNotFatal) {
    std::vector<StudyRecord> rs;
    for (int i = 0; i < 2; ++i) rs.push_back(record("n" + std::to_string(i), Condition::NeuroWise, 0, 8));
    for (int i = 0; i < 2; ++i) rs.push_back(record("b" + std::to_string(i), Condition::Baseline, 1, 11));
    const auto rep = run_analysis(rs);
    EXPECT_FALSE(rep.conditions.at(Condition::NeuroWise).deficit_within.result);
    EXPECT_FALSE(rep.conditions.at(Condition::NeuroWise).deficit_within.note.empty());
    EXPECT_TRUE(rep.conditions.at(Condition::Baseline).deficit_within.result);
}

TEST(Analysis, TooFewRecordsPerCondition) {
    std::vector<StudyRecord> rs{record("a", Condition::NeuroWise, 0, 8), record("b", Condition::NeuroWise, 1, 8),
                                record("c", Condition::Baseline, 0, 9)};
    EXPECT_THROW(run_analysis(rs), DegenerateInputError);
}

TEST(Analysis, SchemaDiagnostics) {
    const std::string header =
        "participant_id,condition,deficit_pre_1,deficit_pre_2,deficit_post_1,deficit_post_2,flexibility_pre,"
        "flexibility_post,turns_to_end,final_stress,rating_coach\n";
    try {
        parse_study_records(parse_csv(header + "p1,neurowise,9,4,4,4,3,4,8,30,5\n"
                                               "p2,baseline,4,4,4,4,3,4,8.5,30,6\n"
                                               "p3,control,4,4,4,4,3,4,8,130,\n"));
        FAIL() << "no schema error";
    } catch (const SchemaError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("line 2: deficit_pre_1"), std::string::npos) << msg;
        EXPECT_NE(msg.find("line 3: turns_to_end"), std::string::npos) << msg;
        EXPECT_NE(msg.find("line 3: rating_coach is only collected"), std::string::npos) << msg;
        EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
        EXPECT_NE(msg.find("final_stress"), std::string::npos) << msg;
    }
    EXPECT_THROW(parse_study_records(parse_csv("participant_id,condition\np,baseline\n")), SchemaError);
}

TEST(Analysis, RecordsRoundTrip) {
    const auto rs = read_study_records(kTestData / "study_u57.csv");
    const auto again = parse_study_records(parse_csv(write_study_records(rs)));
    ASSERT_EQ(again.size(), rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        EXPECT_EQ(again[i].participant_id, rs[i].participant_id);
        EXPECT_EQ(again[i].deficit_post, rs[i].deficit_post);
        EXPECT_EQ(again[i].ratings, rs[i].ratings);
        EXPECT_EQ(again[i].final_stress, rs[i].final_stress);
    }
}
