#include <gtest/gtest.h>

#include "gendet/common/error.h"
#include "gendet/survey/analytics.h"
#include "test_support.h"

namespace gendet::survey {
namespace {

// Trials ordered by resolution, three real then three fake for each.
SurveySession MakeSession(const std::string& id, Group group, std::optional<int> experience,
                          const std::function<AnswerScale(const Trial&)>& answer) {
  SurveySession s;
  s.id = id;
  s.group = group;
  for (int res : kResolutions) {
    for (Label l : {Label::kReal, Label::kFake}) {
      for (int k = 0; k < 3; ++k) {
        const int index = static_cast<int>(s.trials.size());
        s.trials.push_back({index, id + "-" + std::to_string(index), l, res});
      }
    }
  }
  for (const auto& t : s.trials) s.answers.push_back(answer(t));
  if (experience) s.meta = MetaAnswers{experience, {}};
  s.CheckInvariants();
  return s;
}

AnswerScale Right(Label truth) {
  return truth == Label::kReal ? AnswerScale::kProbablyReal : AnswerScale::kCertainlyFake;
}

AnswerScale Wrong(Label truth) {
  return truth == Label::kReal ? AnswerScale::kProbablyFake : AnswerScale::kCertainlyReal;
}

std::vector<SurveySession> TwoParticipants() {
  return {MakeSession("p1", Group::kFeedback, 4,
                      [](const Trial& t) {
                        if (t.truth == Label::kReal || t.resolution == 1024) return Right(t.truth);
                        return Wrong(t.truth);
                      }),
          MakeSession("p2", Group::kControl, 1, [](const Trial& t) {
            if (t.truth == Label::kFake || t.resolution == 256) return Right(t.truth);
            return AnswerScale::kDontKnow;
          })};
}

const AccuracyRow& Row(const std::vector<AccuracyRow>& rows, const std::string& section,
                       const std::string& key) {
  for (const auto& r : rows) {
    if (r.section == section && r.key == key) return r;
  }
  throw std::runtime_error("missing row " + section + "/" + key);
}

void ExpectRow(const AccuracyRow& row, int participants, AccuracyCell real, AccuracyCell fake) {
  SCOPED_TRACE(row.section + "/" + row.key);
  EXPECT_EQ(row.participants, participants);
  EXPECT_EQ(row.real, real);
  EXPECT_EQ(row.fake, fake);
  EXPECT_EQ(row.all, (AccuracyCell{real.correct + fake.correct, real.total + fake.total}));
}

TEST(Analytics, TwoParticipantTables) {
  const auto sessions = TwoParticipants();
  const Analytics a = ComputeAnalytics(sessions);
  EXPECT_EQ(a.participants, 2);
  EXPECT_EQ(a.excluded_incomplete, 0);
  EXPECT_EQ(a.missing_experience, 0);
  ASSERT_EQ(a.accuracy.size(), 8u);
  ExpectRow(Row(a.accuracy, "total", "all"), 2, {12, 18}, {12, 18});
  ExpectRow(Row(a.accuracy, "group", "feedback"), 1, {9, 9}, {3, 9});
  ExpectRow(Row(a.accuracy, "group", "control"), 1, {3, 9}, {9, 9});
  ExpectRow(Row(a.accuracy, "resolution", "256"), 2, {6, 6}, {3, 6});
  ExpectRow(Row(a.accuracy, "resolution", "512"), 2, {3, 6}, {3, 6});
  ExpectRow(Row(a.accuracy, "resolution", "1024"), 2, {3, 6}, {6, 6});
  ExpectRow(Row(a.accuracy, "experience", "little"), 1, {3, 9}, {9, 9});
  ExpectRow(Row(a.accuracy, "experience", "much"), 1, {9, 9}, {3, 9});

  ASSERT_EQ(a.bounds.size(), 6u);
  ExpectRow(Row(a.bounds, "upper", "little"), 0, {0, 0}, {0, 0});
  ExpectRow(Row(a.bounds, "upper", "much"), 1, {3, 3}, {3, 3});
  ExpectRow(Row(a.bounds, "upper", "all"), 1, {3, 3}, {3, 3});
  ExpectRow(Row(a.bounds, "lower", "little"), 1, {3, 3}, {3, 3});
  ExpectRow(Row(a.bounds, "lower", "much"), 0, {0, 0}, {0, 0});
  ExpectRow(Row(a.bounds, "lower", "all"), 1, {3, 3}, {3, 3});
  EXPECT_FALSE(Row(a.bounds, "upper", "little").all.accuracy().has_value());
}

TEST(Analytics, TwoParticipantTests) {
  const Analytics a = ComputeAnalytics(TwoParticipants());
  ASSERT_TRUE(a.resolution_anova.result.has_value());
  const StatResult& f = *a.resolution_anova.result;
  // Per-resolution participant accuracies {0.5, 1}, {0.5, 0.5}, {1, 0.5}.
  EXPECT_NEAR(f.statistic, 0.5, 1e-12);
  EXPECT_EQ(f.df1, 2.0);
  EXPECT_EQ(f.df2, 3.0);
  EXPECT_NEAR(f.means[0], 0.75, 1e-12);
  EXPECT_NEAR(f.means[1], 0.5, 1e-12);
  EXPECT_FALSE(a.feedback_vs_control.result.has_value());
  EXPECT_EQ(a.feedback_vs_control.reason,
            "not computable: needs at least two participants per group");
  EXPECT_FALSE(a.experience_little_vs_much.result.has_value());
}

TEST(Analytics, JsonShape) {
  const auto doc = ToJson(ComputeAnalytics(TwoParticipants()));
  EXPECT_EQ(doc["participants"], 2);
  EXPECT_EQ(doc["accuracy"][0]["section"], "total");
  EXPECT_EQ(doc["accuracy"][0]["all"]["correct"], 24);
  EXPECT_EQ(doc["accuracy"][0]["all"]["total"], 36);
  EXPECT_DOUBLE_EQ(doc["accuracy"][0]["all"]["accuracy"].get<double>(), 24.0 / 36.0);
  EXPECT_TRUE(doc["bounds"][0]["all"]["accuracy"].is_null());
  ASSERT_EQ(doc["tests"].size(), 3u);
  EXPECT_EQ(doc["tests"][0]["name"], "feedback_vs_control_fake_accuracy");
  EXPECT_EQ(doc["tests"][0]["computable"], false);
  EXPECT_EQ(doc["tests"][1]["name"], "resolution_anova_accuracy");
  EXPECT_EQ(doc["tests"][1]["computable"], true);
  EXPECT_EQ(doc["tests"][2]["name"], "little_vs_much_experience_accuracy");
}

TEST(Analytics, MarkdownPercentages) {
  const std::string md = RenderAnalyticsMarkdown(ComputeAnalytics(TwoParticipants()));
  EXPECT_NE(md.find("| total | all | 2 | 66.7 | 66.7 | 66.7 |"), std::string::npos) << md;
  EXPECT_NE(md.find("| upper | little | 0 | - | - | - |"), std::string::npos) << md;
  EXPECT_NE(md.find("F(2, 3) = 0.5000"), std::string::npos) << md;
}

TEST(Analytics, FeedbackVersusControlUsesFakeAccuracy) {
  std::vector<SurveySession> sessions;
  // Feedback participants get 3, 6 fakes right; control 0, 3. Reals are noise.
  const int fb[] = {3, 6}, ctl[] = {0, 3};
  int n = 0;
  for (auto [group, fakes] : {std::pair{Group::kFeedback, fb}, std::pair{Group::kControl, ctl}}) {
    for (int k : {fakes[0], fakes[1]}) {
      sessions.push_back(MakeSession("s" + std::to_string(n++), group, 2, [k](const Trial& t) {
        if (t.truth == Label::kReal) return t.index % 2 ? Right(t.truth) : Wrong(t.truth);
        int fake_rank = (t.index % 6) - 3 + 3 * (t.index / 6);
        return fake_rank < k ? Right(t.truth) : Wrong(t.truth);
      }));
    }
  }
  const Analytics a = ComputeAnalytics(sessions);
  ASSERT_TRUE(a.feedback_vs_control.result.has_value());
  const StatResult& t = *a.feedback_vs_control.result;
  EXPECT_NEAR(t.means[0], 0.5, 1e-12);
  EXPECT_NEAR(t.means[1], 1.0 / 6.0, 1e-12);
  const StatResult oracle = TTestIndependent(std::vector<double>{3 / 9.0, 6 / 9.0},
                                             std::vector<double>{0.0, 3 / 9.0});
  EXPECT_NEAR(t.statistic, oracle.statistic, 1e-12);
  EXPECT_FALSE(a.experience_little_vs_much.result.has_value());
}

TEST(Analytics, IncompleteAndMissingExperience) {
  auto sessions = TwoParticipants();
  sessions.push_back(sessions[0]);
  sessions.back().id = "partial";
  for (int i = 10; i < 18; ++i) sessions.back().answers[i].reset();
  sessions.push_back(sessions[1]);
  sessions.back().id = "quiet";
  sessions.back().meta.reset();
  const Analytics a = ComputeAnalytics(sessions);
  EXPECT_EQ(a.participants, 3);
  EXPECT_EQ(a.excluded_incomplete, 1);
  EXPECT_EQ(a.missing_experience, 1);
  EXPECT_EQ(Row(a.accuracy, "total", "all").participants, 3);
  EXPECT_EQ(Row(a.accuracy, "experience", "little").participants, 1);
  EXPECT_EQ(Row(a.bounds, "lower", "all").participants, 2);
}

TEST(Analytics, SingleParticipant) {
  const Analytics a = ComputeAnalytics({TwoParticipants()[0]});
  EXPECT_EQ(a.resolution_anova.reason, "not computable: needs at least two participants");
}

TEST(Analytics, NoCompletedSessions) {
  auto s = TwoParticipants()[0];
  s.answers[17].reset();
  try {
    ComputeAnalytics({s});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotFound);
  }
  EXPECT_THROW(ComputeAnalytics({}), Error);
}

TEST(Analytics, TotalsAddUp) {
  testing::ForAll(50, 701, [](Rng& rng) {
    std::vector<SurveySession> sessions;
    const int n = testing::RandomInt(rng, 1, 12);
    for (int i = 0; i < n; ++i) {
      std::optional<int> exp;
      if (rng.Bernoulli()) exp = testing::RandomInt(rng, 0, 4);
      sessions.push_back(MakeSession("x" + std::to_string(i),
                                     rng.Bernoulli() ? Group::kControl : Group::kFeedback, exp,
                                     [&](const Trial&) {
                                       return static_cast<AnswerScale>(rng.Below(5));
                                     }));
    }
    const Analytics a = ComputeAnalytics(sessions);
    const auto& total = Row(a.accuracy, "total", "all");
    ASSERT_EQ(total.all.total, 18 * n);
    AccuracyCell sum_groups{}, sum_res{};
    for (const auto& r : a.accuracy) {
      if (r.section == "group") sum_groups = {sum_groups.correct + r.all.correct, sum_groups.total + r.all.total};
      if (r.section == "resolution") sum_res = {sum_res.correct + r.all.correct, sum_res.total + r.all.total};
    }
    ASSERT_EQ(sum_groups, total.all);
    ASSERT_EQ(sum_res, total.all);
    int with_exp = Row(a.accuracy, "experience", "little").participants +
                   Row(a.accuracy, "experience", "much").participants;
    ASSERT_EQ(with_exp + a.missing_experience, n);
  });
}

}  // namespace
}  // namespace gendet::survey
