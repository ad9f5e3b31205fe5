#ifndef GENDET_SURVEY_ANALYTICS_H_
#define GENDET_SURVEY_ANALYTICS_H_

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gendet/survey/session.h"
#include "gendet/survey/stats.h"

namespace gendet::survey {

struct AccuracyCell {
  int correct = 0;
  int total = 0;
  std::optional<double> accuracy() const;  // empty when total == 0
  bool operator==(const AccuracyCell&) const = default;
};

struct AccuracyRow {
  std::string section;  // "total", "group", "resolution", "experience", "upper", "lower"
  std::string key;      // e.g. "feedback", "512", "little", "all"
  int participants = 0;
  AccuracyCell real, fake, all;
};

struct TestOutcome {
  std::string name;
  std::optional<StatResult> result;
  std::string reason;  // why it was not computable
};

struct Analytics {
  int participants = 0;          // completed sessions
  int excluded_incomplete = 0;   // sessions that never reached trial 18
  int missing_experience = 0;    // completed, but no ai_experience answer

  // Overall, by group, by resolution and by experience.
  std::vector<AccuracyRow> accuracy;
  // Easiest setup (feedback group at 1024) and hardest (control group at 256),
  // each for little, much and all experience.
  std::vector<AccuracyRow> bounds;

  // Per-participant fake-image accuracy, feedback vs control.
  TestOutcome feedback_vs_control;
  // Per-participant accuracy at 256, 512 and 1024.
  TestOutcome resolution_anova;
  // Per-participant overall accuracy, little vs much AI experience.
  TestOutcome experience_little_vs_much;
};

// Incomplete sessions are ignored; a missing meta answer only removes the
// participant from the experience breakdowns. Throws kNotFound when no
// session is complete.
Analytics ComputeAnalytics(const std::vector<SurveySession>& sessions);

nlohmann::ordered_json ToJson(const Analytics& analytics);
// Accuracy tables in percent with one decimal, followed by the tests.
std::string RenderAnalyticsMarkdown(const Analytics& analytics);

}  // namespace gendet::survey

#endif  // GENDET_SURVEY_ANALYTICS_H_
