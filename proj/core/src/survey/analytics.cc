#include "gendet/survey/analytics.h"

#include <cstdio>
#include <functional>
#include <sstream>

#include "gendet/common/error.h"

namespace gendet::survey {

namespace {

struct Participant {
  const SurveySession* session;
  Score score;
  std::optional<Experience> experience;
};

using TrialFilter = std::function<bool(const Trial&)>;

void Tally(const Participant& p, const TrialFilter& keep, AccuracyRow& row) {
  bool counted = false;
  for (size_t i = 0; i < p.session->trials.size(); ++i) {
    const Trial& t = p.session->trials[i];
    if (!keep(t)) continue;
    counted = true;
    const int ok = p.score.per_trial[i] ? 1 : 0;
    auto& cell = t.truth == Label::kReal ? row.real : row.fake;
    cell.correct += ok;
    ++cell.total;
    row.all.correct += ok;
    ++row.all.total;
  }
  row.participants += counted;
}

double Fraction(const Participant& p, const TrialFilter& keep) {
  int ok = 0, n = 0;
  for (size_t i = 0; i < p.session->trials.size(); ++i) {
    if (!keep(p.session->trials[i])) continue;
    ok += p.score.per_trial[i];
    ++n;
  }
  return static_cast<double>(ok) / static_cast<double>(n);
}

TestOutcome TwoGroupTest(std::string name, const std::vector<double>& a,
                         const std::vector<double>& b) {
  TestOutcome out{std::move(name), std::nullopt, ""};
  if (a.size() < 2 || b.size() < 2) {
    out.reason = "not computable: needs at least two participants per group";
    return out;
  }
  out.result = TTestIndependent(a, b);
  return out;
}

nlohmann::ordered_json CellJson(const AccuracyCell& c) {
  nlohmann::ordered_json doc = {{"correct", c.correct}, {"total", c.total}};
  if (auto a = c.accuracy()) {
    doc["accuracy"] = *a;
  } else {
    doc["accuracy"] = nullptr;
  }
  return doc;
}

nlohmann::ordered_json RowsJson(const std::vector<AccuracyRow>& rows) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    out.push_back({{"section", r.section},
                   {"key", r.key},
                   {"participants", r.participants},
                   {"real", CellJson(r.real)},
                   {"fake", CellJson(r.fake)},
                   {"all", CellJson(r.all)}});
  }
  return out;
}

nlohmann::ordered_json OutcomeJson(const TestOutcome& t) {
  nlohmann::ordered_json doc = {{"name", t.name}, {"computable", t.result.has_value()}};
  if (t.result) {
    doc["result"] = ToJson(*t.result);
  } else {
    doc["reason"] = t.reason;
  }
  return doc;
}

std::string Percent(const AccuracyCell& c) {
  const auto a = c.accuracy();
  if (!a) return "-";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * *a);
  return buf;
}

void RowsMarkdown(std::ostringstream& os, const std::vector<AccuracyRow>& rows) {
  os << "| Section | Key | n | Real | Fake | All |\n|---|---|---:|---:|---:|---:|\n";
  for (const auto& r : rows) {
    os << "| " << r.section << " | " << r.key << " | " << r.participants << " | "
       << Percent(r.real) << " | " << Percent(r.fake) << " | " << Percent(r.all) << " |\n";
  }
}

}  // namespace

std::string RenderAnalyticsMarkdown(const Analytics& a) {
  std::ostringstream os;
  os << "Participants: " << a.participants << " (excluded incomplete: " << a.excluded_incomplete
     << ", no experience answer: " << a.missing_experience << ")\n\n";
  RowsMarkdown(os, a.accuracy);
  os << "\n";
  RowsMarkdown(os, a.bounds);
  os << "\n";
  for (const auto* t : {&a.feedback_vs_control, &a.resolution_anova, &a.experience_little_vs_much}) {
    os << "- " << t->name << ": ";
    if (!t->result) {
      os << t->reason << "\n";
      continue;
    }
    const auto& r = *t->result;
    char buf[160];
    if (r.test == StatResult::Test::kStudentT) {
      std::snprintf(buf, sizeof buf, "t(%g) = %.4f, p = %.4g%s", r.df1, r.statistic, r.p_value,
                    r.degenerate ? " (zero variance)" : "");
    } else {
      std::snprintf(buf, sizeof buf, "F(%g, %g) = %.4f, p = %.4g", r.df1, r.df2, r.statistic,
                    r.p_value);
    }
    os << buf << "\n";
  }
  return os.str();
}

std::optional<double> AccuracyCell::accuracy() const {
  if (total == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(total);
}

Analytics ComputeAnalytics(const std::vector<SurveySession>& sessions) {
  Analytics a;
  std::vector<Participant> people;
  for (const auto& s : sessions) {
    if (!s.completed()) {
      ++a.excluded_incomplete;
      continue;
    }
    Participant p{&s, ScoreSession(s), std::nullopt};
    if (s.meta && s.meta->ai_experience) {
      p.experience = GroupAiExperience(*s.meta->ai_experience);
    } else {
      ++a.missing_experience;
    }
    people.push_back(std::move(p));
  }
  if (people.empty()) Fail(ErrorKind::kNotFound, "no completed sessions");
  a.participants = static_cast<int>(people.size());

  const TrialFilter any = [](const Trial&) { return true; };
  auto add_row = [&](std::vector<AccuracyRow>& rows, std::string section, std::string key,
                     const std::function<bool(const Participant&)>& who,
                     const TrialFilter& keep) {
    AccuracyRow row{std::move(section), std::move(key), 0, {}, {}, {}};
    for (const auto& p : people) {
      if (who(p)) Tally(p, keep, row);
    }
    rows.push_back(row);
  };
  auto everyone = [](const Participant&) { return true; };
  auto in_group = [](Group g) {
    return [g](const Participant& p) { return p.session->group == g; };
  };
  auto with_experience = [](Experience e) {
    return [e](const Participant& p) { return p.experience == e; };
  };
  auto at_resolution = [](int res) {
    return TrialFilter([res](const Trial& t) { return t.resolution == res; });
  };

  add_row(a.accuracy, "total", "all", everyone, any);
  for (Group g : {Group::kControl, Group::kFeedback}) {
    add_row(a.accuracy, "group", std::string(ToString(g)), in_group(g), any);
  }
  for (int res : kResolutions) {
    add_row(a.accuracy, "resolution", std::to_string(res), everyone, at_resolution(res));
  }
  for (Experience e : {Experience::kLittle, Experience::kMuch}) {
    add_row(a.accuracy, "experience", std::string(ToString(e)), with_experience(e), any);
  }

  const std::pair<const char*, std::pair<Group, int>> bounds[] = {
      {"upper", {Group::kFeedback, 1024}}, {"lower", {Group::kControl, 256}}};
  for (const auto& [name, setup] : bounds) {
    const auto [group, res] = setup;
    for (Experience e : {Experience::kLittle, Experience::kMuch}) {
      add_row(a.bounds, name, std::string(ToString(e)),
              [&, group, e](const Participant& p) {
                return p.session->group == group && p.experience == e;
              },
              at_resolution(res));
    }
    add_row(a.bounds, name, "all", in_group(group), at_resolution(res));
  }

  const TrialFilter fakes = [](const Trial& t) { return t.truth == Label::kFake; };
  std::vector<double> fb, ctl, little, much;
  std::vector<std::vector<double>> by_res(kResolutions.size());
  for (const auto& p : people) {
    (p.session->group == Group::kFeedback ? fb : ctl).push_back(Fraction(p, fakes));
    for (size_t r = 0; r < kResolutions.size(); ++r) {
      by_res[r].push_back(Fraction(p, at_resolution(kResolutions[r])));
    }
    if (p.experience) {
      (*p.experience == Experience::kLittle ? little : much).push_back(Fraction(p, any));
    }
  }
  a.feedback_vs_control = TwoGroupTest("feedback_vs_control_fake_accuracy", fb, ctl);
  a.experience_little_vs_much = TwoGroupTest("little_vs_much_experience_accuracy", little, much);
  a.resolution_anova.name = "resolution_anova_accuracy";
  if (people.size() < 2) {
    a.resolution_anova.reason = "not computable: needs at least two participants";
  } else {
    try {
      a.resolution_anova.result = AnovaOneWay(by_res);
    } catch (const Error& e) {
      a.resolution_anova.reason = std::string("not computable: ") + e.what();
    }
  }
  return a;
}

nlohmann::ordered_json ToJson(const Analytics& a) {
  return {{"participants", a.participants},
          {"excluded_incomplete", a.excluded_incomplete},
          {"missing_experience", a.missing_experience},
          {"accuracy", RowsJson(a.accuracy)},
          {"bounds", RowsJson(a.bounds)},
          {"tests",
           {OutcomeJson(a.feedback_vs_control), OutcomeJson(a.resolution_anova),
            OutcomeJson(a.experience_little_vs_much)}}};
}

}  // namespace gendet::survey
