#include "gendet/survey/service.h"

#include <chrono>
#include <cstdio>
#include <random>

#include "gendet/common/error.h"

namespace gendet::survey {

using nlohmann::json;
using nlohmann::ordered_json;

int64_t SystemClockMillis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

ResponseLog::ResponseLog(const std::filesystem::path& file)
    : file_(file, std::ios::app | std::ios::binary), out_(&file_) {
  if (!file_) Fail(ErrorKind::kDataError, "cannot open response log " + file.string());
}

void ResponseLog::Append(const ordered_json& record) {
  const std::string line = record.dump() + "\n";
  std::lock_guard lock(mu_);
  out_->write(line.data(), static_cast<std::streamsize>(line.size()));
  out_->flush();
  if (!*out_) Fail(ErrorKind::kDataError, "response log write failed");
}

ordered_json ToJson(const MetaAnswers& meta) {
  ordered_json doc = ordered_json::object();
  if (meta.ai_experience) doc["ai_experience"] = *meta.ai_experience;
  if (meta.cues_text) doc["cues_text"] = *meta.cues_text;
  return doc;
}

MetaAnswers MetaFromJson(const json& doc) {
  Require(doc.is_object(), "meta answers must be an object");
  MetaAnswers meta;
  for (const auto& [key, value] : doc.items()) {
    if (key == "ai_experience") {
      if (value.is_null()) continue;
      Require(value.is_number_integer(), "ai_experience must be an integer");
      meta.ai_experience = value.get<int>();
      GroupAiExperience(*meta.ai_experience);
    } else if (key == "cues_text") {
      if (value.is_null()) continue;
      Require(value.is_string(), "cues_text must be a string");
      meta.cues_text = value.get<std::string>();
    } else {
      Fail(ErrorKind::kInvalidArgument, "unknown meta field '" + key + "'");
    }
  }
  return meta;
}

SurveyService::SurveyService(ImagePool pool, ServiceOptions options, ResponseLog* log)
    : pool_(std::move(pool)),
      clock_(options.clock ? options.clock : Clock(SystemClockMillis)),
      log_(log),
      rng_(options.seed ? *options.seed : std::random_device{}() ^
                                              (static_cast<uint64_t>(std::random_device{}()) << 32)) {}

size_t SurveyService::size() const {
  std::shared_lock lock(mu_);
  return sessions_.size();
}

SurveyService::Entry& SurveyService::Find(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) Fail(ErrorKind::kNotFound, "unknown session " + id);
  return *it->second;
}

std::string SurveyService::NewId() {
  std::lock_guard lock(rng_mu_);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng_.NextU64()));
  return buf;
}

void SurveyService::Log(const ordered_json& record) {
  if (log_) log_->Append(record);
}

void SurveyService::Insert(SurveySession session) {
  auto entry = std::make_unique<Entry>();
  entry->session = std::move(session);
  order_.push_back(entry.get());
  const std::string id = entry->session.id;
  sessions_.emplace(id, std::move(entry));
}

SurveySession SurveyService::CreateSession(std::optional<uint64_t> seed) {
  if (!seed) {
    std::lock_guard lock(rng_mu_);
    seed = rng_.NextU64();
  }
  Rng rng(*seed);
  SurveySession s;
  s.seed = *seed;
  s.group = rng.Bernoulli() ? Group::kFeedback : Group::kControl;
  s.trials = BuildTrials(pool_, rng);
  s.answers.assign(s.trials.size(), std::nullopt);
  s.created_ms = s.updated_ms = clock_();

  std::unique_lock lock(mu_);
  do {
    s.id = NewId();
  } while (sessions_.contains(s.id));
  ordered_json trials = ordered_json::array();
  for (const auto& t : s.trials) {
    trials.push_back({{"image_id", t.image_id},
                      {"truth", datahub::ToString(t.truth)},
                      {"resolution", t.resolution}});
  }
  Log({{"event", "session"},
       {"session_id", s.id},
       {"seed", s.seed},
       {"group", ToString(s.group)},
       {"at", s.created_ms},
       {"trials", trials}});
  Insert(s);
  return s;
}

Trial SurveyService::GetTrial(const std::string& id, int index) const {
  Entry& e = Find(id);
  std::lock_guard lock(e.mu);
  Require(index >= 0 && index < kTrialsPerSession, "trial index must be 0-17");
  const int next = e.session.answered();
  if (index > next) {
    Fail(ErrorKind::kConflict, "out of order: trial " + std::to_string(index) +
                                   " requested before trial " + std::to_string(next));
  }
  return e.session.trials[index];
}

std::optional<std::string> SurveyService::ApplyAnswer(SurveySession& s, int index,
                                                      AnswerScale answer) {
  Require(index >= 0 && index < kTrialsPerSession, "trial index must be 0-17");
  const int next = s.answered();
  if (index < next) {
    Fail(ErrorKind::kConflict, "trial " + std::to_string(index) + " is already answered");
  }
  if (index > next) {
    Fail(ErrorKind::kConflict, "out of order: expected an answer for trial " +
                                   std::to_string(next) + ", got " + std::to_string(index));
  }
  s.answers[index] = answer;
  if (s.group == Group::kControl) return std::nullopt;
  const Label truth = s.trials[index].truth;
  return FeedbackMessage(IsCorrect(answer, truth), truth);
}

void SurveyService::ApplyMeta(SurveySession& s, const MetaAnswers& meta) {
  if (!s.completed()) Fail(ErrorKind::kConflict, "meta answers come after the last trial");
  if (s.meta) Fail(ErrorKind::kConflict, "meta answers already recorded");
  if (meta.ai_experience) GroupAiExperience(*meta.ai_experience);
  s.meta = meta;
}

std::optional<std::string> SurveyService::RecordAnswer(const std::string& id, int index,
                                                       AnswerScale answer) {
  Entry& e = Find(id);
  std::lock_guard lock(e.mu);
  SurveySession next = e.session;
  auto feedback = ApplyAnswer(next, index, answer);
  next.updated_ms = clock_();
  Log({{"event", "answer"},
       {"session_id", id},
       {"index", index},
       {"answer", ToString(answer)},
       {"at", next.updated_ms}});
  e.session = std::move(next);
  return feedback;
}

void SurveyService::RecordMeta(const std::string& id, const MetaAnswers& meta) {
  Entry& e = Find(id);
  std::lock_guard lock(e.mu);
  SurveySession next = e.session;
  ApplyMeta(next, meta);
  next.updated_ms = clock_();
  Log({{"event", "meta"}, {"session_id", id}, {"meta", ToJson(meta)}, {"at", next.updated_ms}});
  e.session = std::move(next);
}

SurveySession SurveyService::GetSession(const std::string& id) const {
  Entry& e = Find(id);
  std::lock_guard lock(e.mu);
  return e.session;
}

Score SurveyService::Result(const std::string& id) const { return ScoreSession(GetSession(id)); }

imageops::ImageTensor SurveyService::TrialImage(const std::string& id, int index) const {
  const Trial t = GetTrial(id, index);
  return pool_.Render(t.image_id, t.resolution);
}

std::vector<SurveySession> SurveyService::Snapshot() const {
  std::shared_lock lock(mu_);
  std::vector<SurveySession> out;
  out.reserve(order_.size());
  for (const Entry* e : order_) {
    std::lock_guard session_lock(e->mu);
    out.push_back(e->session);
  }
  return out;
}

Analytics SurveyService::ComputeAnalytics() const { return survey::ComputeAnalytics(Snapshot()); }

void SurveyService::Replay(std::istream& in) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json rec = json::parse(line);
      const std::string event = rec.at("event").get<std::string>();
      const std::string id = rec.at("session_id").get<std::string>();
      if (event == "session") {
        SurveySession s;
        s.id = id;
        s.seed = rec.at("seed").get<uint64_t>();
        s.group = ParseGroup(rec.at("group").get<std::string>());
        s.created_ms = s.updated_ms = rec.at("at").get<int64_t>();
        for (const auto& t : rec.at("trials")) {
          s.trials.push_back({static_cast<int>(s.trials.size()), t.at("image_id").get<std::string>(),
                              datahub::ParseLabel(t.at("truth").get<std::string>()),
                              t.at("resolution").get<int>()});
        }
        s.answers.assign(s.trials.size(), std::nullopt);
        s.CheckInvariants();
        std::unique_lock lock(mu_);
        if (sessions_.contains(id)) Fail(ErrorKind::kDataError, "duplicate session " + id);
        Insert(std::move(s));
        continue;
      }
      Entry& e = Find(id);
      std::lock_guard lock(e.mu);
      if (event == "answer") {
        ApplyAnswer(e.session, rec.at("index").get<int>(),
                    ParseAnswer(rec.at("answer").get<std::string>()));
      } else if (event == "meta") {
        ApplyMeta(e.session, MetaFromJson(rec.at("meta")));
      } else {
        Fail(ErrorKind::kDataError, "unknown event '" + event + "'");
      }
      e.session.updated_ms = rec.at("at").get<int64_t>();
    } catch (const std::exception& ex) {
      Fail(ErrorKind::kDataError,
           "response log line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
}

}  // namespace gendet::survey
