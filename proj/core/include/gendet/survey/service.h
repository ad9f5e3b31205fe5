#ifndef GENDET_SURVEY_SERVICE_H_
#define GENDET_SURVEY_SERVICE_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gendet/common/random.h"
#include "gendet/survey/analytics.h"
#include "gendet/survey/session.h"

namespace gendet::survey {

// Milliseconds since the Unix epoch.
using Clock = std::function<int64_t()>;
int64_t SystemClockMillis();

// Append-only newline-delimited JSON. Each record is written and flushed as
// one line under a lock.
class ResponseLog {
 public:
  explicit ResponseLog(std::ostream& out) : out_(&out) {}
  // Opens `file` for appending, creating it if needed.
  explicit ResponseLog(const std::filesystem::path& file);

  void Append(const nlohmann::ordered_json& record);

 private:
  std::mutex mu_;
  std::ofstream file_;
  std::ostream* out_;
};

struct ServiceOptions {
  // Seeds the session-id and default session-seed stream; random if empty.
  std::optional<uint64_t> seed;
  Clock clock = SystemClockMillis;
};

// Session bookkeeping for the survey protocol. All methods are thread-safe;
// mutations of one session are serialised and logged before they return.
class SurveyService {
 public:
  explicit SurveyService(ImagePool pool, ServiceOptions options = {},
                         ResponseLog* log = nullptr);

  // The session seed drives group assignment and trial selection.
  SurveySession CreateSession(std::optional<uint64_t> seed = std::nullopt);

  // Trials up to the next unanswered one may be fetched.
  Trial GetTrial(const std::string& id, int index) const;
  // Returns the feedback message for the feedback group, nothing for control.
  std::optional<std::string> RecordAnswer(const std::string& id, int index, AnswerScale answer);
  // Allowed once, after the last trial.
  void RecordMeta(const std::string& id, const MetaAnswers& meta);

  SurveySession GetSession(const std::string& id) const;
  Score Result(const std::string& id) const;
  imageops::ImageTensor TrialImage(const std::string& id, int index) const;

  // Sessions in creation order.
  std::vector<SurveySession> Snapshot() const;
  Analytics ComputeAnalytics() const;

  // Applies every record of a log written by this class. Nothing is
  // re-logged. Throws kDataError naming the line on malformed input.
  void Replay(std::istream& log);

  // Later mutations are appended to `log`; set before serving requests.
  void set_log(ResponseLog* log) { log_ = log; }

  const ImagePool& pool() const { return pool_; }
  size_t size() const;

 private:
  struct Entry {
    mutable std::mutex mu;
    SurveySession session;
  };

  Entry& Find(const std::string& id) const;
  std::string NewId();
  void Insert(SurveySession session);
  void Log(const nlohmann::ordered_json& record);
  static std::optional<std::string> ApplyAnswer(SurveySession& s, int index, AnswerScale answer);
  static void ApplyMeta(SurveySession& s, const MetaAnswers& meta);

  ImagePool pool_;
  Clock clock_;
  ResponseLog* log_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::unique_ptr<Entry>> sessions_;
  std::vector<Entry*> order_;
  std::mutex rng_mu_;
  Rng rng_;
};

nlohmann::ordered_json ToJson(const MetaAnswers& meta);
MetaAnswers MetaFromJson(const nlohmann::json& doc);

}  // namespace gendet::survey

#endif  // GENDET_SURVEY_SERVICE_H_
