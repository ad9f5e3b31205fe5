#include "gendet/survey/api.h"

#include <charconv>
#include <vector>

#include "gendet/common/error.h"
#include "gendet/imageops/image_io.h"

namespace gendet::survey {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

HttpResponse Json(int status, const ordered_json& doc) {
  return {status, "application/json", doc.dump()};
}

HttpResponse ErrorResponse(int status, const std::string& message) {
  return Json(status, {{"error", message}});
}

int StatusFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return 400;
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kConflict: return 409;
    case ErrorKind::kDataError:
    case ErrorKind::kTrainingFailure: return 500;
  }
  return 500;
}

std::vector<std::string_view> Segments(std::string_view path) {
  path = path.substr(0, path.find('?'));
  std::vector<std::string_view> out;
  while (!path.empty()) {
    const size_t start = path.find_first_not_of('/');
    if (start == std::string_view::npos) break;
    path.remove_prefix(start);
    const size_t end = path.find('/');
    out.push_back(path.substr(0, end));
    path.remove_prefix(end == std::string_view::npos ? path.size() : end);
  }
  return out;
}

int ParseIndex(std::string_view text) {
  int value = -1;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  Require(ec == std::errc() && ptr == text.data() + text.size(), "bad trial index '" +
                                                                     std::string(text) + "'");
  return value;
}

json ParseBody(std::string_view body, bool allow_empty) {
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    Require(allow_empty, "request body required");
    return json::object();
  }
  json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  Require(!doc.is_discarded() && doc.is_object(), "request body must be a JSON object");
  return doc;
}

std::string ImageUrl(const std::string& id, int index) {
  return "/sessions/" + id + "/trials/" + std::to_string(index) + "/image";
}

}  // namespace

HttpResponse SurveyApi::Handle(std::string_view method, std::string_view path,
                               std::string_view body) {
  const auto seg = Segments(path);
  const bool get = method == "GET", post = method == "POST";
  auto not_allowed = [] { return ErrorResponse(405, "method not allowed"); };
  try {
    if (seg.size() == 1 && seg[0] == "analytics") {
      if (!get) return not_allowed();
      return Json(200, ToJson(service_.ComputeAnalytics()));
    }
    if (seg.empty() || seg[0] != "sessions") return ErrorResponse(404, "no such route");

    if (seg.size() == 1) {
      if (!post) return not_allowed();
      const json req = ParseBody(body, true);
      std::optional<uint64_t> seed;
      if (req.contains("seed")) {
        Require(req.at("seed").is_number_unsigned(), "seed must be a non-negative integer");
        seed = req.at("seed").get<uint64_t>();
      }
      const auto s = service_.CreateSession(seed);
      return Json(201, {{"session_id", s.id}, {"group", ToString(s.group)}});
    }

    const std::string id(seg[1]);
    if (seg.size() == 2) {
      if (!get) return not_allowed();
      const auto s = service_.GetSession(id);
      ordered_json doc = {{"session_id", s.id},
                          {"group", ToString(s.group)},
                          {"answered", s.answered()},
                          {"completed", s.completed()},
                          {"meta_recorded", s.meta.has_value()}};
      return Json(200, doc);
    }

    if (seg[2] == "trials" && (seg.size() == 4 || (seg.size() == 5 && seg[4] == "image"))) {
      if (!get) return not_allowed();
      const int index = ParseIndex(seg[3]);
      if (seg.size() == 5) {
        const auto png = imageops::EncodePng(service_.TrialImage(id, index));
        return {200, "image/png", std::string(png.begin(), png.end())};
      }
      const Trial t = service_.GetTrial(id, index);
      return Json(200, {{"index", t.index},
                        {"resolution", t.resolution},
                        {"image_url", ImageUrl(id, t.index)}});
    }

    if (seg.size() == 3 && seg[2] == "answers") {
      if (!post) return not_allowed();
      const json req = ParseBody(body, false);
      Require(req.contains("index") && req.at("index").is_number_integer(),
              "answer needs an integer index");
      Require(req.contains("answer") && req.at("answer").is_string(), "answer needs an answer");
      const int index = req.at("index").get<int>();
      const auto feedback =
          service_.RecordAnswer(id, index, ParseAnswer(req.at("answer").get<std::string>()));
      ordered_json doc = {{"index", index}};
      if (feedback) doc["feedback"] = *feedback;
      return Json(200, doc);
    }

    if (seg.size() == 3 && seg[2] == "meta") {
      if (!post) return not_allowed();
      service_.RecordMeta(id, MetaFromJson(ParseBody(body, true)));
      return Json(200, ordered_json::object());
    }

    if (seg.size() == 3 && seg[2] == "result") {
      if (!get) return not_allowed();
      const auto s = service_.GetSession(id);
      const Score score = ScoreSession(s);
      ordered_json trials = ordered_json::array();
      for (size_t i = 0; i < s.trials.size(); ++i) {
        trials.push_back({{"index", s.trials[i].index},
                          {"resolution", s.trials[i].resolution},
                          {"image_url", ImageUrl(id, s.trials[i].index)},
                          {"truth", datahub::ToString(s.trials[i].truth)},
                          {"answer", ToString(*s.answers[i])},
                          {"correct", static_cast<bool>(score.per_trial[i])}});
      }
      return Json(200, {{"session_id", s.id},
                        {"group", ToString(s.group)},
                        {"score", score.correct},
                        {"total", kTrialsPerSession},
                        {"trials", trials}});
    }
    return ErrorResponse(404, "no such route");
  } catch (const Error& e) {
    return ErrorResponse(StatusFor(e.kind()), e.what());
  } catch (const json::exception& e) {
    return ErrorResponse(400, e.what());
  }
}

}  // namespace gendet::survey
