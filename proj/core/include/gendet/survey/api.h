#ifndef GENDET_SURVEY_API_H_
#define GENDET_SURVEY_API_H_

#include <string>
#include <string_view>

#include "gendet/survey/service.h"

namespace gendet::survey {

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Transport-independent JSON API over a SurveyService:
//   POST /sessions                         {"seed"?}  -> 201 {session_id, group}
//   GET  /sessions/{id}                               -> progress for resuming
//   GET  /sessions/{id}/trials/{n}                    -> {index, resolution, image_url}
//   GET  /sessions/{id}/trials/{n}/image              -> PNG, resolution x resolution
//   POST /sessions/{id}/answers            {"index", "answer"} -> {index, feedback?}
//   POST /sessions/{id}/meta               {"ai_experience"?, "cues_text"?}
//   GET  /sessions/{id}/result                        -> score and per-trial truth
//   GET  /analytics                                   -> tables and tests
// Errors are {"error": message} with 400, 404, 405 or 409.
class SurveyApi {
 public:
  explicit SurveyApi(SurveyService& service) : service_(service) {}

  HttpResponse Handle(std::string_view method, std::string_view path, std::string_view body);

 private:
  SurveyService& service_;
};

}  // namespace gendet::survey

#endif  // GENDET_SURVEY_API_H_
