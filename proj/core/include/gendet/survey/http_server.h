#ifndef GENDET_SURVEY_HTTP_SERVER_H_
#define GENDET_SURVEY_HTTP_SERVER_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "gendet/survey/api.h"

namespace gendet::survey {

struct HttpServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  // Served under / for the browser client, if set.
  std::optional<std::filesystem::path> static_dir;
};

// Blocking HTTP front end for SurveyApi.
class HttpServer {
 public:
  HttpServer(SurveyApi& api, HttpServerOptions options);
  ~HttpServer();

  // Binds the socket; returns the bound port. Throws on failure.
  int Bind();
  // Serves until Stop() is called. Call Bind() first.
  void Serve();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gendet::survey

#endif  // GENDET_SURVEY_HTTP_SERVER_H_
