#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "commands.h"
#include "gendet/common/error.h"
#include "gendet/datahub/manifest.h"
#include "gendet/survey/api.h"
#include "gendet/survey/http_server.h"
#include "gendet/survey/service.h"

namespace gendet::cli {

namespace fs = std::filesystem;

namespace {

survey::HttpServer* g_server = nullptr;

extern "C" void OnSignal(int) {
  if (g_server) g_server->Stop();
}

struct ServeOptions {
  std::vector<std::string> manifests;
  std::string allow_list;
  std::string log = "survey_log.ndjson";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<uint64_t> seed;
  std::string static_dir;
};

void RunServe(const ServeOptions& o) {
  std::vector<datahub::DatasetManifest> manifests;
  for (const auto& m : o.manifests) manifests.push_back(datahub::LoadManifest(m));
  auto pool = survey::ImagePool::FromManifests(
      manifests, o.allow_list.empty() ? std::nullopt : std::optional<fs::path>(o.allow_list));
  std::cerr << "pool: " << pool.Count(datahub::Label::kReal) << " real, "
            << pool.Count(datahub::Label::kFake) << " fake\n";

  survey::ServiceOptions options;
  options.seed = o.seed;
  survey::SurveyService service(std::move(pool), options);
  if (fs::exists(o.log)) {
    std::ifstream in(o.log);
    service.Replay(in);
    std::cerr << "replayed " << service.size() << " sessions from " << o.log << "\n";
  }
  survey::ResponseLog log{fs::path(o.log)};
  service.set_log(&log);
  survey::SurveyApi api(service);
  survey::HttpServerOptions http;
  http.host = o.host;
  http.port = o.port;
  if (!o.static_dir.empty()) http.static_dir = o.static_dir;
  survey::HttpServer server(api, http);
  const int port = server.Bind();
  std::cerr << "listening on http://" << o.host << ":" << port << "\n";
  g_server = &server;
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  server.Serve();
  g_server = nullptr;
}

void RunAnalyze(const std::string& log_file, const std::string& format) {
  std::ifstream in(log_file);
  if (!in) Fail(ErrorKind::kDataError, "cannot read " + log_file);
  survey::SurveyService service(survey::ImagePool{}, {});
  service.Replay(in);
  const auto analytics = service.ComputeAnalytics();
  if (format == "markdown") {
    std::cout << survey::RenderAnalyticsMarkdown(analytics);
  } else {
    std::cout << survey::ToJson(analytics).dump(2) << "\n";
  }
}

}  // namespace

void AddSurveyCommands(CLI::App& app) {
  auto* group = app.add_subcommand("survey", "Human survey service and analytics");
  group->require_subcommand(1);

  auto serve = std::make_shared<ServeOptions>();
  auto* cmd = group->add_subcommand("serve", "Serve the survey HTTP API");
  cmd->add_option("--manifest", serve->manifests, "image pool manifests (real and fake)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--allow-list", serve->allow_list, "file of pool ids to mount, one per line")
      ->check(CLI::ExistingFile);
  cmd->add_option("--log", serve->log, "append-only response log")->capture_default_str();
  cmd->add_option("--host", serve->host, "bind address")->capture_default_str();
  cmd->add_option("--port", serve->port, "port (0 picks one)")->capture_default_str();
  cmd->add_option("--seed", serve->seed, "seed for session ids and assignments");
  cmd->add_option("--static-dir", serve->static_dir, "browser client files served under /")
      ->check(CLI::ExistingDirectory);
  cmd->callback([serve] { RunServe(*serve); });

  auto log = std::make_shared<std::string>();
  auto format = std::make_shared<std::string>("json");
  cmd = group->add_subcommand("analyze", "Accuracy tables and tests from a response log");
  cmd->add_option("--log", *log, "response log")->required()->check(CLI::ExistingFile);
  cmd->add_option("--format", *format, "json or markdown")
      ->capture_default_str()
      ->check(CLI::IsMember({"json", "markdown"}));
  cmd->callback([log, format] { RunAnalyze(*log, *format); });
}

}  // namespace gendet::cli
