#include "gendet/survey/http_server.h"

#include <httplib.h>

#include "gendet/common/error.h"

namespace gendet::survey {

struct HttpServer::Impl {
  Impl(SurveyApi& a, HttpServerOptions o) : api(a), options(std::move(o)) {}
  SurveyApi& api;
  HttpServerOptions options;
  httplib::Server server;
};

HttpServer::HttpServer(SurveyApi& api, HttpServerOptions options)
    : impl_(std::make_unique<Impl>(api, std::move(options))) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse out = impl_->api.Handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  auto& server = impl_->server;
  if (impl_->options.static_dir) {
    if (!server.set_mount_point("/", impl_->options.static_dir->string())) {
      Fail(ErrorKind::kInvalidArgument,
           "static directory " + impl_->options.static_dir->string() + " does not exist");
    }
  }
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  for (const char* prefix : {"/sessions", "/analytics"}) {
    const std::string pattern = std::string(prefix) + "(/.*)?";
    server.Get(pattern, forward);
    server.Post(pattern, forward);
  }
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    const int port = impl_->server.bind_to_any_port(o.host);
    if (port < 0) Fail(ErrorKind::kDataError, "cannot bind " + o.host);
    o.port = port;
  } else if (!impl_->server.bind_to_port(o.host, o.port)) {
    Fail(ErrorKind::kDataError, "cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  return o.port;
}

void HttpServer::Serve() { impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace gendet::survey
