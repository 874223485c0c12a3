// Copyright 2026 The semicorpus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "semicorpus/curation_http.h"

#include "httplib.h"
#include "semicorpus/error.h"

namespace semicorpus {

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return 400;
    case ErrorCode::kValidation: return 422;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict: return 409;
    default: return 500;
  }
}

namespace {

void SendJson(httplib::Response &res, int status, const nlohmann::json &body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response &res, ErrorCode code, const std::string &message) {
  SendJson(res, HttpStatusFor(code), {{"code", ErrorCodeName(code)}, {"message", message}});
}

int QueryInt(const httplib::Request &req, const char *key, int fallback) {
  if (!req.has_param(key)) return fallback;
  long long v = 0;
  if (!ParseInt(req.get_param_value(key), &v) || v < -1000000 || v > 1000000) {
    throw Error(ErrorCode::kParse, std::string("query parameter '") + key +
                                       "' must be an integer");
  }
  return static_cast<int>(v);
}

nlohmann::json Body(const httplib::Request &req) {
  if (req.body.empty()) return nlohmann::json::object();
  auto j = nlohmann::json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kParse, "request body must be a JSON object");
  }
  return j;
}

std::string BodyString(const nlohmann::json &body, const char *key, bool required) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) {
    if (required) throw Error(ErrorCode::kParse, std::string("missing field '") + key + "'");
    return "";
  }
  if (!it->is_string()) {
    throw Error(ErrorCode::kParse, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

template <typename F>
httplib::Server::Handler Guard(F f) {
  return [f](const httplib::Request &req, httplib::Response &res) {
    try {
      f(req, res);
    } catch (const Error &e) {
      SendError(res, e.code(), e.what());
    } catch (const std::exception &e) {
      SendJson(res, 500, {{"code", "internal"}, {"message", e.what()}});
    }
  };
}

}  // namespace

struct CurationServer::Impl {
  CurationService &service;
  httplib::Server server;
  explicit Impl(CurationService &s) : service(s) {}
};

CurationServer::CurationServer(CurationService &service)
    : impl_(std::make_unique<Impl>(service)) {
  auto &srv = impl_->server;
  CurationService &svc = service;

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  srv.Options(R"(/.*)", [](const httplib::Request &, httplib::Response &res) {
    res.status = 204;
  });

  srv.Get("/candidates", Guard([&svc](const httplib::Request &req,
                                      httplib::Response &res) {
    std::optional<Channel> channel;
    if (req.has_param("channel") && !req.get_param_value("channel").empty()) {
      channel = ParseChannel(req.get_param_value("channel"));
      if (!channel) throw Error(ErrorCode::kParse, "channel must be 'caller' or 'agent'");
    }
    auto page = svc.List(channel, QueryInt(req, "page", 1), QueryInt(req, "page_size", 20));
    nlohmann::json items = nlohmann::json::array();
    for (const auto &item : page.items) items.push_back(ItemToJson(item));
    SendJson(res, 200,
             {{"snapshot", page.snapshot},
              {"page", page.page},
              {"page_size", page.page_size},
              {"total", page.total},
              {"total_pages", page.total_pages},
              {"items", items}});
  }));

  srv.Post(R"(/candidates/([0-9a-f]+)/accept)",
           Guard([&svc](const httplib::Request &req, httplib::Response &res) {
             std::string id = req.matches[1];
             auto body = Body(req);
             Tokens replacement = Tokenize(BodyString(body, "replacement", true));
             std::string scope_name = BodyString(body, "scope", false);
             Scope scope = Scope::kBoth;
             if (!scope_name.empty()) {
               auto s = ParseScope(scope_name);
               if (!s) throw Error(ErrorCode::kParse, "scope must be caller, agent or both");
               scope = *s;
             } else {
               scope = svc.Get(id).channel == Channel::kCaller ? Scope::kCaller
                                                               : Scope::kAgent;
             }
             TransformRule rule = svc.Accept(id, replacement, scope);
             SendJson(res, 200,
                      {{"rule",
                        {{"scope", ScopeName(rule.scope)},
                         {"pattern", Join(rule.pattern)},
                         {"replacement", Join(rule.replacement)},
                         {"provenance", ProvenanceName(rule.provenance)},
                         {"created_at", rule.created_at}}},
                       {"item", ItemToJson(svc.Get(id))}});
           }));

  srv.Post(R"(/candidates/([0-9a-f]+)/dismiss)",
           Guard([&svc](const httplib::Request &req, httplib::Response &res) {
             std::string id = req.matches[1];
             auto body = Body(req);
             svc.Dismiss(id, BodyString(body, "note", false));
             SendJson(res, 200, {{"item", ItemToJson(svc.Get(id))}});
           }));

  srv.Get("/rules/export", Guard([&svc](const httplib::Request &, httplib::Response &res) {
    auto e = svc.Export();
    nlohmann::json lines = nlohmann::json::array();
    for (const auto &t : e.lm_additions) lines.push_back(Join(t));
    SendJson(res, 200, {{"rules", e.rules}, {"lm_additions", lines}});
  }));

  srv.Get("/stats", Guard([&svc](const httplib::Request &, httplib::Response &res) {
    SendJson(res, 200, StatsToJson(svc.Stats()));
  }));

  srv.set_error_handler([](const httplib::Request &, httplib::Response &res) {
    if (!res.body.empty()) return;
    if (res.status == 404) {
      SendError(res, ErrorCode::kNotFound, "no such endpoint");
    }
  });
}

CurationServer::~CurationServer() { Stop(); }

int CurationServer::BindAnyPort(const std::string &host) {
  return impl_->server.bind_to_any_port(host);
}

bool CurationServer::Bind(const std::string &host, int port) {
  return impl_->server.bind_to_port(host, port);
}

bool CurationServer::Serve() { return impl_->server.listen_after_bind(); }

void CurationServer::Stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void CurationServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

}  // namespace semicorpus
