// SPDX-License-Identifier: Apache-2.0
#include "strigraph/server.hpp"

#include <httplib.h>

#include <atomic>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "strigraph/io.hpp"

namespace strigraph {

namespace {

struct NotFound {
  std::string what;
};

struct Session {
  std::mutex mu;
  std::string id;
  std::shared_ptr<const Theory> theory;
  /// graphs[k] is the graph after k steps; graphs.size() == steps.size() + 1.
  std::vector<StringGraph> graphs;
  std::vector<TraceEntry> steps;
  std::uint64_t revision = 0;
};

Json snapshot(const Session& s) {
  Json steps = Json::array();
  for (const auto& e : s.steps) steps.push_back({{"rule", e.rule}, {"match_index", e.match_index}});
  return {{"id", s.id},
          {"theory", s.theory->name},
          {"revision", s.revision},
          {"cursor", s.steps.size()},
          {"steps", steps},
          {"graph", graph_to_json(s.graphs.back(), s.theory->name)}};
}

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(dump(body), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& code, const std::string& detail) {
  reply(res, status, {{"error", code}, {"detail", detail}});
}

}  // namespace

struct Server::Impl {
  ServerOptions options;
  httplib::Server http;

  std::shared_mutex theories_mu;
  std::map<std::string, std::shared_ptr<const Theory>> theories;

  std::shared_mutex sessions_mu;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::atomic<std::uint64_t> next_session{1};

  std::shared_ptr<const Theory> theory(const std::string& name) {
    std::shared_lock lock(theories_mu);
    auto it = theories.find(name);
    if (it == theories.end()) throw Error(ErrorCode::kInvalidArgument, "no theory named " + name);
    return it->second;
  }

  std::shared_ptr<Session> session(const std::string& id) {
    std::shared_lock lock(sessions_mu);
    auto it = sessions.find(id);
    if (it == sessions.end()) throw NotFound{"no derivation " + id};
    return it->second;
  }

  /// Runs a handler and maps failures onto status codes.
  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const NotFound& e) {
        reply_error(res, 404, "NotFound", e.what);
      } catch (const Error& e) {
        const std::string code(to_string(e.code()));
        if (e.code() == ErrorCode::kParseError) {
          reply_error(res, 400, code, e.detail());
        } else if (e.code() == ErrorCode::kStaleMatch) {
          reply_error(res, 409, code, e.detail());
        } else {
          reply_error(res, 422, code, e.detail());
        }
      } catch (const Json::exception& e) {
        reply_error(res, 400, "ParseError", e.what());
      }
    };
  }

  void routes() {
    http.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
    http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    http.Get("/health", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, {{"status", "ok"}}); });

    http.Post("/theories", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Json body = parse_json(req.body);
      if (!body.is_object() || !body.contains("theory")) throw Error(ErrorCode::kParseError, "expected {theory, rules?}");
      for (const auto& [key, value] : body.items()) {
        if (key != "theory" && key != "rules") throw Error(ErrorCode::kParseError, "unknown field '" + key + "'");
      }
      Json tdoc = body["theory"];
      if (tdoc.is_object()) tdoc.erase("rules");
      Theory t = theory_from_json(tdoc);
      if (body.contains("rules")) {
        if (theory_name_of(body["rules"]) != t.name) {
          throw Error(ErrorCode::kSignatureMismatch, "rules belong to theory " + theory_name_of(body["rules"]));
        }
        t.rules = rules_from_json(body["rules"], t.signature);
      }
      certify(t);
      const std::string name = t.name;
      const Json out{{"name", name}, {"rules", t.rules.size()}};
      {
        std::unique_lock lock(theories_mu);
        theories[name] = std::make_shared<const Theory>(std::move(t));
      }
      reply(res, 201, out);
    }));

    http.Post("/derivations", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Json body = parse_json(req.body);
      if (!body.is_object() || !body.contains("theory") || !body.contains("graph")) {
        throw Error(ErrorCode::kParseError, "expected {theory, graph}");
      }
      for (const auto& [key, value] : body.items()) {
        if (key != "theory" && key != "graph") throw Error(ErrorCode::kParseError, "unknown field '" + key + "'");
      }
      if (!body["theory"].is_string()) throw Error(ErrorCode::kParseError, "theory must be a string");
      auto th = theory(body["theory"].get<std::string>());
      StringGraph g = graph_from_json(body["graph"], th->signature);
      require_valid(g);
      auto s = std::make_shared<Session>();
      s->id = "d" + std::to_string(next_session++);
      s->theory = std::move(th);
      s->graphs.push_back(std::move(g));
      const Json out = snapshot(*s);
      {
        std::unique_lock lock(sessions_mu);
        sessions[s->id] = s;
      }
      reply(res, 201, out);
    }));

    http.Get(R"(/derivations/([A-Za-z0-9_]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto s = session(req.matches[1]);
      std::lock_guard lock(s->mu);
      reply(res, 200, snapshot(*s));
    }));

    http.Get(R"(/derivations/([A-Za-z0-9_]+)/export)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = session(req.matches[1]);
               std::lock_guard lock(s->mu);
               reply(res, 200, derivation_to_json({s->theory->name, s->graphs.front(), s->steps}));
             }));

    http.Get(R"(/derivations/([A-Za-z0-9_]+)/matches)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = session(req.matches[1]);
               std::lock_guard lock(s->mu);
               std::vector<const RewriteRule*> rules;
               if (req.has_param("rule")) {
                 rules.push_back(&s->theory->rules.require(req.get_param_value("rule")));
               } else {
                 for (const auto& r : s->theory->rules.rules()) rules.push_back(&r);
               }
               Json list = Json::array();
               for (const RewriteRule* r : rules) {
                 const auto ms = find_matches(*r, s->graphs.back());
                 for (std::size_t i = 0; i < ms.size(); ++i) list.push_back(match_to_json(ms[i], i));
               }
               reply(res, 200, {{"id", s->id}, {"revision", s->revision}, {"matches", list}});
             }));

    http.Post(R"(/derivations/([A-Za-z0-9_]+)/apply)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto s = session(req.matches[1]);
                const Json body = parse_json(req.body);
                if (!body.is_object() || !body.contains("rule") || !body.contains("match_index")) {
                  throw Error(ErrorCode::kParseError, "expected {rule, match_index, revision?}");
                }
                for (const auto& [key, value] : body.items()) {
                  if (key != "rule" && key != "match_index" && key != "revision") {
                    throw Error(ErrorCode::kParseError, "unknown field '" + key + "'");
                  }
                }
                if (!body["rule"].is_string() || !body["match_index"].is_number_unsigned()) {
                  throw Error(ErrorCode::kParseError, "rule must be a string and match_index a non-negative integer");
                }
                std::lock_guard lock(s->mu);
                if (body.contains("revision")) {
                  if (!body["revision"].is_number_unsigned()) throw Error(ErrorCode::kParseError, "bad revision");
                  if (body["revision"].get<std::uint64_t>() != s->revision) {
                    throw Error(ErrorCode::kStaleMatch, "derivation is at revision " + std::to_string(s->revision));
                  }
                }
                const std::string name = body["rule"].get<std::string>();
                const RewriteRule& r = s->theory->rules.require(name);
                const auto index = body["match_index"].get<std::size_t>();
                const auto ms = find_matches(r, s->graphs.back());
                if (index >= ms.size()) {
                  throw Error(ErrorCode::kStaleMatch,
                              name + " has " + std::to_string(ms.size()) + " matches at revision " + std::to_string(s->revision));
                }
                StringGraph next = apply(ms[index], s->graphs.back());
                s->graphs.push_back(std::move(next));
                s->steps.push_back({name, index, ms[index].box_images});
                ++s->revision;
                reply(res, 200, snapshot(*s));
              }));

    http.Post(R"(/derivations/([A-Za-z0-9_]+)/undo)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto s = session(req.matches[1]);
                std::lock_guard lock(s->mu);
                if (s->steps.empty()) throw Error(ErrorCode::kInvalidArgument, "derivation is at step 0");
                s->steps.pop_back();
                s->graphs.pop_back();
                ++s->revision;
                reply(res, 200, snapshot(*s));
              }));

    http.Post("/eval", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Json body = parse_json(req.body);
      auto th = theory(theory_name_of(body));
      const StringGraph g = graph_from_json(body, th->signature);
      require_valid(g);
      reply(res, 200, tensor_to_json(evaluate(g, th->valuation)));
    }));
  }
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  for (const auto& name : bundled_theory_names()) add_theory(*bundled_theory(name));
  impl_->routes();
}

Server::~Server() { stop(); }

void Server::add_theory(Theory t) {
  std::unique_lock lock(impl_->theories_mu);
  const std::string name = t.name;
  impl_->theories[name] = std::make_shared<const Theory>(std::move(t));
}

int Server::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool Server::listen_after_bind() { return impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_) impl_->http.stop();
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace strigraph
