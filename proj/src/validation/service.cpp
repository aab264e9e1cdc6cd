#include "szzkit/validation/service.hpp"

#include <httplib.h>

namespace szzkit::validation {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, json{{"error", code}, {"message", message}});
}

void send_store_error(httplib::Response& res, const StoreError& e) {
  switch (e.code()) {
    case ErrorCode::not_found: send_error(res, 404, "not_found", e.what()); break;
    case ErrorCode::conflict: send_error(res, 409, "conflict", e.what()); break;
    case ErrorCode::invalid: send_error(res, 400, "invalid", e.what()); break;
  }
}

std::string required_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw StoreError(ErrorCode::invalid, std::string("missing field '") + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

struct ValidationService::Impl {
  ValidationStore& store;
  std::string token;
  Clock clock;
  httplib::Server server;

  Impl(ValidationStore& s, std::string t, Clock c) : store(s), token(std::move(t)), clock(std::move(c)) {}

  Timestamp now() const {
    if (clock) return clock();
    return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type, X-Session-Token"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (req.method == "OPTIONS") {
        res.status = 204;
        return httplib::Server::HandlerResponse::Handled;
      }
      if (req.get_header_value("X-Session-Token") != token) {
        send_error(res, 401, "unauthorized", "missing or wrong session token");
        return httplib::Server::HandlerResponse::Handled;
      }
      return httplib::Server::HandlerResponse::Unhandled;
    });

    server.Get(R"(/queues/(links|issues|conflicts))", [this](const httplib::Request& req, httplib::Response& res) {
      const QueueKind kind = *queue_from_string(req.matches[1].str());
      const std::string rater = req.get_param_value("rater");
      const ValidationQueue q = store.queues(rater);
      json ids = json::array();
      switch (kind) {
        case QueueKind::links:
          for (const auto& c : q.pending_links) ids.push_back("link:" + c);
          break;
        case QueueKind::issues:
          for (const auto& k : q.pending_issues) ids.push_back("issue:" + k);
          break;
        case QueueKind::conflicts:
          for (const auto& k : q.conflicts) ids.push_back("conflict:" + k);
          break;
      }
      auto next = store.next_work_item(kind, rater);
      send_json(res, 200,
                json{{"kind", to_string(kind)},
                     {"pending", ids.size()},
                     {"items", ids},
                     {"empty", !next.has_value()},
                     {"next", next ? *next : json(nullptr)}});
    });

    server.Get(R"(/items/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        send_json(res, 200, store.item(req.matches[1].str()));
      } catch (const StoreError& e) {
        send_store_error(res, e);
      }
    });

    server.Get("/summary", [this](const httplib::Request&, httplib::Response& res) {
      json counts = json::object();
      for (const auto& [key, label] : store.final_labels()) {
        const std::string name{to_string(label)};
        counts[name] = counts.value(name, 0) + 1;
      }
      json snap = store.snapshot();
      send_json(res, 200, json{{"pending", snap["pending"]}, {"decisions", snap["decisions"]}, {"final_labels", counts}});
    });

    server.Post("/decisions/link", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const json body = json::parse(req.body);
        LinkDecision d;
        d.commit = required_string(body, "commit");
        d.issue = required_string(body, "issue");
        d.rater = required_string(body, "rater");
        auto v = verdict_from_string(required_string(body, "verdict"));
        if (!v) throw StoreError(ErrorCode::invalid, "verdict must be addressed, mentioned_only or wrong");
        d.verdict = *v;
        d.decided_at = now();
        store.record_link_decision(d);
        const bool confirmed = d.verdict == Verdict::addressed;
        send_json(res, 200, json{{"ok", true}, {"validation", confirmed ? "expert_confirmed" : "expert_rejected"}});
      } catch (const json::exception& e) {
        send_error(res, 400, "invalid", std::string("bad request body: ") + e.what());
      } catch (const StoreError& e) {
        send_store_error(res, e);
      }
    });

    server.Post("/decisions/issue-type", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const json body = json::parse(req.body);
        IssueTypeDecision d;
        d.issue = required_string(body, "issue");
        d.rater = required_string(body, "rater");
        auto label = label_from_string(required_string(body, "label"));
        if (!label) throw StoreError(ErrorCode::invalid, "label must be one of BUG, IMPROVEMENT, TEST, DOC, OTHER");
        d.label = *label;
        auto round = round_from_string(body.value("round", "independent"));
        if (!round) throw StoreError(ErrorCode::invalid, "round must be independent or committee");
        d.round = *round;
        d.in_doubt = body.value("in_doubt", false);
        d.decided_at = now();
        const IssueTypeOutcome out = store.record_issue_type(d);
        send_json(res, 200,
                  json{{"ok", true},
                       {"conflict", out.conflict},
                       {"final_label", out.final_label ? json(to_string(*out.final_label)) : json(nullptr)}});
      } catch (const json::exception& e) {
        send_error(res, 400, "invalid", std::string("bad request body: ") + e.what());
      } catch (const StoreError& e) {
        send_store_error(res, e);
      }
    });
  }
};

ValidationService::ValidationService(ValidationStore& store, std::string token, Clock clock)
    : impl_(std::make_unique<Impl>(store, std::move(token), std::move(clock))) {
  impl_->routes();
}

ValidationService::~ValidationService() { stop(); }

bool ValidationService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

bool ValidationService::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

int ValidationService::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool ValidationService::listen_after_bind() { return impl_->server.listen_after_bind(); }

void ValidationService::wait_until_ready() const { impl_->server.wait_until_ready(); }

void ValidationService::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace szzkit::validation
