// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/run/service.hpp"

#include <stdexcept>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace hero::run {

using nlohmann::json;

std::string status_to_json(const feedback::StatusSnapshot& s) {
  return json{{"epoch", s.epoch},
              {"phase", feedback::to_string(s.phase)},
              {"n_fb", s.n_fb},
              {"N_fb", s.budget},
              {"success_history", s.success_history}}
      .dump();
}

std::string batch_to_json(int epoch, const std::vector<feedback::RenderedSample>& samples) {
  json list = json::array();
  for (const auto& s : samples) list.push_back({{"id", s.id}, {"kind", s.kind}, {"data", s.data}});
  return json{{"epoch", epoch}, {"samples", list}}.dump();
}

feedback::Submission submission_from_json(const std::string& body) {
  try {
    const json j = json::parse(body);
    feedback::Submission s;
    s.epoch = j.at("epoch").get<int>();
    for (const auto& l : j.at("labels")) s.labels.emplace_back(l.at("id").get<int>(), l.at("good").get<bool>());
    if (j.contains("best_id") && !j.at("best_id").is_null()) s.best = j.at("best_id").get<int>();
    return s;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed feedback: ") + e.what());
  }
}

std::string submission_to_json(const feedback::Submission& s) {
  json labels = json::array();
  for (const auto& [id, good] : s.labels) labels.push_back({{"id", id}, {"good", good}});
  return json{{"epoch", s.epoch}, {"labels", labels}, {"best_id", s.best ? json(*s.best) : json(nullptr)}}.dump();
}

struct FeedbackServer::Impl {
  feedback::FeedbackHub& hub;
  httplib::Server server;
  std::thread thread;
};

namespace {

void reply(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

std::string error_body(const std::string& message) { return json{{"error", message}}.dump(); }

}  // namespace

FeedbackServer::FeedbackServer(feedback::FeedbackHub& hub) : impl_(new Impl{hub, {}, {}}) {
  auto& hub_ref = impl_->hub;
  auto& server = impl_->server;
  server.Get("/api/status", [&hub_ref](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, status_to_json(hub_ref.status()));
  });
  server.Get("/api/batch", [&hub_ref](const httplib::Request&, httplib::Response& res) {
    const auto batch = hub_ref.batch();
    if (!batch) {
      reply(res, 409, error_body("no batch awaiting feedback"));
      return;
    }
    reply(res, 200, batch_to_json(batch->first, batch->second));
  });
  server.Post("/api/feedback", [&hub_ref](const httplib::Request& req, httplib::Response& res) {
    feedback::Submission sub;
    try {
      sub = submission_from_json(req.body);
    } catch (const std::invalid_argument& e) {
      reply(res, 400, error_body(e.what()));
      return;
    }
    const auto result = hub_ref.submit(sub);
    reply(res, result.status, result.status == 200 ? json{{"status", "accepted"}}.dump() : error_body(result.reason));
  });
}

FeedbackServer::~FeedbackServer() { stop(); }

int FeedbackServer::start(const std::string& host, int port) {
  if (impl_->thread.joinable()) throw std::logic_error("FeedbackServer already started");
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void FeedbackServer::stop() {
  if (!impl_ || !impl_->thread.joinable()) return;
  impl_->server.stop();
  impl_->thread.join();
}

}  // namespace hero::run
