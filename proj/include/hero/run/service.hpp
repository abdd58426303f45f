// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "hero/feedback/source.hpp"

namespace hero::run {

/// HTTP front end of a FeedbackHub:
///   GET  /api/status    run progress
///   GET  /api/batch     pending batch (409 unless awaiting feedback)
///   POST /api/feedback  {epoch, labels: [{id, good}], best_id}
/// POST answers 200 on acceptance, 400 on a malformed body, 409 for a stale
/// epoch or when nothing is pending, 422 when the labels break the batch
/// invariants.
class FeedbackServer {
 public:
  explicit FeedbackServer(feedback::FeedbackHub& hub);
  ~FeedbackServer();
  FeedbackServer(const FeedbackServer&) = delete;
  FeedbackServer& operator=(const FeedbackServer&) = delete;

  /// Binds and starts serving on a background thread; port 0 picks a free
  /// port. Returns the bound port.
  int start(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Wire formats, exposed for tests and clients.
std::string status_to_json(const feedback::StatusSnapshot& status);
std::string batch_to_json(int epoch, const std::vector<feedback::RenderedSample>& samples);
/// Throws std::invalid_argument on a malformed document.
feedback::Submission submission_from_json(const std::string& body);
std::string submission_to_json(const feedback::Submission& submission);

}  // namespace hero::run
