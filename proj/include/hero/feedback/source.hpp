// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hero/feedback/annotation.hpp"
#include "hero/feedback/oracle.hpp"

namespace hero::feedback {

/// A sample as shown to the evaluator: "points2d" carries the raw coordinate
/// pair, "gray8x8" carries 64 intensities in [0, 1].
struct RenderedSample {
  int id = 0;
  std::string kind;
  std::vector<double> data;
};

/// Renders clean samples for display. Two-dimensional samples pass through;
/// 64-dimensional samples in [-1, 1] map to [0, 1].
std::vector<RenderedSample> render_batch(const std::vector<std::vector<double>>& z0);

class FeedbackSource {
 public:
  virtual ~FeedbackSource() = default;
  /// Blocks until the batch of `epoch` is annotated.
  virtual BatchAnnotation await_feedback(int epoch, const std::vector<RenderedSample>& batch,
                                         const std::vector<std::vector<double>>& z0) = 0;
};

class OracleFeedbackSource final : public FeedbackSource {
 public:
  explicit OracleFeedbackSource(OracleSpec oracle) : oracle_(std::move(oracle)) {}
  BatchAnnotation await_feedback(int epoch, const std::vector<RenderedSample>& batch,
                                 const std::vector<std::vector<double>>& z0) override;
  const OracleSpec& oracle() const { return oracle_; }

 private:
  OracleSpec oracle_;
};

enum class Phase { sampling, awaiting_feedback, training_embedding, training_ddpo, done };

std::string to_string(Phase phase);
Phase phase_from_string(const std::string& s);

struct StatusSnapshot {
  int epoch = 0;
  Phase phase = Phase::sampling;
  long n_fb = 0;
  long budget = 0;
  std::vector<double> success_history;
};

/// A labeled batch as posted by a client.
struct Submission {
  int epoch = 0;
  std::vector<std::pair<int, bool>> labels;  // (id, good)
  std::optional<int> best;
};

struct SubmitResult {
  int status = 200;  // 200 accepted, 409 wrong epoch / not awaiting, 422 invariant violation
  std::string reason;
};

/// Raised from await_feedback when the hub shuts down before an annotation arrives.
class FeedbackAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hand-off point between the training thread and the HTTP handlers. The
/// trainer publishes status and, via await_feedback, the pending batch;
/// handlers read snapshots and submit. At most one annotation is accepted per
/// epoch: acceptance moves the phase to training_embedding, after which
/// further submissions for that epoch get 409.
class FeedbackHub final : public FeedbackSource {
 public:
  void publish_status(const StatusSnapshot& status);
  void set_phase(Phase phase);
  StatusSnapshot status() const;

  /// Pending batch, present only while awaiting feedback.
  std::optional<std::pair<int, std::vector<RenderedSample>>> batch() const;

  SubmitResult submit(const Submission& submission);

  BatchAnnotation await_feedback(int epoch, const std::vector<RenderedSample>& batch,
                                 const std::vector<std::vector<double>>& z0) override;

  void shutdown();
  bool is_shut_down() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  StatusSnapshot status_;
  std::vector<RenderedSample> batch_;
  std::optional<BatchAnnotation> accepted_;
  bool shutdown_ = false;
};

}  // namespace hero::feedback
