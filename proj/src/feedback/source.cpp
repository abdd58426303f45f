// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/feedback/source.hpp"

#include <algorithm>

namespace hero::feedback {

std::vector<RenderedSample> render_batch(const std::vector<std::vector<double>>& z0) {
  std::vector<RenderedSample> out;
  out.reserve(z0.size());
  for (std::size_t i = 0; i < z0.size(); ++i) {
    RenderedSample s;
    s.id = static_cast<int>(i);
    if (z0[i].size() == 64) {
      s.kind = "gray8x8";
      s.data.resize(64);
      for (std::size_t k = 0; k < 64; ++k) s.data[k] = std::clamp((z0[i][k] + 1.0) / 2.0, 0.0, 1.0);
    } else {
      s.kind = "points2d";
      s.data = z0[i];
    }
    out.push_back(std::move(s));
  }
  return out;
}

BatchAnnotation OracleFeedbackSource::await_feedback(int epoch, const std::vector<RenderedSample>& batch,
                                                     const std::vector<std::vector<double>>& z0) {
  std::vector<int> ids;
  for (const auto& s : batch) ids.push_back(s.id);
  return oracle_annotate(epoch, ids, z0, oracle_);
}

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::sampling: return "sampling";
    case Phase::awaiting_feedback: return "awaiting_feedback";
    case Phase::training_embedding: return "training_embedding";
    case Phase::training_ddpo: return "training_ddpo";
    case Phase::done: return "done";
  }
  return "unknown";
}

Phase phase_from_string(const std::string& s) {
  for (auto p : {Phase::sampling, Phase::awaiting_feedback, Phase::training_embedding,
                 Phase::training_ddpo, Phase::done}) {
    if (to_string(p) == s) return p;
  }
  throw std::invalid_argument("unknown phase '" + s + "'");
}

void FeedbackHub::publish_status(const StatusSnapshot& status) {
  std::lock_guard lock(mutex_);
  status_ = status;
}

void FeedbackHub::set_phase(Phase phase) {
  std::lock_guard lock(mutex_);
  status_.phase = phase;
}

StatusSnapshot FeedbackHub::status() const {
  std::lock_guard lock(mutex_);
  return status_;
}

std::optional<std::pair<int, std::vector<RenderedSample>>> FeedbackHub::batch() const {
  std::lock_guard lock(mutex_);
  if (status_.phase != Phase::awaiting_feedback) return std::nullopt;
  return std::make_pair(status_.epoch, batch_);
}

SubmitResult FeedbackHub::submit(const Submission& sub) {
  std::lock_guard lock(mutex_);
  if (status_.phase != Phase::awaiting_feedback) {
    return {409, "not awaiting feedback (phase " + to_string(status_.phase) + ")"};
  }
  if (sub.epoch != status_.epoch) {
    return {409, "epoch mismatch: submitted " + std::to_string(sub.epoch) + ", current " +
                     std::to_string(status_.epoch)};
  }
  std::vector<int> ids, batch_ids;
  std::vector<bool> flags;
  for (const auto& [id, good] : sub.labels) {
    ids.push_back(id);
    flags.push_back(good);
  }
  for (const auto& s : batch_) batch_ids.push_back(s.id);
  try {
    auto annotation = make_annotation(sub.epoch, ids, flags, sub.best, "human");
    annotation.ids = batch_ids;
    validate(annotation);
    accepted_ = std::move(annotation);
  } catch (const AnnotationError& e) {
    return {422, e.what()};
  }
  status_.phase = Phase::training_embedding;
  cv_.notify_all();
  return {200, "accepted"};
}

BatchAnnotation FeedbackHub::await_feedback(int epoch, const std::vector<RenderedSample>& batch,
                                            const std::vector<std::vector<double>>&) {
  std::unique_lock lock(mutex_);
  batch_ = batch;
  accepted_.reset();
  status_.epoch = epoch;
  status_.phase = Phase::awaiting_feedback;
  cv_.wait(lock, [&] { return accepted_.has_value() || shutdown_; });
  if (!accepted_) throw FeedbackAborted("feedback service shut down while awaiting epoch " + std::to_string(epoch));
  auto result = std::move(*accepted_);
  accepted_.reset();
  batch_.clear();
  return result;
}

void FeedbackHub::shutdown() {
  std::lock_guard lock(mutex_);
  shutdown_ = true;
  cv_.notify_all();
}

bool FeedbackHub::is_shut_down() const {
  std::lock_guard lock(mutex_);
  return shutdown_;
}

}  // namespace hero::feedback
