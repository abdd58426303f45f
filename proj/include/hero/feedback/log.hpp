// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hero/feedback/annotation.hpp"

namespace hero::feedback {

struct SampleRecord {
  int id = 0;
  bool good = false;
  std::vector<double> z_T;
  std::vector<double> z_0;

  bool operator==(const SampleRecord&) const = default;
};

/// One line of feedback.jsonl.
struct FeedbackLogEntry {
  int epoch = 0;
  std::vector<SampleRecord> records;
  std::optional<int> best;
  std::string annotator;
  std::string timestamp;  // ISO-8601 UTC

  BatchAnnotation annotation() const;
  bool operator==(const FeedbackLogEntry&) const = default;
};

inline constexpr const char* kFeedbackLogName = "feedback.jsonl";

std::string utc_timestamp();

std::string to_json_line(const FeedbackLogEntry& entry);
/// Throws std::runtime_error on malformed input.
FeedbackLogEntry from_json_line(const std::string& line);

/// Appends one line to run_dir/feedback.jsonl. The directory must exist.
void log_feedback(const FeedbackLogEntry& entry, const std::filesystem::path& run_dir);

/// Entries in append order; a missing or empty file yields none. A corrupt
/// line raises std::runtime_error naming its 1-based line number.
std::vector<FeedbackLogEntry> load_feedback(const std::filesystem::path& run_dir);

}  // namespace hero::feedback
