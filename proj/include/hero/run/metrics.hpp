// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hero::run {

/// One row of metrics.csv. Training columns are NaN on epochs that skipped training.
struct EpochMetrics {
  int epoch = 0;
  long n_fb = 0;
  int n_good = 0;
  double success_rate = 0.0;
  double mean_reward = 0.0;
  double best_reward = 0.0;  // reward of the best sample
  double min_reward = 0.0;
  double max_reward = 0.0;
  double mean_advantage = 0.0;
  double ddpo_loss = 0.0;
  double clip_fraction = 0.0;
  double mean_ratio = 0.0;
  double embed_loss = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "epoch,n_fb,n_good,success_rate,mean_reward,best_reward,min_reward,max_reward,mean_advantage,ddpo_loss,clip_fraction,mean_ratio,embed_loss";

std::string to_csv_row(const EpochMetrics& m);
EpochMetrics from_csv_row(const std::string& row);

/// Appends a row, writing the header first when the file is new.
void append_metrics(const std::filesystem::path& file, const EpochMetrics& m);
/// Missing file gives an empty list; a wrong header or malformed row throws.
std::vector<EpochMetrics> load_metrics(const std::filesystem::path& file);
/// Rewrites the file keeping only the first `rows` rows.
void truncate_metrics(const std::filesystem::path& file, std::size_t rows);

}  // namespace hero::run
