// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hero/autodiff/adam.hpp"
#include "hero/feedback/source.hpp"
#include "hero/noise/pi_hero.hpp"
#include "hero/run/config.hpp"

namespace hero::run {

inline constexpr int kCheckpointFormat = 1;
inline constexpr const char* kBaseFileName = "base.json";
inline constexpr const char* kCheckpointFileName = "checkpoint.json";
inline constexpr const char* kConfigFileName = "config.json";
inline constexpr const char* kMetricsFileName = "metrics.csv";

/// A pretrained denoiser together with the configuration that produced it.
struct BaseModel {
  BaseConfig config;
  diffusion::NoiseSchedule schedule;
  diffusion::DenoiserNet net;
};

/// Builds the dataset and trains a fresh denoiser.
BaseModel pretrain_base(const BaseConfig& config, diffusion::PretrainResult* result = nullptr);
/// Writes <dir>/base.json, creating the directory.
std::filesystem::path save_base(const BaseModel& model, const std::filesystem::path& dir);
/// Accepts the file itself or the directory holding base.json.
BaseModel load_base(const std::filesystem::path& path);

struct RunState {
  int epoch = 0;  // completed epochs
  long n_fb = 0;
  feedback::Phase phase = feedback::Phase::sampling;
  std::vector<double> success_history;
  int metrics_rows = 0;
  bool operator==(const RunState&) const = default;
};

/// Everything a run needs to continue after its last completed epoch. The
/// base weights are not repeated; only adapter entries are stored.
struct RunCheckpoint {
  int format_version = kCheckpointFormat;
  RunState state;
  noise::PiHeroState pi;
  ad::ParamStore adapters;
  ad::ParamStore embedding;
  ad::ParamStore head;
  ad::AdamState ddpo_adam;
  std::string rng;
};

void save_checkpoint(const RunCheckpoint& checkpoint, const std::filesystem::path& run_dir);
RunCheckpoint load_checkpoint(const std::filesystem::path& run_dir);
bool has_checkpoint(const std::filesystem::path& run_dir);

/// Copies the values of every entry of `src` into the same-named entry of `dst`.
void assign_params(const ad::ParamStore& src, ad::ParamStore& dst);

}  // namespace hero::run
