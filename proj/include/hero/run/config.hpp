// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "hero/ddpo/ddpo.hpp"
#include "hero/diffusion/dataset.hpp"
#include "hero/diffusion/denoiser.hpp"
#include "hero/diffusion/pretrain.hpp"
#include "hero/diffusion/sampler.hpp"
#include "hero/diffusion/schedule.hpp"
#include "hero/feedback/oracle.hpp"
#include "hero/representation/embedding.hpp"
#include "hero/representation/rewards.hpp"
#include "hero/representation/triplet.hpp"

namespace hero::run {

struct ScheduleConfig {
  int steps = 50;
  double beta_min = 1e-3;
  double beta_max = 0.2;
};

diffusion::NoiseSchedule make_schedule(const ScheduleConfig& config);

/// Everything needed to pretrain a base denoiser.
struct BaseConfig {
  diffusion::DatasetSpec dataset;
  ScheduleConfig schedule;
  diffusion::DenoiserConfig denoiser;  // dim and num_labels are taken from the dataset
  diffusion::PretrainConfig pretrain;
  std::uint64_t seed = 0;
};

struct EmbeddingSettings {
  repr::EmbeddingConfig net;  // input_dim is taken from the base model
  repr::EmbeddingTrainConfig train;
  double margin = 0.5;
};

struct PiHeroConfig {
  double beta = 0.5;
  double eps2 = 0.1;
  bool refined_prior = true;  // false: always sample z_T from N(0, I)
};

struct FeedbackConfig {
  std::string source = "oracle";  // "oracle" or "service"
  feedback::OracleSpec oracle = feedback::oracle_preset("mode0");
  int port = 8080;
};

struct RunConfig {
  std::filesystem::path base_checkpoint;
  std::filesystem::path run_dir;
  /// Toy-scale run settings. With 20 steps the K + 1 loss window still
  /// reaches the noise levels where a 2-D sample picks its mode, and eta < 1
  /// keeps enough of z_T in z_0 for the refined prior to matter. The wide
  /// clip lets several optimizer steps act on one batch.
  diffusion::SamplerConfig sampler{.steps = 20, .eta = 0.5};
  EmbeddingSettings embedding;
  ddpo::DdpoConfig ddpo{.clip = 0.2, .lr = 3e-3, .inner_epochs = 4};
  repr::RewardVariant reward = repr::RewardVariant::best;
  PiHeroConfig pi_hero;
  FeedbackConfig feedback;
  /// Oracle used for the post-training evaluation; defaults to the feedback
  /// oracle in oracle mode and is skipped in service mode when absent.
  std::optional<feedback::OracleSpec> eval_oracle;
  long budget = 512;
  int batch = 64;
  std::uint64_t seed = 0;
  int condition = 0;
  /// Stop early once an epoch's success rate reaches this value.
  std::optional<double> stop_success;
  int final_eval_n = 1000;
};

/// Throws std::invalid_argument on broken invariants (budget >= batch >= 2, ...).
void validate(const RunConfig& config);

/// Presets: "default" (512 = 8 x 64) and "large" (1152 = 9 x 128).
RunConfig run_preset(const std::string& name);

/// JSON documents. Missing keys keep their defaults; unknown keys are errors.
/// A run config may name a "preset" that is applied before the other keys.
std::string to_json(const BaseConfig& config);
std::string to_json(const RunConfig& config);
BaseConfig base_config_from_json(const std::string& text);
RunConfig run_config_from_json(const std::string& text);

BaseConfig load_base_config(const std::filesystem::path& path);
RunConfig load_run_config(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file and a rename so readers never see a torn file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace hero::run
