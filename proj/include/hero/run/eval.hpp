// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hero/feedback/oracle.hpp"
#include "hero/run/config.hpp"

namespace hero::run {

struct SampleSet {
  std::string prior;  // "refined" or "standard"
  int condition = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> z_T;
  std::vector<std::vector<double>> z_0;
};

/// Samples n outputs from a finished run's fine-tuned model, drawing z_T from
/// the run's refined prior or from N(0, I). `seed` defaults to the run seed.
SampleSet generate_final(const std::filesystem::path& run_dir, std::size_t n, bool use_refined_prior,
                         std::optional<std::uint64_t> seed = std::nullopt);
std::string to_json(const SampleSet& samples);
void write_samples(const SampleSet& samples, const std::filesystem::path& file);

struct EvalReport {
  std::string source;  // "run" or "base"
  std::string oracle;
  std::size_t n = 0;
  double success = 0.0;
  double standard_error = 0.0;  // sqrt(p (1 - p) / n)
};

/// Success fraction of n fresh samples. `path` is a run directory (refined
/// prior unless `use_refined_prior` is false) or a base checkpoint (standard
/// prior, default sampler settings).
EvalReport evaluate(const std::filesystem::path& path, const feedback::OracleSpec& oracle, std::size_t n,
                    std::optional<std::uint64_t> seed = std::nullopt, bool use_refined_prior = true);
std::string to_json(const EvalReport& report);

struct AblationGrid {
  std::vector<repr::RewardVariant> variants;
  std::vector<double> betas;
  std::vector<bool> refined_priors;
  std::vector<std::uint64_t> seeds;
};

/// "variant=best,binary;beta=0.5,1.0;prior=refined,random;seeds=0,1,2".
/// Keys left out take the single value of `config`.
AblationGrid parse_grid(const std::string& spec, const RunConfig& config);

struct AblationCell {
  repr::RewardVariant variant = repr::RewardVariant::best;
  double beta = 0.5;
  bool refined_prior = true;
  std::uint64_t seed = 0;
  std::optional<double> final_success;
  std::vector<double> success_history;
};

struct AblationGroup {
  repr::RewardVariant variant = repr::RewardVariant::best;
  double beta = 0.5;
  bool refined_prior = true;
  std::vector<const AblationCell*> cells;
  double mean_final = 0.0;
  /// Mean over seeds of the first epoch whose success reaches 0.5
  /// (1-based); seeds that never reach it count as epochs + 1.
  double mean_epochs_to_half = 0.0;
  /// Mean over the first three epochs of the cross-seed success variance.
  double early_variance = 0.0;
};

struct AblationReport {
  std::vector<AblationCell> cells;
  std::vector<AblationGroup> groups() const;
  std::string to_json() const;
  std::string table() const;
};

/// First 1-based epoch with success >= threshold, or nullopt.
std::optional<int> epochs_to_reach(const std::vector<double>& history, double threshold);

/// Runs hero_train for every grid cell under <config.run_dir>/<cell>/seed-<s>.
/// Finished cells are reused rather than retrained.
AblationReport ablate(const RunConfig& config, const AblationGrid& grid, bool verbose = false);

}  // namespace hero::run
