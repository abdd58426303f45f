// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "hero/feedback/annotation.hpp"
#include "hero/representation/embedding.hpp"

namespace hero::repr {

enum class RewardVariant { best, positives, binary, noembed };

std::string to_string(RewardVariant variant);
RewardVariant reward_variant_from_string(const std::string& s);

/// Per-sample rewards in batch order.
struct RewardVector {
  std::vector<double> values;
  RewardVariant variant = RewardVariant::best;
};

inline constexpr double kRewardDelta = 1e-8;

/// <a, b> / max(||a|| ||b||, delta), clamped to [-1, 1]. Identical inputs give exactly 1.
double clamped_cosine(std::span<const double> a, std::span<const double> b, double delta = kRewardDelta);

/// Cosine similarity of E(z0) to E(z0_best), in representation space (not the projection head).
RewardVector rewards_similarity_to_best(const EmbeddingNet& embed,
                                        const std::vector<std::vector<double>>& z0,
                                        std::span<const double> z0_best);

/// Cosine similarity of E(z0) to the mean embedding of the good set joined with the best sample.
RewardVector rewards_similarity_to_positives(const EmbeddingNet& embed,
                                             const std::vector<std::vector<double>>& z0,
                                             const std::vector<std::vector<double>>& good,
                                             std::span<const double> z0_best);

/// 1 for good (including best), 0 for bad; indexed by annotation.ids order.
RewardVector rewards_binary(const feedback::BatchAnnotation& annotation);

/// Similarity-to-positives computed on raw clean samples instead of embeddings.
RewardVector rewards_noembed(const std::vector<std::vector<double>>& z0,
                             const std::vector<std::vector<double>>& good,
                             std::span<const double> z0_best);

}  // namespace hero::repr
