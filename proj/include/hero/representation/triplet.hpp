// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hero/autodiff/tape.hpp"
#include "hero/common/rng.hpp"
#include "hero/representation/embedding.hpp"

namespace hero::repr {

/// Anchor is the best clean sample; positives are the good set, negatives the bad set.
struct TripletBatch {
  std::vector<double> anchor;
  std::vector<std::vector<double>> positives;
  std::vector<std::vector<double>> negatives;
  double margin = 0.5;
};

using PairIndex = std::pair<std::size_t, std::size_t>;  // (positive, negative)

/// Mean over `pairs` of max{d(a, p) - d(a, n) + margin, 0} with
/// d = 1 - cosine similarity on projection-head outputs g(E(.)).
ad::Var triplet_loss(ad::Tape& tape, const EmbeddingNet& embed, const ProjectionHead& head,
                     const TripletBatch& batch, const std::vector<PairIndex>& pairs);

/// Same loss over every (positive, negative) pair. Throws on an empty pool.
double triplet_loss(const EmbeddingNet& embed, const ProjectionHead& head, const TripletBatch& batch);

struct EmbeddingTrainConfig {
  int steps = 200;
  double lr = 1e-3;
  std::size_t pair_batch = 256;
};

struct EmbeddingTrainResult {
  std::vector<double> loss_history;
};

/// Adam on the triplet loss over uniformly resampled (positive, negative)
/// pairs. Parameters carry over between calls.
EmbeddingTrainResult train_embedding(EmbeddingNet& embed, ProjectionHead& head,
                                     const TripletBatch& batch, const EmbeddingTrainConfig& config,
                                     Rng& rng);

}  // namespace hero::repr
