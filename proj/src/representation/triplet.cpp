// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/representation/triplet.hpp"

#include <stdexcept>

#include "hero/autodiff/adam.hpp"

namespace hero::repr {

namespace {

void check_pools(const TripletBatch& batch) {
  if (batch.positives.empty() || batch.negatives.empty()) {
    throw std::invalid_argument("triplet_loss: positive and negative pools must be nonempty");
  }
}

ad::Tensor pack(const std::vector<std::vector<double>>& rows, std::size_t width) {
  ad::Tensor t = ad::Tensor::zeros({rows.size(), width});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width) throw std::invalid_argument("triplet_loss: sample width mismatch");
    std::copy(rows[i].begin(), rows[i].end(), t.data.begin() + i * width);
  }
  return t;
}

}  // namespace

ad::Var triplet_loss(ad::Tape& tape, const EmbeddingNet& embed, const ProjectionHead& head,
                     const TripletBatch& batch, const std::vector<PairIndex>& pairs) {
  check_pools(batch);
  if (pairs.empty()) throw std::invalid_argument("triplet_loss: no pairs");
  const std::size_t dim = embed.config().input_dim;
  auto project = [&](const std::vector<std::vector<double>>& rows) {
    return head.forward(tape, embed.forward(tape, tape.constant(pack(rows, dim))));
  };
  const ad::Var anchor = project({batch.anchor});
  const ad::Var pos = project(batch.positives);
  const ad::Var neg = project(batch.negatives);

  std::vector<std::size_t> a_rows(pairs.size(), 0), p_rows, n_rows;
  for (const auto& [p, n] : pairs) {
    if (p >= batch.positives.size() || n >= batch.negatives.size()) {
      throw std::invalid_argument("triplet_loss: pair index out of range");
    }
    p_rows.push_back(p);
    n_rows.push_back(n);
  }
  const ad::Var a = tape.gather_rows(anchor, a_rows);
  const ad::Var cos_ap = tape.cosine_similarity(a, tape.gather_rows(pos, p_rows));
  const ad::Var cos_an = tape.cosine_similarity(a, tape.gather_rows(neg, n_rows));
  // d(a,p) - d(a,n) = cos(a,n) - cos(a,p)
  const ad::Var hinge = tape.max_const(tape.add_scalar(tape.sub(cos_an, cos_ap), batch.margin), 0.0);
  return tape.mean(hinge);
}

double triplet_loss(const EmbeddingNet& embed, const ProjectionHead& head, const TripletBatch& batch) {
  check_pools(batch);
  std::vector<PairIndex> pairs;
  for (std::size_t p = 0; p < batch.positives.size(); ++p)
    for (std::size_t n = 0; n < batch.negatives.size(); ++n) pairs.emplace_back(p, n);
  ad::Tape tape;
  return tape.value(triplet_loss(tape, embed, head, batch, pairs)).item();
}

EmbeddingTrainResult train_embedding(EmbeddingNet& embed, ProjectionHead& head,
                                     const TripletBatch& batch, const EmbeddingTrainConfig& config,
                                     Rng& rng) {
  check_pools(batch);
  EmbeddingTrainResult result;
  ad::AdamState adam_e, adam_g;
  adam_e.config.lr = adam_g.config.lr = config.lr;
  ad::ParamStore* stores[] = {&embed.params(), &head.params()};

  for (int step = 0; step < config.steps; ++step) {
    std::vector<PairIndex> pairs(config.pair_batch);
    for (auto& pr : pairs) pr = {rng.index(batch.positives.size()), rng.index(batch.negatives.size())};
    ad::Tape tape;
    const ad::Var loss = triplet_loss(tape, embed, head, batch, pairs);
    tape.backward(loss, std::span<ad::ParamStore* const>(stores));
    ad::adam_step(embed.params(), adam_e);
    ad::adam_step(head.params(), adam_g);
    result.loss_history.push_back(tape.value(loss).item());
  }
  embed.params().zero_grads();
  head.params().zero_grads();
  return result;
}

}  // namespace hero::repr
