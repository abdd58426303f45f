// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/representation/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hero::repr {

namespace {

// Mean of the good set joined with the best sample (the best is counted once
// even when it is also listed among the goods).
std::vector<double> positive_mean(const std::vector<std::vector<double>>& good,
                                  std::span<const double> best) {
  std::vector<std::vector<double>> pool = good;
  const bool listed = std::any_of(good.begin(), good.end(), [&](const std::vector<double>& g) {
    return std::equal(g.begin(), g.end(), best.begin(), best.end());
  });
  if (!listed) pool.emplace_back(best.begin(), best.end());
  std::vector<double> mean(best.size(), 0.0);
  for (const auto& v : pool) {
    if (v.size() != mean.size()) throw std::invalid_argument("positive pool: width mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
  }
  for (auto& x : mean) x /= static_cast<double>(pool.size());
  return mean;
}

}  // namespace

std::string to_string(RewardVariant variant) {
  switch (variant) {
    case RewardVariant::best: return "best";
    case RewardVariant::positives: return "positives";
    case RewardVariant::binary: return "binary";
    case RewardVariant::noembed: return "noembed";
  }
  return "unknown";
}

RewardVariant reward_variant_from_string(const std::string& s) {
  for (auto v : {RewardVariant::best, RewardVariant::positives, RewardVariant::binary, RewardVariant::noembed}) {
    if (to_string(v) == s) return v;
  }
  throw std::invalid_argument("unknown reward variant '" + s + "'");
}

double clamped_cosine(std::span<const double> a, std::span<const double> b, double delta) {
  if (a.size() != b.size()) throw std::invalid_argument("clamped_cosine: width mismatch");
  double dot = 0.0, na2 = 0.0, nb2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na2 += a[i] * a[i];
    nb2 += b[i] * b[i];
  }
  // sqrt(na2 * nb2) rather than sqrt(na2) * sqrt(nb2): for a == b the
  // denominator then equals the dot product bit for bit.
  const double denom = std::max(std::sqrt(na2 * nb2), delta);
  return std::clamp(dot / denom, -1.0, 1.0);
}

RewardVector rewards_similarity_to_best(const EmbeddingNet& embed,
                                        const std::vector<std::vector<double>>& z0,
                                        std::span<const double> z0_best) {
  const auto anchor = embed.embed(z0_best);
  RewardVector r{{}, RewardVariant::best};
  for (const auto& z : z0) r.values.push_back(clamped_cosine(embed.embed(z), anchor));
  return r;
}

RewardVector rewards_similarity_to_positives(const EmbeddingNet& embed,
                                             const std::vector<std::vector<double>>& z0,
                                             const std::vector<std::vector<double>>& good,
                                             std::span<const double> z0_best) {
  if (good.empty()) throw std::invalid_argument("rewards_similarity_to_positives: empty good pool");
  const auto anchor = positive_mean(embed.embed_rows(good), embed.embed(z0_best));
  RewardVector r{{}, RewardVariant::positives};
  for (const auto& z : z0) r.values.push_back(clamped_cosine(embed.embed(z), anchor));
  return r;
}

RewardVector rewards_binary(const feedback::BatchAnnotation& annotation) {
  RewardVector r{{}, RewardVariant::binary};
  for (int id : annotation.ids) r.values.push_back(annotation.is_good(id) ? 1.0 : 0.0);
  return r;
}

RewardVector rewards_noembed(const std::vector<std::vector<double>>& z0,
                             const std::vector<std::vector<double>>& good,
                             std::span<const double> z0_best) {
  if (good.empty()) throw std::invalid_argument("rewards_noembed: empty good pool");
  const auto anchor = positive_mean(good, z0_best);
  RewardVector r{{}, RewardVariant::noembed};
  for (const auto& z : z0) r.values.push_back(clamped_cosine(z, anchor));
  return r;
}

}  // namespace hero::repr
