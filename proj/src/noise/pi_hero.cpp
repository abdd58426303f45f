// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/noise/pi_hero.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hero::noise {

void PiHeroState::validate() const {
  if (dim == 0) throw std::invalid_argument("PiHeroState: dim must be positive");
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("PiHeroState: beta must lie in [0, 1]");
  if (!(eps2 >= 0.0)) throw std::invalid_argument("PiHeroState: eps2 must be non-negative");
  const bool has_means = best.has_value() || !goods.empty();
  if (first_iteration && has_means) throw std::invalid_argument("PiHeroState: first iteration with stored means");
  if (!first_iteration && !has_means) throw std::invalid_argument("PiHeroState: no means stored after first iteration");
  auto check = [&](const std::vector<double>& m) {
    if (m.size() != dim) {
      throw std::invalid_argument("PiHeroState: mean of size " + std::to_string(m.size()) +
                                  ", expected " + std::to_string(dim));
    }
  };
  if (best) check(*best);
  for (const auto& g : goods) check(g);
}

std::vector<std::vector<double>> pi_hero_sample(const PiHeroState& state, std::size_t n, Rng& rng,
                                                std::vector<int>* components) {
  state.validate();
  const double eps = std::sqrt(state.eps2);
  const std::size_t n_goods = state.goods.size();
  std::vector<std::vector<double>> out;
  out.reserve(n);
  if (components) components->clear();

  auto pick = [](double v, std::size_t m) {
    return std::min(static_cast<std::size_t>(v * static_cast<double>(m)), m - 1);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    const double v = rng.uniform();
    std::vector<double> z = rng.normal_vector(state.dim);

    int component = kPriorComponent;
    if (!state.first_iteration) {
      if (!state.best) {
        component = static_cast<int>(pick(v, n_goods)) + 1;
      } else if (n_goods == 0) {
        component = kBestComponent;
      } else if (state.beta == 0.0) {
        // best is one more uniform component, listed after the goods
        const std::size_t k = pick(v, n_goods + 1);
        component = k == n_goods ? kBestComponent : static_cast<int>(k) + 1;
      } else if (u < state.beta) {
        component = kBestComponent;
      } else {
        component = static_cast<int>(pick(v, n_goods)) + 1;
      }
    }
    if (component != kPriorComponent) {
      const auto& mean = component == kBestComponent ? *state.best : state.goods[component - 1];
      for (std::size_t j = 0; j < state.dim; ++j) z[j] = mean[j] + eps * z[j];
    }
    out.push_back(std::move(z));
    if (components) components->push_back(component);
  }
  return out;
}

PiHeroState pi_hero_update(const PiHeroState& state, const std::vector<std::vector<double>>& goods,
                           const std::optional<std::vector<double>>& best) {
  if (goods.empty() && !best) return state;
  PiHeroState next = state;
  next.goods = goods;
  next.best = best;
  next.first_iteration = false;
  next.validate();
  return next;
}

}  // namespace hero::noise
