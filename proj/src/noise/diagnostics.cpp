// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/noise/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hero::noise {

ConcentrationReport concentration_diagnostic(std::size_t dim, double eps2, std::size_t n, Rng& rng,
                                             MeansSource source, std::size_t components) {
  if (dim == 0 || n == 0 || components == 0) {
    throw std::invalid_argument("concentration_diagnostic: dim, n and components must be positive");
  }
  if (!(eps2 >= 0.0)) throw std::invalid_argument("concentration_diagnostic: eps2 must be non-negative");
  const double root_d = std::sqrt(static_cast<double>(dim));
  std::vector<std::vector<double>> means;
  for (std::size_t k = 0; k < components; ++k) {
    auto m = rng.normal_vector(dim);
    if (source == MeansSource::sphere) {
      const double norm = std::sqrt(std::inner_product(m.begin(), m.end(), m.begin(), 0.0));
      for (auto& x : m) x *= root_d / norm;
    }
    means.push_back(std::move(m));
  }
  const double eps = std::sqrt(eps2);
  const double lo = (1.0 - eps) * (1.0 - 1e-12), hi = (1.0 + eps) * (1.0 + 1e-12);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = means[rng.index(components)];
    double sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double y = m[j] + eps * rng.normal();
      sq += y * y;
    }
    const double r = std::sqrt(sq) / root_d;
    if (r >= lo && r <= hi) ++inside;
  }
  return {dim, eps2, n, components, static_cast<double>(inside) / static_cast<double>(n)};
}

double dependence_score(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("dependence_score: need at least two paired rows");
  }
  const std::size_t n = a.size(), dim = a.front().size();
  double total = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ma += a[i].at(j);
      mb += b[i].at(j);
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double da = a[i][j] - ma, db = b[i][j] - mb;
      sab += da * db;
      saa += da * da;
      sbb += db * db;
    }
    if (saa > 0.0 && sbb > 0.0) total += std::abs(sab / std::sqrt(saa * sbb));
  }
  return total / static_cast<double>(dim);
}

InfoLinkReport info_link_diagnostic(const diffusion::DenoiserNet& net, const diffusion::NoiseSchedule& schedule,
                                    const diffusion::SamplerConfig& sampler, std::size_t n, int condition,
                                    Rng& rng) {
  if (n < 2) throw std::invalid_argument("info_link_diagnostic: n must be at least 2");
  const std::size_t dim = net.config().dim;
  std::vector<std::vector<double>> z_T(n);
  for (auto& z : z_T) z = rng.normal_vector(dim);
  const auto trajs = diffusion::sample_trajectories(net, schedule, z_T, condition, sampler, rng);
  std::vector<std::vector<double>> z0;
  z0.reserve(n);
  for (const auto& t : trajs) z0.push_back(t.z0());

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  std::vector<std::vector<double>> shuffled;
  shuffled.reserve(n);
  for (auto p : perm) shuffled.push_back(z0[p]);

  InfoLinkReport r;
  r.n = n;
  r.steps = sampler.steps;
  r.score = dependence_score(z_T, z0);
  r.shuffled_score = dependence_score(z_T, shuffled);
  r.threshold = 3.0 / std::sqrt(static_cast<double>(n));
  return r;
}

}  // namespace hero::noise
