// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <map>
#include <stdexcept>

#include "doctest.h"
#include "hero/noise/diagnostics.hpp"
#include "hero/noise/pi_hero.hpp"

using namespace hero;
using namespace hero::noise;

namespace {

PiHeroState refined(double beta, std::size_t goods, double eps2 = 0.1) {
  PiHeroState s;
  s.beta = beta;
  s.eps2 = eps2;
  std::vector<std::vector<double>> g;
  for (std::size_t i = 0; i < goods; ++i) g.push_back({10.0 * (i + 1), -1.0});
  return pi_hero_update(s, g, std::vector<double>{-5.0, 5.0});
}

std::map<int, double> frequencies(const std::vector<int>& comps) {
  std::map<int, double> f;
  for (int c : comps) f[c] += 1.0 / static_cast<double>(comps.size());
  return f;
}

// Binomial tolerance of 5 standard errors.
double tol(double p, std::size_t n) { return 5.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

}  // namespace

TEST_CASE("first iteration samples the standard prior") {
  PiHeroState s;
  Rng rng(1);
  std::vector<int> comps;
  const auto z = pi_hero_sample(s, 20000, rng, &comps);
  double mean = 0.0, sq = 0.0;
  for (const auto& v : z)
    for (double x : v) mean += x, sq += x * x;
  mean /= 40000.0;
  sq /= 40000.0;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(40000.0));
  CHECK(std::abs(sq - 1.0) < 5.0 * std::sqrt(2.0 / 40000.0));
  for (int c : comps) CHECK(c == kPriorComponent);
}

TEST_CASE("mixture weights follow beta") {
  const std::size_t n = 20000;
  for (double beta : {0.25, 0.5, 0.9}) {
    CAPTURE(beta);
    Rng rng(2);
    std::vector<int> comps;
    pi_hero_sample(refined(beta, 3), n, rng, &comps);
    auto f = frequencies(comps);
    CHECK(std::abs(f[kBestComponent] - beta) < tol(beta, n));
    const double pg = (1.0 - beta) / 3.0;
    for (int k = 1; k <= 3; ++k) CHECK(std::abs(f[k] - pg) < tol(pg, n));
    CHECK(f.count(kPriorComponent) == 0);
  }
}

TEST_CASE("beta edge cases") {
  const std::size_t n = 20000;
  Rng rng(3);
  std::vector<int> comps;
  pi_hero_sample(refined(1.0, 4), n, rng, &comps);
  for (int c : comps) CHECK(c == kBestComponent);

  pi_hero_sample(refined(0.0, 3), n, rng, &comps);
  auto f = frequencies(comps);
  CHECK(f.size() == 4);
  for (int k = 0; k <= 3; ++k) CHECK(std::abs(f[k] - 0.25) < tol(0.25, n));

  // Best alone: every draw uses it whatever beta is.
  pi_hero_sample(refined(0.0, 0), 100, rng, &comps);
  for (int c : comps) CHECK(c == kBestComponent);

  // Goods alone: uniform over them.
  PiHeroState only_goods;
  only_goods = pi_hero_update(only_goods, {{1.0, 1.0}, {2.0, 2.0}}, std::nullopt);
  pi_hero_sample(only_goods, n, rng, &comps);
  f = frequencies(comps);
  CHECK(f.size() == 2);
  CHECK(std::abs(f[1] - 0.5) < tol(0.5, n));
}

TEST_CASE("draws are spread eps2 around their component") {
  const auto s = refined(0.5, 2, 0.04);
  Rng rng(4);
  std::vector<int> comps;
  const auto z = pi_hero_sample(s, 20000, rng, &comps);
  double sq = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto& m = comps[i] == kBestComponent ? *s.best : s.goods[comps[i] - 1];
    for (std::size_t j = 0; j < 2; ++j) sq += (z[i][j] - m[j]) * (z[i][j] - m[j]);
  }
  sq /= 40000.0;
  CHECK(std::abs(sq - 0.04) < 0.04 * 5.0 * std::sqrt(2.0 / 40000.0));

  Rng again(4);
  const auto exact = pi_hero_sample(refined(0.5, 2, 0.0), 50, again, &comps);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const auto& m = comps[i] == kBestComponent ? *s.best : s.goods[comps[i] - 1];
    CHECK(exact[i] == m);
  }
}

TEST_CASE("draws share random numbers across states") {
  const PiHeroState states[] = {PiHeroState{}, refined(0.0, 3), refined(0.5, 3), refined(1.0, 3), refined(0.5, 0)};
  std::vector<std::vector<double>> unit_draws;
  double next = 0.0;
  bool first = true;
  for (const auto& s : states) {
    Rng rng(77);
    std::vector<int> comps;
    const auto z = pi_hero_sample(s, 64, rng, &comps);
    std::vector<double> unit;
    const double eps = s.first_iteration ? 1.0 : std::sqrt(s.eps2);
    for (std::size_t i = 0; i < z.size(); ++i) {
      const std::vector<double> zero(2, 0.0);
      const auto& m = comps[i] == kPriorComponent ? zero
                      : comps[i] == kBestComponent ? *s.best
                                                   : s.goods[comps[i] - 1];
      for (std::size_t j = 0; j < 2; ++j) unit.push_back((z[i][j] - m[j]) / eps);
    }
    const double after = rng.uniform();
    if (first) {
      unit_draws.push_back(unit);
      next = after;
      first = false;
    } else {
      REQUIRE(unit.size() == unit_draws[0].size());
      for (std::size_t k = 0; k < unit.size(); ++k) CHECK(unit[k] == doctest::Approx(unit_draws[0][k]).epsilon(1e-9));
      CHECK(after == next);
    }
  }
}

TEST_CASE("refined draws are diverse") {
  Rng rng(5);
  const auto z = pi_hero_sample(refined(1.0, 0), 200, rng);
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t k = i + 1; k < z.size(); ++k) CHECK(z[i] != z[k]);
}

TEST_CASE("update semantics") {
  PiHeroState s;
  CHECK(pi_hero_update(s, {}, std::nullopt) == s);
  const auto r = refined(0.5, 2);
  CHECK_FALSE(r.first_iteration);
  CHECK(r.goods.size() == 2);
  CHECK(pi_hero_update(r, {}, std::nullopt) == r);
  const auto r2 = pi_hero_update(r, {{0.0, 0.0}}, std::nullopt);
  CHECK(r2.goods.size() == 1);
  CHECK_FALSE(r2.best.has_value());
  CHECK(r2.beta == 0.5);
  CHECK_THROWS_AS(pi_hero_update(r, {{0.0}}, std::nullopt), std::invalid_argument);

  PiHeroState bad;
  bad.beta = 1.5;
  CHECK_THROWS(bad.validate());
  bad = {};
  bad.first_iteration = false;
  CHECK_THROWS(bad.validate());
  bad = {};
  bad.goods = {{1.0, 2.0}};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("shell fraction matches the chi-square law") {
  // With means from the prior, |y|^2 / (1 + eps2) is chi-square with D degrees
  // of freedom once the mixture has as many components as draws.
  const std::size_t n = 20000;
  const double eps2 = 0.1, eps = std::sqrt(eps2);
  auto bounds = [&](double d) {
    return std::pair{d * (1 - eps) * (1 - eps) / (1 + eps2), d * (1 + eps) * (1 + eps) / (1 + eps2)};
  };
  {
    const auto [a, b] = bounds(2.0);
    const double p = std::exp(-a / 2) - std::exp(-b / 2);
    Rng rng(6);
    const auto r = concentration_diagnostic(2, eps2, n, rng, MeansSource::prior, n);
    CHECK(std::abs(r.fraction - p) < tol(p, n) + 0.01);
  }
  {
    const auto [a, b] = bounds(4.0);
    auto cdf = [](double x) { return 1.0 - std::exp(-x / 2) * (1 + x / 2); };
    const double p = cdf(b) - cdf(a);
    Rng rng(7);
    const auto r = concentration_diagnostic(4, eps2, n, rng, MeansSource::prior, n);
    CHECK(std::abs(r.fraction - p) < tol(p, n) + 0.01);
  }
}

TEST_CASE("shell fraction grows with dimension") {
  double last = 0.0;
  for (std::size_t d : {2u, 16u, 128u, 1024u}) {
    Rng rng(8);
    const auto r = concentration_diagnostic(d, 0.1, 4000, rng);
    CHECK(r.dim == d);
    CHECK(r.fraction >= last);
    last = r.fraction;
  }
  CHECK(last > 0.99);
  Rng rng(8);
  CHECK(concentration_diagnostic(2, 0.1, 4000, rng).fraction < 0.5);
}

TEST_CASE("sphere means with no spread sit exactly on the shell") {
  Rng rng(9);
  CHECK(concentration_diagnostic(7, 0.0, 500, rng, MeansSource::sphere).fraction == 1.0);
  CHECK_THROWS(concentration_diagnostic(0, 0.1, 10, rng));
  CHECK_THROWS(concentration_diagnostic(2, -0.1, 10, rng));
}

TEST_CASE("dependence score") {
  const std::vector<std::vector<double>> a{{1, 5}, {2, 5}, {3, 5}, {4, 5}};
  const std::vector<std::vector<double>> lin{{-2, 1}, {-4, 2}, {-6, 3}, {-8, 4}};
  // First coordinate: r = -1. Second: constant in a, contributes 0.
  CHECK(dependence_score(a, lin) == doctest::Approx(0.5).epsilon(1e-15));
  const std::vector<std::vector<double>> x{{1}, {2}, {3}, {4}}, y{{1}, {3}, {2}, {4}};
  // Hand value: sxy = 4, sxx = syy = 5.
  CHECK(dependence_score(x, y) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS(dependence_score(x, {{1}}));
  CHECK_THROWS(dependence_score({{1}}, {{1}}));
}

TEST_CASE("information link through the sampler") {
  const auto sched = diffusion::schedule_linear(20, 1e-3, 0.2);
  diffusion::DenoiserConfig c;
  c.hidden = 8;
  c.time_embedding = 8;
  c.condition_embedding = 2;
  Rng init(10);
  diffusion::DenoiserNet net(c, sched, init);
  // Zero residual: the clean prediction is alpha_t z_t, so deterministic sampling is linear in z_T.
  for (auto& [name, entry] : net.params().entries())
    if (name.rfind("base.l", 0) == 0) std::fill(entry.tensor.data.begin(), entry.tensor.data.end(), 0.0);
  diffusion::SamplerConfig s;
  s.steps = 20;
  s.eta = 0.0;
  Rng rng(11);
  const auto det = info_link_diagnostic(net, sched, s, 400, 0, rng);
  CHECK(det.n == 400);
  CHECK(det.threshold == doctest::Approx(0.15));
  CHECK(det.score == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(det.shuffled_score < det.threshold);
  s.eta = 1.0;
  const auto sto = info_link_diagnostic(net, sched, s, 400, 0, rng);
  CHECK(sto.score < det.score);
  CHECK_THROWS(info_link_diagnostic(net, sched, s, 1, 0, rng));
}
