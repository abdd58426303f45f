// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "hero/diffusion/dataset.hpp"
#include "hero/diffusion/denoiser.hpp"
#include "hero/diffusion/pretrain.hpp"
#include "hero/diffusion/sampler.hpp"
#include "hero/diffusion/schedule.hpp"

using namespace hero;
using namespace hero::diffusion;

namespace {

DenoiserConfig tiny_config(std::size_t dim = 2, int labels = 1) {
  DenoiserConfig c;
  c.dim = dim;
  c.hidden = 16;
  c.time_embedding = 8;
  c.condition_embedding = 4;
  c.num_labels = labels;
  c.lora_rank = 2;
  return c;
}

// A net whose clean-sample prediction is identically zero.
DenoiserNet zero_net(const NoiseSchedule& sched) {
  auto cfg = tiny_config();
  cfg.skip_connection = false;
  Rng rng(0);
  DenoiserNet net(cfg, sched, rng);
  for (auto& [name, entry] : net.params().entries()) {
    if (name.rfind("base.l", 0) == 0) std::fill(entry.tensor.data.begin(), entry.tensor.data.end(), 0.0);
  }
  return net;
}

}  // namespace

TEST_CASE("single-step schedule closed form") {
  const auto s = schedule_linear(1, 0.5, 0.5);
  CHECK(s.alpha_bar[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.alpha(1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(s.sigma(1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("schedule invariants hold for several ramps") {
  for (auto [bmin, bmax] : {std::pair{1e-4, 0.02}, std::pair{1e-3, 0.2}, std::pair{0.1, 0.1}}) {
    const auto s = schedule_linear(50, bmin, bmax);
    CHECK(s.alpha(0) == 1.0);
    CHECK(s.sigma(0) == 0.0);
    for (int t = 0; t <= 50; ++t) {
      CHECK(std::abs(s.alpha(t) * s.alpha(t) + s.sigma(t) * s.sigma(t) - 1.0) < 1e-12);
      if (t > 0) CHECK(s.alpha(t) < s.alpha(t - 1));
    }
    CHECK(s.betas[1] == doctest::Approx(bmin));
    CHECK(s.betas[50] == doctest::Approx(bmax));
  }
}

TEST_CASE("alpha_bar at T=50 matches an independent product") {
  const auto s = schedule_linear(50, 1e-4, 0.02);
  double prod = 1.0;
  for (int k = 0; k < 50; ++k) prod *= 1.0 - (1e-4 + (0.02 - 1e-4) * k / 49.0);
  CHECK(s.alpha_bar[50] == doctest::Approx(prod).epsilon(1e-13));
}

TEST_CASE("schedule rejects invalid ranges") {
  CHECK_THROWS_AS(schedule_linear(0, 1e-4, 0.02), std::invalid_argument);
  CHECK_THROWS_AS(schedule_linear(10, 0.0, 0.02), std::invalid_argument);
  CHECK_THROWS_AS(schedule_linear(10, 0.03, 0.02), std::invalid_argument);
  CHECK_THROWS_AS(schedule_linear(10, 1e-4, 1.0), std::invalid_argument);
}

TEST_CASE("forward noise") {
  const auto s = schedule_linear(50, 1e-4, 0.02);
  const std::vector<double> z0{0.3, -1.2}, eps{0.7, 0.1}, zero{0.0, 0.0};
  SUBCASE("eps = 0 scales z0") {
    const auto z = forward_noise(z0, 10, zero, s);
    CHECK(z[0] == s.alpha(10) * 0.3);
    CHECK(z[1] == s.alpha(10) * -1.2);
  }
  SUBCASE("t = 25 against the schedule table") {
    double ab = 1.0;
    for (int k = 0; k < 25; ++k) ab *= 1.0 - (1e-4 + (0.02 - 1e-4) * k / 49.0);
    const auto z = forward_noise(z0, 25, eps, s);
    CHECK(z[0] == doctest::Approx(std::sqrt(ab) * 0.3 + std::sqrt(1 - ab) * 0.7).epsilon(1e-13));
    CHECK(z[1] == doctest::Approx(std::sqrt(ab) * -1.2 + std::sqrt(1 - ab) * 0.1).epsilon(1e-13));
  }
  SUBCASE("negligible noise returns z0") {
    const auto tiny = schedule_linear(1, 1e-300, 1e-300);
    const auto z = forward_noise(z0, 1, eps, tiny);
    CHECK(z[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(z[1] == doctest::Approx(-1.2).epsilon(1e-12));
  }
  CHECK_THROWS(forward_noise(z0, 0, eps, s));
  CHECK_THROWS(forward_noise(z0, 51, eps, s));
}

TEST_CASE("eight gaussians dataset") {
  Rng rng(1);
  DatasetSpec spec;
  spec.size = 4000;
  const auto ds = make_dataset(spec, rng);
  CHECK(ds.dim == 2);
  CHECK(ds.size() == 4000);
  const auto modes = eight_gaussians_modes(2.0);
  CHECK(modes[0][0] == doctest::Approx(2.0));
  CHECK(modes[2][1] == doctest::Approx(2.0));
  std::vector<int> counts(8, 0);
  for (const auto& z : ds.samples) {
    int nearest = 0;
    double best = 1e9;
    for (int k = 0; k < 8; ++k) {
      const double d = std::hypot(z[0] - modes[k][0], z[1] - modes[k][1]);
      if (d < best) best = d, nearest = k;
    }
    CHECK(best < 0.6);  // 6 standard deviations
    ++counts[nearest];
  }
  for (int c : counts) CHECK(std::abs(c - 500) < 4 * std::sqrt(500.0));
  for (int l : ds.labels) CHECK(l == 0);
}

TEST_CASE("checker dataset stays on dark cells") {
  Rng rng(2);
  DatasetSpec spec;
  spec.name = "checker-2d";
  spec.size = 2000;
  const auto ds = make_dataset(spec, rng);
  const double cell = 2.0 * spec.extent / spec.cells;
  for (const auto& z : ds.samples) {
    REQUIRE(z.size() == 2);
    const int c = static_cast<int>(std::floor((z[0] + spec.extent) / cell));
    const int r = static_cast<int>(std::floor((z[1] + spec.extent) / cell));
    CHECK((r + c) % 2 == 0);
  }
}

TEST_CASE("shapes dataset draws the labelled shape") {
  Rng rng(3);
  DatasetSpec spec;
  spec.name = "shapes-8x8";
  spec.size = 300;
  const auto ds = make_dataset(spec, rng);
  CHECK(ds.dim == 64);
  CHECK(ds.num_labels == 3);
  const int lit_by_label[] = {9, 4, 4};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    int lit = 0;
    for (double p : ds.samples[i]) {
      CHECK((p == 1.0 || p == -1.0));
      lit += p > 0;
    }
    REQUIRE(ds.labels[i] >= 0);
    REQUIRE(ds.labels[i] < 3);
    CHECK(lit == lit_by_label[ds.labels[i]]);
  }
  CHECK_THROWS(dataset_dim("mnist"));
}

TEST_CASE("time embedding is sinusoidal") {
  const int ts[] = {0, 7};
  const auto e = time_embedding(ts, 8);
  CHECK(e.shape == ad::Shape{2, 8});
  CHECK(e.at(0, 0) == 0.0);
  CHECK(e.at(0, 4) == 1.0);
  CHECK(e.at(1, 0) == doctest::Approx(std::sin(7.0)));
  CHECK(e.at(1, 5) == doctest::Approx(std::cos(7.0 * std::exp(-std::log(10000.0) / 4))));
}

TEST_CASE("zero-initialised adapters reproduce the base output bit for bit") {
  const auto sched = schedule_linear(50, 1e-3, 0.2);
  Rng rng(4);
  DenoiserNet net(tiny_config(2, 3), sched, rng);
  const std::vector<std::vector<double>> z{{0.3, -0.1}, {1.5, 2.0}, {-0.7, 0.0}};
  const int ts[] = {1, 25, 50};
  const int cs[] = {0, 2, 3};
  net.prepare_pretraining();
  const auto base = net.predict_rows(z, ts, cs);
  net.prepare_finetuning();
  CHECK(net.adapters_enabled());
  const auto adapted = net.predict_rows(z, ts, cs);
  CHECK(base == adapted);
  for (const auto& [name, entry] : net.params().entries()) {
    CHECK(entry.trainable == (name.rfind("lora.", 0) == 0));
  }
}

TEST_CASE("denoiser validates its inputs") {
  const auto sched = schedule_linear(10, 1e-3, 0.2);
  Rng rng(5);
  DenoiserNet net(tiny_config(), sched, rng);
  const std::vector<std::vector<double>> z{{0.0, 0.0}};
  const int bad_t[] = {11};
  const int ok_t[] = {3};
  const int bad_c[] = {2};
  const int ok_c[] = {0};
  CHECK_THROWS_AS(net.predict_rows(z, bad_t, ok_c), std::invalid_argument);
  CHECK_THROWS_AS(net.predict_rows(z, ok_t, bad_c), std::invalid_argument);
  const int null_c[] = {1};
  CHECK(net.null_condition() == 1);
  CHECK_NOTHROW(net.predict_rows(z, ok_t, null_c));
  CHECK_THROWS(DenoiserNet(DenoiserConfig{.dim = 0}, sched, rng));
}

TEST_CASE("step grid") {
  CHECK(step_grid(50, 50).front() == 50);
  CHECK(step_grid(50, 50).back() == 0);
  CHECK(step_grid(50, 50).size() == 51);
  CHECK(step_grid(50, 1) == std::vector<int>{50, 0});
  CHECK(step_grid(50, 4) == std::vector<int>{50, 38, 25, 13, 0});
  CHECK_THROWS(step_grid(50, 0));
  CHECK_THROWS(step_grid(50, 51));
}

TEST_CASE("ancestral step with a zero predictor matches the closed-form posterior") {
  const auto s = schedule_linear(50, 1e-3, 0.2);
  const auto net = zero_net(s);
  SamplerConfig cfg;
  cfg.eta = 1.0;
  for (int t : {50, 20, 2, 1}) {
    CAPTURE(t);
    const double ab_t = s.alpha_bar[t], ab_p = s.alpha_bar[t - 1], beta = s.betas[t];
    // Posterior q(z_{t-1} | z_t, z0 = 0) of the forward chain.
    const double mean_coef = std::sqrt(1.0 - beta) * (1.0 - ab_p) / (1.0 - ab_t);
    const double var = (1.0 - ab_p) / (1.0 - ab_t) * beta;
    const std::vector<double> z{0.8, -1.9};
    Rng rng(6);
    const auto r = ddim_step(net, s, z, t, t - 1, 0, cfg, rng);
    CHECK(r.mean[0] == doctest::Approx(mean_coef * 0.8).epsilon(1e-12));
    CHECK(r.mean[1] == doctest::Approx(mean_coef * -1.9).epsilon(1e-12));
    CHECK(r.std == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  }
}

TEST_CASE("eta = 0 is deterministic") {
  const auto s = schedule_linear(50, 1e-3, 0.2);
  Rng rng(7);
  DenoiserNet net(tiny_config(), s, rng);
  SamplerConfig cfg;
  cfg.eta = 0.0;
  Rng a(1), b(2);
  const std::vector<double> z{0.5, 0.5};
  const auto ra = ddim_step(net, s, z, 30, 29, 0, cfg, a);
  const auto rb = ddim_step(net, s, z, 30, 29, 0, cfg, b);
  CHECK(ra.std == 0.0);
  CHECK(ra.z_prev == ra.mean);
  CHECK(ra.z_prev == rb.z_prev);
}

TEST_CASE("guidance weight is ignored when guidance is off") {
  const auto s = schedule_linear(50, 1e-3, 0.2);
  Rng rng(8);
  DenoiserNet net(tiny_config(2, 2), s, rng);
  SamplerConfig a, b;
  a.guidance_weight = 1.0;
  b.guidance_weight = 7.5;
  Rng ra(3), rb(3);
  const std::vector<double> z{0.1, -0.4};
  CHECK(ddim_step(net, s, z, 10, 5, 1, a, ra).z_prev == ddim_step(net, s, z, 10, 5, 1, b, rb).z_prev);
}

TEST_CASE("guidance combines conditional and null predictions") {
  const auto s = schedule_linear(50, 1e-3, 0.2);
  Rng rng(9);
  DenoiserNet net(tiny_config(2, 2), s, rng);
  const std::vector<std::vector<double>> z{{0.2, 0.9}};
  const int ts[] = {12};
  const int cond[] = {1};
  const int null_c[] = {2};
  const auto xc = net.predict_rows(z, ts, cond)[0];
  const auto xn = net.predict_rows(z, ts, null_c)[0];
  SamplerConfig cfg;
  cfg.guidance = true;
  cfg.guidance_weight = 5.0;
  ad::Tape tape;
  const auto zin = tape.constant(rows_to_tensor(z, 2));
  const auto& g = tape.value(predict_clean(tape, net, net.params(), zin, ts, cond, cfg));
  for (int j = 0; j < 2; ++j) CHECK(g.data[j] == doctest::Approx(6.0 * xc[j] - 5.0 * xn[j]).epsilon(1e-12));
}

TEST_CASE("predicted clean samples are clamped") {
  const auto s = schedule_linear(50, 1e-3, 0.2);
  auto net = zero_net(s);
  net.params().at("base.l2.b").data = {100.0, -100.0};
  SamplerConfig cfg;
  const auto coef = ddim_coefficients(s, 40, 39, cfg.eta);
  const std::vector<double> z{0.5, 0.5};
  Rng rng(1);
  const auto r = ddim_step(net, s, z, 40, 39, 0, cfg, rng);
  CHECK(r.mean[0] == doctest::Approx(coef.x0_coef * 4.0 + coef.z_coef * 0.5));
  CHECK(r.mean[1] == doctest::Approx(coef.x0_coef * -4.0 + coef.z_coef * 0.5));
}

TEST_CASE("trajectory recording") {
  const auto s = schedule_linear(50, 1e-3, 0.2);
  Rng init(10);
  DenoiserNet net(tiny_config(), s, init);
  SamplerConfig cfg;
  const std::vector<double> zT{0.3, -0.8};
  SUBCASE("one step gives two states") {
    cfg.steps = 1;
    Rng rng(1);
    const auto tr = sample_trajectory(net, s, zT, 0, cfg, rng);
    CHECK(tr.states.size() == 2);
    CHECK(tr.transitions() == 1);
  }
  SUBCASE("full trajectory invariants") {
    Rng rng(1);
    const auto tr = sample_trajectory(net, s, zT, 0, cfg, rng);
    CHECK(tr.states.size() == 51);
    CHECK(tr.states.front() == zT);
    CHECK(tr.z_T == zT);
    CHECK(tr.timesteps == step_grid(50, 50));
    for (std::size_t k = 0; k < tr.transitions(); ++k) {
      if (k + 1 < tr.transitions()) CHECK(tr.stds[k] > 0.0);
      if (tr.stds[k] > 0.0) CHECK(std::isfinite(transition_logprob(tr.means[k], tr.stds[k], tr.states[k + 1])));
    }
  }
  SUBCASE("same seed, same trajectory; batched equals single") {
    Rng a(5), b(5);
    const auto ta = sample_trajectory(net, s, zT, 0, cfg, a);
    const auto tb = sample_trajectories(net, s, {zT}, 0, cfg, b);
    CHECK(ta.states == tb.front().states);
    CHECK(ta.means == tb.front().means);
  }
  CHECK_THROWS(sample_trajectory(net, s, std::vector<double>{1.0}, 0, cfg, init));
}

TEST_CASE("transition log-probability") {
  const double l2pi = std::log(2.0 * std::numbers::pi);
  CHECK(transition_logprob(std::vector<double>{0.0}, 1.0, std::vector<double>{0.0}) ==
        doctest::Approx(-0.9189385332046727).epsilon(1e-15));
  CHECK(transition_logprob(std::vector<double>{1, 1}, 2.0, std::vector<double>{1, 1}) ==
        doctest::Approx(-2.0 * std::log(2.0 * std::sqrt(2.0 * std::numbers::pi))).epsilon(1e-15));
  CHECK(transition_logprob(std::vector<double>{0, 0}, 1.0, std::vector<double>{1, 0}) ==
        doctest::Approx(-l2pi - 0.5).epsilon(1e-15));
  CHECK_THROWS(transition_logprob(std::vector<double>{0}, 0.0, std::vector<double>{0}));
  CHECK_THROWS(transition_logprob(std::vector<double>{0}, -1.0, std::vector<double>{0}));
  CHECK_THROWS(transition_logprob(std::vector<double>{0, 1}, 1.0, std::vector<double>{0}));
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto mu = rng.normal_vector(3), z = rng.normal_vector(3);
    const double s = 0.1 + rng.uniform();
    CHECK(transition_logprob(mu, s, mu) >= transition_logprob(mu, s, z));
  }
}

TEST_CASE("pretraining lowers the loss") {
  const auto s = schedule_linear(20, 1e-3, 0.2);
  Rng rng(12);
  DatasetSpec spec;
  spec.size = 2048;
  const auto data = make_dataset(spec, rng);
  DenoiserNet net(tiny_config(), s, rng);
  PretrainConfig cfg;
  cfg.epochs = 8;
  cfg.batch = 64;
  const auto r = pretrain(net, s, data, cfg, rng);
  REQUIRE(r.loss_history.size() == 8 * 32);
  auto window_mean = [&](std::size_t from) {
    double m = 0.0;
    for (std::size_t i = from; i < from + 32; ++i) m += r.loss_history[i];
    return m / 32.0;
  };
  CHECK(window_mean(r.loss_history.size() - 32) < window_mean(0));
}

TEST_CASE("pretraining on a single point pulls low-noise predictions onto it") {
  const auto s = schedule_linear(20, 1e-3, 0.2);
  Rng rng(13);
  ToyDataset data;
  data.dim = 2;
  data.samples.assign(512, {1.0, -0.5});
  data.labels.assign(512, 0);
  DenoiserNet net(tiny_config(), s, rng);
  PretrainConfig cfg;
  cfg.epochs = 600;
  cfg.batch = 64;
  cfg.lr = 5e-3;
  pretrain(net, s, data, cfg, rng);
  const std::vector<std::vector<double>> z{{1.05, -0.45}, {0.9, -0.6}};
  const int ts[] = {2, 2};
  const int cs[] = {0, 0};
  // Inputs sit 0.07 and 0.14 away; the prediction must land much closer.
  for (const auto& p : net.predict_rows(z, ts, cs)) CHECK(std::hypot(p[0] - 1.0, p[1] + 0.5) < 0.02);
}

TEST_CASE("full condition dropout leaves the label rows untouched") {
  const auto s = schedule_linear(20, 1e-3, 0.2);
  Rng rng(14);
  DatasetSpec spec;
  spec.name = "shapes-8x8";
  spec.size = 64;
  const auto data = make_dataset(spec, rng);
  DenoiserNet net(tiny_config(64, 3), s, rng);
  const auto before = net.params().at("base.cond_emb").data;
  PretrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch = 16;
  cfg.cond_dropout = 1.0;
  pretrain(net, s, data, cfg, rng);
  const auto& after = net.params().at("base.cond_emb").data;
  const std::size_t width = 4;
  for (std::size_t i = 0; i < 3 * width; ++i) CHECK(after[i] == before[i]);
  bool null_row_moved = false;
  for (std::size_t i = 3 * width; i < 4 * width; ++i) null_row_moved |= after[i] != before[i];
  CHECK(null_row_moved);
}

TEST_CASE("loss weighting") {
  const auto s = schedule_linear(50, 1e-3, 0.2);
  CHECK(loss_weight(s, 50, 1.0) == 1.0);
  CHECK(loss_weight(s, 1, 50.0) == 50.0);
  CHECK(loss_weight(s, 30, 50.0) == doctest::Approx(1.0 / (s.sigma(30) * s.sigma(30))));
  Rng rng(15);
  DenoiserNet net(tiny_config(), s, rng);
  ad::Tape tape;
  const std::vector<std::vector<double>> z0{{1.0, 0.0}, {0.0, 1.0}}, eps{{0.1, 0.2}, {0.3, -0.1}};
  const int ts[] = {3, 40};
  const int cs[] = {0, 0};
  const double ones[] = {1.0, 1.0};
  const double plain = tape.value(denoising_loss(tape, net, s, z0, ts, eps, cs)).item();
  const double weighted = tape.value(denoising_loss(tape, net, s, z0, ts, eps, cs, ones)).item();
  CHECK(weighted == doctest::Approx(plain).epsilon(1e-14));
  CHECK_THROWS(pretrain(net, s, ToyDataset{}, PretrainConfig{}, rng));
}
