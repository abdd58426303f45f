// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "hero/feedback/log.hpp"
#include "hero/run/checkpoint.hpp"
#include "hero/run/config.hpp"
#include "hero/run/eval.hpp"
#include "hero/run/metrics.hpp"
#include "hero/run/service.hpp"
#include "hero/run/train.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace hero;
using namespace hero::run;
namespace fs = std::filesystem;

namespace {

RunConfig quick_run(const fs::path& run_dir, std::uint64_t seed = 0) {
  RunConfig c;
  c.base_checkpoint = test::cached_base(test::small_base_config());
  c.run_dir = run_dir;
  c.seed = seed;
  c.batch = 16;
  c.budget = 64;
  c.embedding.train.steps = 20;
  c.embedding.train.pair_batch = 32;
  c.ddpo.inner_epochs = 1;
  c.final_eval_n = 50;
  return c;
}

std::string lines_of(const fs::path& file) {
  std::ifstream in(file);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("run config defaults survive a JSON round trip") {
  RunConfig c;
  c.base_checkpoint = "/tmp/base";
  c.stop_success = 0.8;
  c.eval_oracle = feedback::oracle_preset("mode3");
  const auto back = run_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.sampler.steps == c.sampler.steps);
  CHECK(back.ddpo.clip == c.ddpo.clip);
  CHECK(back.stop_success == 0.8);
  CHECK(back.eval_oracle->center == c.eval_oracle->center);

  BaseConfig b;
  b.dataset.name = "shapes-8x8";
  const auto bb = base_config_from_json(to_json(b));
  CHECK(bb.denoiser.dim == 64);
  CHECK(bb.denoiser.num_labels == 3);
  CHECK(bb.pretrain.max_weight == b.pretrain.max_weight);
}

TEST_CASE("partial sections override only what they name") {
  const auto c = run_config_from_json(R"({"sampler": {"eta": 1.0}, "ddpo": {"lr": 0.5}, "pi_hero": {"beta": 1.0}})");
  const RunConfig d;
  CHECK(c.sampler.eta == 1.0);
  CHECK(c.sampler.steps == d.sampler.steps);
  CHECK(c.ddpo.lr == 0.5);
  CHECK(c.ddpo.clip == d.ddpo.clip);
  CHECK(c.ddpo.inner_epochs == d.ddpo.inner_epochs);
  CHECK(c.pi_hero.beta == 1.0);
  CHECK(c.pi_hero.eps2 == d.pi_hero.eps2);
  const auto e = run_config_from_json(R"({"embedding": {"train": {"steps": 7}}})");
  CHECK(e.embedding.train.steps == 7);
  CHECK(e.embedding.train.lr == d.embedding.train.lr);
  const auto b = base_config_from_json(R"({"pretrain": {"epochs": 3}})");
  CHECK(b.pretrain.epochs == 3);
  CHECK(b.pretrain.batch == diffusion::PretrainConfig{}.batch);
}

TEST_CASE("config documents are checked") {
  CHECK_THROWS_AS(run_config_from_json(R"({"bugdet": 512})"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(R"({"ddpo": {"clipp": 0.1}})"), std::invalid_argument);
  CHECK_THROWS_AS(base_config_from_json(R"({"pretrain": {"epoch": 3}})"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(R"({"batch": 1})"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(R"({"budget": 32, "batch": 64})"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(R"({"pi_hero": {"beta": 1.5}})"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(R"({"feedback": {"source": "pigeon"}})"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(R"({"ddpo": {"clip": 0}})"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(R"({"preset": "huge"})"), std::invalid_argument);
  CHECK_THROWS_AS(base_config_from_json(R"({"dataset": {"name": "mnist"}})"), std::invalid_argument);
  CHECK_THROWS(run_config_from_json("[1, 2]"));
}

TEST_CASE("presets and oracle shorthands") {
  const auto large = run_config_from_json(R"({"preset": "large", "seed": 4})");
  CHECK(large.budget == 1152);
  CHECK(large.batch == 128);
  CHECK(large.seed == 4);
  CHECK(run_preset("default").budget == 512);
  CHECK(run_preset("default").batch == 64);
  const auto o = run_config_from_json(R"({"feedback": {"oracle": "mode2"}, "eval_oracle": null})");
  CHECK(o.feedback.oracle == feedback::oracle_preset("mode2"));
  CHECK_FALSE(o.eval_oracle.has_value());
  const auto custom = run_config_from_json(R"({"feedback": {"oracle": {"kind": "region-2d", "center": [0, 0], "radius": 1}}})");
  CHECK(custom.feedback.oracle.kind == feedback::OracleKind::region2d);
  CHECK(custom.feedback.oracle.radius == 1.0);
}

TEST_CASE("atomic file writes") {
  const auto dir = test::scratch_dir("atomic");
  write_file_atomic(dir / "a.txt", "one");
  write_file_atomic(dir / "a.txt", "two");
  CHECK(read_file(dir / "a.txt") == "two");
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  CHECK_THROWS(read_file(dir / "missing.txt"));
}

TEST_CASE("metrics rows round trip") {
  const auto dir = test::scratch_dir("metrics");
  const auto file = dir / kMetricsFileName;
  CHECK(load_metrics(file).empty());
  EpochMetrics a{0, 64, 9, 9.0 / 64.0, 0.3, 1.0, -0.75, 1.0, 1e-17, -2.5, 0.125, 1.0000001, 0.04};
  EpochMetrics b{1, 128, 0, 0.0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  b.mean_reward = b.best_reward = b.min_reward = b.max_reward = b.mean_advantage = b.ddpo_loss = b.clip_fraction = b.mean_ratio = b.embed_loss =
      std::numeric_limits<double>::quiet_NaN();
  append_metrics(file, a);
  append_metrics(file, b);
  CHECK(lines_of(file).rfind(std::string(kMetricsHeader) + "\n", 0) == 0);
  const auto rows = load_metrics(file);
  REQUIRE(rows.size() == 2);
  CHECK(to_csv_row(rows[0]) == to_csv_row(a));
  CHECK(rows[0].success_rate == a.success_rate);
  CHECK(rows[0].mean_ratio == a.mean_ratio);
  CHECK(rows[0].min_reward == -0.75);
  CHECK(std::isnan(rows[1].ddpo_loss));
  CHECK(rows[1].n_fb == 128);
  truncate_metrics(file, 1);
  CHECK(load_metrics(file).size() == 1);
  std::ofstream(file, std::ios::app) << "1,2,3\n";
  CHECK_THROWS(load_metrics(file));
  std::ofstream(file) << "wrong,header\n";
  CHECK_THROWS(load_metrics(file));
}

TEST_CASE("checkpoint round trip") {
  const auto dir = test::scratch_dir("checkpoint");
  CHECK_FALSE(has_checkpoint(dir));
  RunCheckpoint ck;
  ck.state = {3, 192, feedback::Phase::sampling, {0.1, 1.0 / 3.0, 0.5}, 3};
  ck.pi.first_iteration = false;
  ck.pi.best = std::vector<double>{0.1, -0.2};
  ck.pi.goods = {{1.0 / 7.0, 2.0}, {3.0, 4.0}};
  ck.pi.beta = 0.25;
  ck.adapters.add("lora.l0.a", ad::Tensor::matrix(1, 2, {1e-300, -0.5}), false);
  ck.embedding.add("embed.l0.w", ad::Tensor::matrix(2, 1, {std::acos(-1.0), 2.0}), false);
  ck.head.add("proj.b", ad::Tensor::vector({0.25}), false);
  ck.ddpo_adam.step = 7;
  ck.ddpo_adam.config.lr = 1e-3;
  ck.ddpo_adam.m["lora.l0.a"] = {0.1, 0.2};
  ck.ddpo_adam.v["lora.l0.a"] = {0.3, 0.4};
  Rng rng(99);
  rng.normal();
  ck.rng = rng.serialize();
  save_checkpoint(ck, dir);
  CHECK(has_checkpoint(dir));
  const auto back = load_checkpoint(dir);
  CHECK(back.format_version == kCheckpointFormat);
  CHECK(back.state == ck.state);
  CHECK(back.pi == ck.pi);
  CHECK(back.adapters.at("lora.l0.a").data == ck.adapters.at("lora.l0.a").data);
  CHECK(back.embedding.at("embed.l0.w").data == ck.embedding.at("embed.l0.w").data);
  CHECK(back.head.at("proj.b").shape == ad::Shape{1});
  CHECK(back.ddpo_adam.step == 7);
  CHECK(back.ddpo_adam.m == ck.ddpo_adam.m);
  CHECK(back.ddpo_adam.v == ck.ddpo_adam.v);
  auto r1 = Rng::deserialize(back.rng);
  CHECK(r1.normal() == rng.normal());

  auto doc = nlohmann::json::parse(read_file(dir / kCheckpointFileName));
  doc["format_version"] = 99;
  write_file_atomic(dir / kCheckpointFileName, doc.dump());
  CHECK_THROWS(load_checkpoint(dir));
}

TEST_CASE("base checkpoints reproduce the network bit for bit") {
  auto cfg = test::small_base_config();
  cfg.pretrain.epochs = 1;
  cfg.dataset.size = 256;
  const auto model = pretrain_base(cfg);
  const auto dir = test::scratch_dir("base");
  const auto file = save_base(model, dir);
  CHECK(file == dir / kBaseFileName);
  for (const auto& loaded : {load_base(dir), load_base(file)}) {
    CHECK(to_json(loaded.config) == to_json(model.config));
    CHECK(loaded.schedule.alpha_bar == model.schedule.alpha_bar);
    for (const auto& [name, entry] : model.net.params().entries())
      CHECK(loaded.net.params().at(name).data == entry.tensor.data);
    const std::vector<std::vector<double>> z{{0.3, -1.1}};
    const int ts[] = {7};
    const int cs[] = {0};
    CHECK(loaded.net.predict_rows(z, ts, cs) == model.net.predict_rows(z, ts, cs));
  }
  CHECK_THROWS(load_base(dir / "nothing"));
}

TEST_CASE("the budget fixes the number of epochs") {
  const auto dir = test::scratch_dir("budget");
  auto c = quick_run(dir);
  c.budget = 100;  // room for six batches of 16, not seven
  const auto r = hero_train(c);
  CHECK_FALSE(r.interrupted);
  CHECK(r.state.epoch == 6);
  CHECK(r.state.n_fb == 96);
  CHECK(r.state.phase == feedback::Phase::done);
  CHECK(feedback::load_feedback(dir).size() == 6);
  CHECK(r.metrics.size() == 6);
  CHECK(r.state.success_history.size() == 6);
  for (std::size_t i = 0; i < r.metrics.size(); ++i) {
    CHECK(r.metrics[i].epoch == static_cast<int>(i));
    CHECK(r.metrics[i].n_fb == static_cast<long>(16 * (i + 1)));
  }
  for (const auto& m : r.metrics)
    if (m.n_good > 0) {
      CHECK(m.best_reward == 1.0);
      CHECK(m.min_reward >= -1.0);
      CHECK(m.max_reward == 1.0);
    }
  CHECK(r.final_success.has_value());
  const auto final_doc = nlohmann::json::parse(read_file(dir / "final.json"));
  CHECK(final_doc.at("success").get<double>() == *r.final_success);
  CHECK(fs::exists(dir / kConfigFileName));
}

TEST_CASE("epochs without good samples still spend budget") {
  const auto dir = test::scratch_dir("all_bad");
  auto c = quick_run(dir);
  c.feedback.oracle = feedback::oracle_preset("mode0");
  c.feedback.oracle.center = {50.0, 50.0};  // unreachable
  const auto base_adapters = load_base(c.base_checkpoint).net.params().frozen_copy();
  const auto r = hero_train(c);
  CHECK(r.state.epoch == 4);
  CHECK(r.state.n_fb == 64);
  const auto log = feedback::load_feedback(dir);
  REQUIRE(log.size() == 4);
  for (const auto& e : log) {
    CHECK_FALSE(e.best.has_value());
    CHECK(e.records.size() == 16);
  }
  CHECK(r.pi.first_iteration);
  for (const auto& m : r.metrics) {
    CHECK(m.n_good == 0);
    CHECK(std::isnan(m.ddpo_loss));
    CHECK(std::isnan(m.best_reward));
  }
  CHECK(*r.final_success == 0.0);
  const auto ck = load_checkpoint(dir);
  for (const auto& [name, entry] : ck.adapters.entries()) CHECK(entry.tensor.data == base_adapters.at(name).data);
}

TEST_CASE("an interrupted run resumes onto the uninterrupted trajectory") {
  const auto straight = test::scratch_dir("straight");
  const auto split = test::scratch_dir("split");
  const auto full = hero_train(quick_run(straight, 5));

  TrainOptions first;
  first.max_epochs = 2;
  const auto part = hero_train(quick_run(split, 5), first);
  CHECK(part.interrupted);
  CHECK(part.state.epoch == 2);
  CHECK_FALSE(part.final_success.has_value());

  // Simulate a crash after logging epoch 2 but before its checkpoint.
  auto log = feedback::load_feedback(split);
  feedback::log_feedback(log.back(), split);
  append_metrics(split / kMetricsFileName, part.metrics.back());

  const auto rest = hero_train(quick_run(split, 5));
  CHECK(rest.state == full.state);
  CHECK(rest.pi == full.pi);
  CHECK(rest.final_success == full.final_success);
  CHECK(lines_of(split / kMetricsFileName) == lines_of(straight / kMetricsFileName));
  const auto a = feedback::load_feedback(straight), b = feedback::load_feedback(split);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].records == b[i].records);
    CHECK(a[i].best == b[i].best);
  }
  const auto ca = load_checkpoint(straight), cb = load_checkpoint(split);
  for (const auto& [name, entry] : ca.adapters.entries()) CHECK(cb.adapters.at(name).data == entry.tensor.data);
  CHECK(ca.rng == cb.rng);

  // A finished run is left alone.
  const auto again = hero_train(quick_run(split, 5));
  CHECK(again.state == full.state);
  CHECK(feedback::load_feedback(split).size() == a.size());
}

TEST_CASE("replaying the logs reconstructs the run state") {
  const auto dir = test::scratch_dir("replay");
  const auto c = quick_run(dir, 2);
  TrainOptions opt;
  opt.max_epochs = 3;
  hero_train(c, opt);
  auto replayed = replay_run(c, dir);
  auto ck = load_checkpoint(dir);
  CHECK(replayed.state == ck.state);
  CHECK(replayed.pi == ck.pi);
  hero_train(c);
  replayed = replay_run(c, dir);
  ck = load_checkpoint(dir);
  CHECK(replayed.state == ck.state);
  CHECK(replayed.pi == ck.pi);
  CHECK(replayed.state.phase == feedback::Phase::done);
}

TEST_CASE("finished runs load, sample and evaluate deterministically") {
  const auto dir = test::scratch_dir("finished");
  const auto c = quick_run(dir, 1);
  const auto r = hero_train(c);
  const auto model = load_run(dir);
  CHECK(model.state == r.state);
  CHECK(model.pi == r.pi);
  CHECK(model.base.net.adapters_enabled());

  const auto s1 = generate_final(dir, 20, true, 11), s2 = generate_final(dir, 20, true, 11);
  CHECK(s1.z_0 == s2.z_0);
  CHECK(s1.z_T.size() == 20);
  CHECK(s1.prior == "refined");
  CHECK(generate_final(dir, 20, false, 11).prior == "standard");

  // The run's own final evaluation is reproduced by evaluate with the same stream.
  const auto rep = evaluate(dir, c.feedback.oracle, static_cast<std::size_t>(c.final_eval_n));
  CHECK(rep.source == "run");
  CHECK(rep.success == *r.final_success);
  CHECK(rep.standard_error == doctest::Approx(std::sqrt(rep.success * (1 - rep.success) / 50)));
  const auto base_rep = evaluate(c.base_checkpoint, c.feedback.oracle, 50, 3);
  CHECK(base_rep.source == "base");
  CHECK_THROWS(evaluate(dir, c.feedback.oracle, 0));

  const auto out = dir / "samples.json";
  write_samples(s1, out);
  const auto doc = nlohmann::json::parse(read_file(out));
  CHECK(doc.at("samples").size() == 20);
}

TEST_CASE("epochs to reach a threshold") {
  CHECK(epochs_to_reach({0.1, 0.4, 0.5, 0.9}, 0.5) == 3);
  CHECK(epochs_to_reach({0.6}, 0.5) == 1);
  CHECK_FALSE(epochs_to_reach({0.1, 0.2}, 0.5).has_value());
  CHECK_FALSE(epochs_to_reach({}, 0.5).has_value());
}

TEST_CASE("ablation grid parsing") {
  RunConfig c;
  c.seed = 9;
  const auto d = parse_grid("", c);
  CHECK(d.variants == std::vector{repr::RewardVariant::best});
  CHECK(d.betas == std::vector{0.5});
  CHECK(d.refined_priors == std::vector{true});
  CHECK(d.seeds == std::vector<std::uint64_t>{9});
  const auto g = parse_grid("variant=best,binary;beta=0.5,1.0;prior=refined,random;seeds=0,1,2", c);
  CHECK(g.variants.size() == 2);
  CHECK(g.betas == std::vector{0.5, 1.0});
  CHECK(g.refined_priors == std::vector{true, false});
  CHECK(g.seeds.size() == 3);
  CHECK_THROWS(parse_grid("variant", c));
  CHECK_THROWS(parse_grid("colour=red", c));
  CHECK_THROWS(parse_grid("beta=2", c));
  CHECK_THROWS(parse_grid("prior=fancy", c));
  CHECK_THROWS(parse_grid("variant=magic", c));
}

TEST_CASE("ablation group statistics") {
  AblationReport rep;
  using V = repr::RewardVariant;
  rep.cells.push_back({V::best, 0.5, true, 0, 0.9, {0.1, 0.3, 0.6, 0.8}});
  rep.cells.push_back({V::best, 0.5, true, 1, 0.7, {0.2, 0.5, 0.4, 0.9}});
  rep.cells.push_back({V::best, 0.5, true, 2, std::nullopt, {0.0, 0.1, 0.2, 0.3}});
  rep.cells.push_back({V::binary, 0.5, true, 0, 0.5, {0.1, 0.1, 0.1, 0.5}});
  const auto groups = rep.groups();
  REQUIRE(groups.size() == 2);
  const auto& g = groups[0];
  CHECK(g.cells.size() == 3);
  // The run without a final evaluation falls back to its last epoch.
  CHECK(g.mean_final == doctest::Approx((0.9 + 0.7 + 0.3) / 3));
  // Epochs 3 and 2 reach 0.5; the third never does and counts as 4 + 1.
  CHECK(g.mean_epochs_to_half == doctest::Approx((3 + 2 + 5) / 3.0));
  auto var = [](double a, double b, double c) {
    const double m = (a + b + c) / 3;
    return ((a - m) * (a - m) + (b - m) * (b - m) + (c - m) * (c - m)) / 2;
  };
  CHECK(g.early_variance == doctest::Approx((var(0.1, 0.2, 0.0) + var(0.3, 0.5, 0.1) + var(0.6, 0.4, 0.2)) / 3));
  CHECK(groups[1].early_variance == 0.0);  // a single seed has no spread
  CHECK(groups[1].mean_epochs_to_half == 4.0);
  const auto doc = nlohmann::json::parse(rep.to_json());
  CHECK(doc.at("groups").size() == 2);
  CHECK(rep.table().find("binary") != std::string::npos);
}

TEST_CASE("ablation cells are trained once and reused") {
  const auto dir = test::scratch_dir("ablate");
  auto c = quick_run(dir);
  c.budget = 32;
  const auto grid = parse_grid("variant=best,binary;seeds=0,1", c);
  const auto rep = ablate(c, grid);
  REQUIRE(rep.cells.size() == 4);
  for (const auto& cell : rep.cells) {
    CHECK(cell.success_history.size() == 2);
    CHECK(cell.final_success.has_value());
  }
  CHECK(fs::exists(dir / "best_beta0.50_refined" / "seed-1" / kCheckpointFileName));
  CHECK(fs::exists(dir / "binary_beta0.50_refined" / "seed-0" / kCheckpointFileName));
  const auto cell_file = dir / "best_beta0.50_refined" / "seed-0" / kCheckpointFileName;
  const auto before = read_file(cell_file);
  const auto again = ablate(c, grid);
  CHECK(read_file(cell_file) == before);
  CHECK(feedback::load_feedback(cell_file.parent_path()).size() == 2);
  CHECK(again.cells[0].success_history == rep.cells[0].success_history);
}

TEST_CASE("feedback service drives a run over HTTP") {
  const auto dir = test::scratch_dir("service");
  auto c = quick_run(dir, 4);
  c.budget = 32;
  c.feedback.source = "service";
  c.eval_oracle.reset();
  CHECK_THROWS_AS(hero_train(c), std::invalid_argument);

  feedback::FeedbackHub hub;
  FeedbackServer server(hub);
  const int port = server.start("127.0.0.1", 0);
  REQUIRE(port > 0);
  TrainOptions opt;
  opt.source = &hub;
  opt.hub = &hub;
  RunResult result;
  std::thread trainer([&] { result = hero_train(c, opt); });

  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(30, 0);
  auto wait_for_batch = [&](int epoch) {
    for (int i = 0; i < 3000; ++i) {
      auto res = client.Get("/api/batch");
      REQUIRE(res);
      if (res->status == 200) {
        const auto doc = nlohmann::json::parse(res->body);
        if (doc.at("epoch") == epoch) return doc;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    FAIL("no batch for epoch " << epoch);
    return nlohmann::json{};
  };
  auto post = [&](const nlohmann::json& body) {
    auto res = client.Post("/api/feedback", body.dump(), "application/json");
    REQUIRE(res);
    return res->status;
  };

  const auto batch0 = wait_for_batch(0);
  REQUIRE(batch0.at("samples").size() == 16);
  CHECK(batch0.at("samples")[0].at("kind") == "points2d");
  const auto status = nlohmann::json::parse(client.Get("/api/status")->body);
  CHECK(status.at("phase") == "awaiting_feedback");
  CHECK(status.at("N_fb") == 32);
  CHECK(status.at("n_fb") == 0);

  auto labels = nlohmann::json::array();
  for (const auto& sample : batch0.at("samples"))
    labels.push_back({{"id", sample.at("id")}, {"good", sample.at("id").get<int>() < 3}});
  CHECK(post("{not json") == 400);
  CHECK(post({{"epoch", 0}}) == 400);
  CHECK(post({{"epoch", 1}, {"labels", labels}, {"best_id", 0}}) == 409);
  CHECK(post({{"epoch", 0}, {"labels", labels}, {"best_id", 9}}) == 422);  // best not marked good
  auto partial = labels;
  partial.erase(partial.size() - 1);
  CHECK(post({{"epoch", 0}, {"labels", partial}, {"best_id", 0}}) == 422);
  CHECK(post({{"epoch", 0}, {"labels", labels}, {"best_id", 1}}) == 200);
  CHECK(post({{"epoch", 0}, {"labels", labels}, {"best_id", 1}}) == 409);

  const auto batch1 = wait_for_batch(1);
  auto none = nlohmann::json::array();
  for (const auto& sample : batch1.at("samples")) none.push_back({{"id", sample.at("id")}, {"good", false}});
  CHECK(post({{"epoch", 1}, {"labels", none}, {"best_id", nullptr}}) == 200);

  trainer.join();
  server.stop();
  CHECK_FALSE(result.interrupted);
  CHECK(result.state.n_fb == 32);
  CHECK(hub.status().phase == feedback::Phase::done);
  CHECK(hub.status().n_fb == 32);
  const auto log = feedback::load_feedback(dir);
  REQUIRE(log.size() == 2);
  CHECK(log[0].annotator == "human");
  CHECK(log[0].best == 1);
  for (const auto& r : log[1].records) CHECK_FALSE(r.good);
  // Without an evaluation oracle a human-driven run has no final score.
  CHECK_FALSE(result.final_success.has_value());
}

TEST_CASE("shutting the hub down interrupts a waiting run") {
  const auto dir = test::scratch_dir("service_abort");
  auto c = quick_run(dir, 4);
  c.feedback.source = "service";
  feedback::FeedbackHub hub;
  TrainOptions opt;
  opt.source = &hub;
  opt.hub = &hub;
  RunResult result;
  std::thread trainer([&] { result = hero_train(c, opt); });
  while (!hub.batch()) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  hub.shutdown();
  trainer.join();
  CHECK(result.interrupted);
  CHECK(result.state.epoch == 0);
  CHECK(feedback::load_feedback(dir).empty());
}
