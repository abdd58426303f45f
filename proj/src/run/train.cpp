// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/run/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hero/feedback/log.hpp"
#include "hero/representation/rewards.hpp"
#include "hero/representation/triplet.hpp"
#include "json.hpp"

namespace hero::run {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& v) {
  return v.empty() ? kNaN : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void truncate_feedback(const std::filesystem::path& run_dir, std::size_t keep) {
  auto entries = feedback::load_feedback(run_dir);
  if (entries.size() <= keep) return;
  std::string out;
  for (std::size_t i = 0; i < keep; ++i) out += feedback::to_json_line(entries[i]) + "\n";
  write_file_atomic(run_dir / feedback::kFeedbackLogName, out);
}

bool finished(const RunConfig& c, const RunState& s) {
  if (s.n_fb + c.batch > c.budget) return true;
  return c.stop_success && !s.success_history.empty() && s.success_history.back() >= *c.stop_success;
}

std::optional<feedback::OracleSpec> evaluation_oracle(const RunConfig& c) {
  if (c.eval_oracle) return c.eval_oracle;
  if (c.feedback.source == "oracle") return c.feedback.oracle;
  return std::nullopt;
}

noise::PiHeroState initial_prior(const RunConfig& c, std::size_t dim) {
  noise::PiHeroState pi;
  pi.dim = dim;
  pi.beta = c.pi_hero.beta;
  pi.eps2 = c.pi_hero.eps2;
  return pi;
}

repr::EmbeddingConfig embedding_config(const RunConfig& c, std::size_t dim) {
  auto e = c.embedding.net;
  e.input_dim = dim;
  return e;
}

// Goods (best excluded) and best initial noises of one annotated batch.
void refined_means(const feedback::BatchAnnotation& a, const std::vector<std::vector<double>>& z_T,
                   std::vector<std::vector<double>>& goods, std::optional<std::vector<double>>& best) {
  goods.clear();
  best.reset();
  for (int id : a.good) {
    if (a.best && id == *a.best) continue;
    goods.push_back(z_T.at(static_cast<std::size_t>(id)));
  }
  if (a.best) best = z_T.at(static_cast<std::size_t>(*a.best));
}

class Trainer {
 public:
  Trainer(const RunConfig& config, const TrainOptions& options)
      : config_(config), options_(options), base_(load_base(config.base_checkpoint)), rng_(config.seed) {
    validate(config_);
    config_.base_checkpoint = std::filesystem::absolute(config_.base_checkpoint);
    if (config_.condition < 0 || config_.condition > base_.config.denoiser.num_labels) {
      throw std::invalid_argument("RunConfig: condition out of range for the base model");
    }
    dim_ = base_.config.denoiser.dim;
    base_.net.prepare_finetuning();
    embed_ = repr::EmbeddingNet(embedding_config(config_, dim_), rng_);
    head_ = repr::ProjectionHead(embed_.width(), config_.embedding.net.projection, rng_);
    pi_ = initial_prior(config_, dim_);
    adam_.config.lr = config_.ddpo.lr;
    adam_.config.weight_decay = config_.ddpo.weight_decay;
    if (config_.feedback.source == "oracle") oracle_source_.emplace(config_.feedback.oracle);
    source_ = options_.source;
    if (!source_) {
      if (config_.feedback.source != "oracle") {
        throw std::invalid_argument("service feedback requires an external feedback source");
      }
      source_ = &*oracle_source_;
    }
  }

  RunResult run() {
    const auto& dir = config_.run_dir;
    if (dir.empty()) throw std::invalid_argument("RunConfig: run_dir is empty");
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / kConfigFileName, to_json(config_));
    if (has_checkpoint(dir)) {
      resume();
    } else {
      std::filesystem::remove(dir / feedback::kFeedbackLogName);
      std::filesystem::remove(dir / kMetricsFileName);
    }

    RunResult result;
    int epochs_this_call = 0;
    while (!finished(config_, state_)) {
      if (options_.max_epochs >= 0 && epochs_this_call >= options_.max_epochs) {
        result.interrupted = true;
        break;
      }
      try {
        run_epoch();
      } catch (const feedback::FeedbackAborted& e) {
        if (options_.verbose) std::cerr << "feedback aborted: " << e.what() << "\n";
        result.interrupted = true;
        break;
      }
      ++epochs_this_call;
    }
    if (!result.interrupted) {
      state_.phase = feedback::Phase::done;
      save();
      publish();
      result.final_success = final_evaluation();
    }
    result.state = state_;
    result.pi = pi_;
    result.metrics = load_metrics(dir / kMetricsFileName);
    return result;
  }

 private:
  void resume() {
    const auto ck = load_checkpoint(config_.run_dir);
    state_ = ck.state;
    pi_ = ck.pi;
    pi_.beta = config_.pi_hero.beta;
    pi_.eps2 = config_.pi_hero.eps2;
    assign_params(ck.adapters, base_.net.params());
    assign_params(ck.embedding, embed_.params());
    assign_params(ck.head, head_.params());
    adam_ = ck.ddpo_adam;
    rng_ = Rng::deserialize(ck.rng);
    // Work after the last checkpoint is discarded; the epoch reruns.
    truncate_feedback(config_.run_dir, static_cast<std::size_t>(state_.epoch));
    truncate_metrics(config_.run_dir / kMetricsFileName, static_cast<std::size_t>(state_.metrics_rows));
    if (options_.verbose) std::cerr << "resuming at epoch " << state_.epoch << ", n_fb " << state_.n_fb << "\n";
  }

  void set_phase(feedback::Phase phase) {
    state_.phase = phase;
    publish();
  }

  void publish() {
    if (!options_.hub) return;
    options_.hub->publish_status({state_.epoch, state_.phase, state_.n_fb, config_.budget, state_.success_history});
  }

  void save() {
    RunCheckpoint ck;
    ck.state = state_;
    ck.pi = pi_;
    for (const auto& [name, entry] : base_.net.params().entries()) {
      if (name.rfind("lora.", 0) == 0) ck.adapters.add(name, entry.tensor, false);
    }
    ck.embedding = embed_.params().frozen_copy();
    ck.head = head_.params().frozen_copy();
    ck.ddpo_adam = adam_;
    ck.rng = rng_.serialize();
    save_checkpoint(ck, config_.run_dir);
  }

  void run_epoch() {
    const int epoch = state_.epoch;
    const auto n = static_cast<std::size_t>(config_.batch);
    set_phase(feedback::Phase::sampling);

    const auto prior = config_.pi_hero.refined_prior ? pi_ : initial_prior(config_, dim_);
    const auto z_T = noise::pi_hero_sample(prior, n, rng_);
    const auto trajs =
        diffusion::sample_trajectories(base_.net, base_.schedule, z_T, config_.condition, config_.sampler, rng_);
    std::vector<std::vector<double>> z0;
    z0.reserve(n);
    for (const auto& t : trajs) z0.push_back(t.z0());

    set_phase(feedback::Phase::awaiting_feedback);
    const auto annotation = source_->await_feedback(epoch, feedback::render_batch(z0), z0);
    if (annotation.epoch != epoch || annotation.ids.size() != n) {
      throw std::runtime_error("feedback source returned an annotation for the wrong batch");
    }
    feedback::validate(annotation);

    feedback::FeedbackLogEntry entry;
    entry.epoch = epoch;
    entry.best = annotation.best;
    entry.annotator = annotation.annotator;
    entry.timestamp = feedback::utc_timestamp();
    for (std::size_t i = 0; i < n; ++i) {
      entry.records.push_back({static_cast<int>(i), annotation.is_good(static_cast<int>(i)), z_T[i], z0[i]});
    }
    feedback::log_feedback(entry, config_.run_dir);
    state_.n_fb += config_.batch;

    EpochMetrics m;
    m.epoch = epoch;
    m.n_fb = state_.n_fb;
    m.n_good = static_cast<int>(annotation.good.size());
    m.success_rate = static_cast<double>(annotation.good.size()) / static_cast<double>(n);
    m.mean_reward = m.best_reward = m.min_reward = m.max_reward = m.mean_advantage = m.ddpo_loss = m.clip_fraction = m.mean_ratio = m.embed_loss = kNaN;

    if (annotation.good.empty()) {
      if (options_.verbose) std::cerr << "epoch " << epoch << ": no good samples, skipping training\n";
    } else {
      train_on(annotation, trajs, z_T, z0, m);
    }

    state_.epoch += 1;
    state_.success_history.push_back(m.success_rate);
    append_metrics(config_.run_dir / kMetricsFileName, m);
    state_.metrics_rows += 1;
    state_.phase = finished(config_, state_) ? feedback::Phase::done : feedback::Phase::sampling;
    save();
    publish();
    if (options_.verbose) {
      std::cerr << "epoch " << epoch << ": n_fb " << state_.n_fb << ", success " << m.success_rate << "\n";
    }
    if (options_.on_epoch) options_.on_epoch(m);
  }

  void train_on(const feedback::BatchAnnotation& a, const std::vector<diffusion::Trajectory>& trajs,
                const std::vector<std::vector<double>>& z_T, const std::vector<std::vector<double>>& z0,
                EpochMetrics& m) {
    set_phase(feedback::Phase::training_embedding);
    const auto& best0 = z0.at(static_cast<std::size_t>(*a.best));
    std::vector<std::vector<double>> goods0, bads0;
    for (int id : a.good) goods0.push_back(z0.at(static_cast<std::size_t>(id)));
    for (int id : a.bad) bads0.push_back(z0.at(static_cast<std::size_t>(id)));

    const bool embedding_used =
        config_.reward == repr::RewardVariant::best || config_.reward == repr::RewardVariant::positives;
    if (embedding_used && !bads0.empty()) {
      repr::TripletBatch batch{best0, goods0, bads0, config_.embedding.margin};
      const auto r = repr::train_embedding(embed_, head_, batch, config_.embedding.train, rng_);
      if (!r.loss_history.empty()) m.embed_loss = r.loss_history.back();
    }

    repr::RewardVector rewards;
    switch (config_.reward) {
      case repr::RewardVariant::best:
        rewards = repr::rewards_similarity_to_best(embed_, z0, best0);
        break;
      case repr::RewardVariant::positives:
        rewards = repr::rewards_similarity_to_positives(embed_, z0, goods0, best0);
        break;
      case repr::RewardVariant::binary:
        rewards = repr::rewards_binary(a);
        break;
      case repr::RewardVariant::noembed:
        rewards = repr::rewards_noembed(z0, goods0, best0);
        break;
    }
    const auto advantages = ddpo::normalize_advantages(rewards.values, config_.ddpo.normalize_advantages);
    m.mean_reward = mean_of(rewards.values);
    m.best_reward = rewards.values.at(static_cast<std::size_t>(*a.best));
    m.min_reward = *std::min_element(rewards.values.begin(), rewards.values.end());
    m.max_reward = *std::max_element(rewards.values.begin(), rewards.values.end());
    m.mean_advantage = mean_of(advantages);

    set_phase(feedback::Phase::training_ddpo);
    const auto stats = ddpo::ddpo_update(base_.net, base_.schedule, trajs, advantages, config_.sampler,
                                         config_.ddpo, adam_, rng_);
    m.ddpo_loss = stats.mean_loss;
    m.clip_fraction = stats.clip_fraction;
    m.mean_ratio = stats.mean_ratio;

    std::vector<std::vector<double>> goods_T;
    std::optional<std::vector<double>> best_T;
    refined_means(a, z_T, goods_T, best_T);
    pi_ = noise::pi_hero_update(pi_, goods_T, best_T);
  }

  std::optional<double> final_evaluation() {
    const auto oracle = evaluation_oracle(config_);
    if (!oracle || config_.final_eval_n <= 0) return std::nullopt;
    Rng rng = evaluation_rng(config_.seed);
    const auto prior = config_.pi_hero.refined_prior ? pi_ : initial_prior(config_, dim_);
    const auto z_T = noise::pi_hero_sample(prior, static_cast<std::size_t>(config_.final_eval_n), rng);
    const auto trajs =
        diffusion::sample_trajectories(base_.net, base_.schedule, z_T, config_.condition, config_.sampler, rng);
    std::vector<std::vector<double>> z0;
    for (const auto& t : trajs) z0.push_back(t.z0());
    const double p = feedback::success_rate(z0, *oracle);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(z0.size()));
    const nlohmann::json doc = {{"success", p}, {"se", se}, {"n", z0.size()}, {"oracle", oracle->name}};
    write_file_atomic(config_.run_dir / "final.json", doc.dump() + "\n");
    return p;
  }

  RunConfig config_;
  TrainOptions options_;
  BaseModel base_;
  Rng rng_;
  std::size_t dim_ = 0;
  repr::EmbeddingNet embed_;
  repr::ProjectionHead head_;
  noise::PiHeroState pi_;
  ad::AdamState adam_;
  RunState state_;
  std::optional<feedback::OracleFeedbackSource> oracle_source_;
  feedback::FeedbackSource* source_ = nullptr;
};

}  // namespace

Rng evaluation_rng(std::uint64_t seed) { return Rng(seed ^ 0x9e3779b97f4a7c15ULL); }

RunResult hero_train(const RunConfig& config, const TrainOptions& options) {
  Trainer trainer(config, options);
  return trainer.run();
}

ReplayedRun replay_run(const RunConfig& config, const std::filesystem::path& run_dir) {
  const auto base = load_base(config.base_checkpoint);
  ReplayedRun r;
  r.pi = initial_prior(config, base.config.denoiser.dim);
  for (const auto& entry : feedback::load_feedback(run_dir)) {
    const auto a = entry.annotation();
    std::vector<std::vector<double>> z_T;
    for (const auto& rec : entry.records) z_T.push_back(rec.z_T);
    r.state.epoch += 1;
    r.state.n_fb += static_cast<long>(entry.records.size());
    r.state.success_history.push_back(static_cast<double>(a.good.size()) /
                                      static_cast<double>(entry.records.size()));
    if (!a.good.empty()) {
      std::vector<std::vector<double>> goods;
      std::optional<std::vector<double>> best;
      refined_means(a, z_T, goods, best);
      r.pi = noise::pi_hero_update(r.pi, goods, best);
    }
  }
  r.state.metrics_rows = static_cast<int>(load_metrics(run_dir / kMetricsFileName).size());
  r.state.phase = finished(config, r.state) ? feedback::Phase::done : feedback::Phase::sampling;
  return r;
}

FineTunedModel load_run(const std::filesystem::path& run_dir) {
  auto config = load_run_config(run_dir / kConfigFileName);
  auto ck = load_checkpoint(run_dir);
  FineTunedModel m{config, load_base(config.base_checkpoint), ck.pi, ck.state};
  m.base.net.prepare_finetuning();
  assign_params(ck.adapters, m.base.net.params());
  return m;
}

}  // namespace hero::run
