// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/run/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json_io.hpp"

namespace hero::diffusion {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DatasetSpec, name, radius, mode_std, cells, extent, size)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DenoiserConfig, dim, hidden, time_embedding,
                                                condition_embedding, num_labels, lora_rank,
                                                skip_connection)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PretrainConfig, epochs, batch, lr, cond_dropout,
                                                final_lr_ratio, max_weight)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SamplerConfig, steps, eta, guidance_weight, guidance, clip)
}  // namespace hero::diffusion

namespace hero::repr {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EmbeddingConfig, input_dim, hidden, width, projection,
                                                zero_init_output)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EmbeddingTrainConfig, steps, lr, pair_batch)
}  // namespace hero::repr

namespace hero::ddpo {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DdpoConfig, clip, truncation, lr, weight_decay, batch_size,
                                                grad_accum, inner_epochs, normalize_advantages)
}  // namespace hero::ddpo

namespace hero::run {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ScheduleConfig, steps, beta_min, beta_max)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PiHeroConfig, beta, eps2, refined_prior)

diffusion::NoiseSchedule make_schedule(const ScheduleConfig& c) {
  return diffusion::schedule_linear(c.steps, c.beta_min, c.beta_max);
}

namespace detail {

namespace {

// Rejects keys that the defaults do not know, recursing into nested objects.
void check_keys(const json& given, const json& defaults, const std::string& where) {
  if (!given.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (const auto& [key, value] : given.items()) {
    if (!defaults.contains(key)) throw std::invalid_argument(where + ": unknown key '" + key + "'");
    const auto& d = defaults.at(key);
    if (d.is_object() && value.is_object()) check_keys(value, d, where + "." + key);
  }
}

// A partial object overrides only the fields it names; the rest keep `current`.
template <class T>
T overlay(const json& body, const char* key, const T& current) {
  if (!body.contains(key)) return current;
  json merged = current;
  merged.merge_patch(body.at(key));
  return merged.get<T>();
}

}  // namespace

json oracle_to_json(const feedback::OracleSpec& o) {
  return {{"name", o.name},         {"kind", feedback::to_string(o.kind)},
          {"center", o.center},     {"radius", o.radius},
          {"weights", o.weights},   {"bias", o.bias},
          {"threshold", o.threshold}, {"predicate", o.predicate}};
}

feedback::OracleSpec oracle_from_json(const json& j) {
  if (j.is_string()) return feedback::oracle_preset(j.get<std::string>());
  feedback::OracleSpec o;
  check_keys(j, oracle_to_json(o), "oracle");
  o.name = j.value("name", o.name);
  if (j.contains("kind")) o.kind = feedback::oracle_kind_from_string(j.at("kind").get<std::string>());
  o.center = j.value("center", o.center);
  o.radius = j.value("radius", o.radius);
  o.weights = j.value("weights", o.weights);
  o.bias = j.value("bias", o.bias);
  o.threshold = j.value("threshold", o.threshold);
  o.predicate = j.value("predicate", o.predicate);
  return o;
}

json config_json(const BaseConfig& c) {
  return {{"dataset", c.dataset}, {"schedule", c.schedule}, {"denoiser", c.denoiser},
          {"pretrain", c.pretrain}, {"seed", c.seed}};
}

json config_json(const RunConfig& c) {
  return {{"base_checkpoint", c.base_checkpoint.string()},
          {"run_dir", c.run_dir.string()},
          {"sampler", c.sampler},
          {"embedding", {{"net", c.embedding.net}, {"train", c.embedding.train}, {"margin", c.embedding.margin}}},
          {"ddpo", c.ddpo},
          {"reward", repr::to_string(c.reward)},
          {"pi_hero", c.pi_hero},
          {"feedback", {{"source", c.feedback.source}, {"oracle", oracle_to_json(c.feedback.oracle)}, {"port", c.feedback.port}}},
          {"eval_oracle", c.eval_oracle ? oracle_to_json(*c.eval_oracle) : json(nullptr)},
          {"budget", c.budget},
          {"batch", c.batch},
          {"seed", c.seed},
          {"condition", c.condition},
          {"stop_success", c.stop_success ? json(*c.stop_success) : json(nullptr)},
          {"final_eval_n", c.final_eval_n}};
}

BaseConfig base_config_from(const json& j) {
  BaseConfig c;
  check_keys(j, config_json(c), "base config");
  c.dataset = overlay(j, "dataset", c.dataset);
  c.schedule = overlay(j, "schedule", c.schedule);
  c.denoiser = overlay(j, "denoiser", c.denoiser);
  c.pretrain = overlay(j, "pretrain", c.pretrain);
  c.seed = j.value("seed", c.seed);
  c.denoiser.dim = diffusion::dataset_dim(c.dataset.name);
  c.denoiser.num_labels = diffusion::dataset_num_labels(c.dataset.name);
  return c;
}

RunConfig run_config_from(const json& j) {
  json body = j;
  RunConfig c;
  if (body.is_object() && body.contains("preset")) {
    c = run_preset(body.at("preset").get<std::string>());
    body.erase("preset");
  }
  check_keys(body, config_json(c), "run config");
  if (body.contains("base_checkpoint")) c.base_checkpoint = body.at("base_checkpoint").get<std::string>();
  if (body.contains("run_dir")) c.run_dir = body.at("run_dir").get<std::string>();
  c.sampler = overlay(body, "sampler", c.sampler);
  if (body.contains("embedding")) {
    const auto& e = body.at("embedding");
    c.embedding.net = overlay(e, "net", c.embedding.net);
    c.embedding.train = overlay(e, "train", c.embedding.train);
    c.embedding.margin = e.value("margin", c.embedding.margin);
  }
  c.ddpo = overlay(body, "ddpo", c.ddpo);
  if (body.contains("reward")) c.reward = repr::reward_variant_from_string(body.at("reward").get<std::string>());
  c.pi_hero = overlay(body, "pi_hero", c.pi_hero);
  if (body.contains("feedback")) {
    const auto& f = body.at("feedback");
    c.feedback.source = f.value("source", c.feedback.source);
    if (f.contains("oracle")) c.feedback.oracle = oracle_from_json(f.at("oracle"));
    c.feedback.port = f.value("port", c.feedback.port);
  }
  if (body.contains("eval_oracle")) {
    const auto& e = body.at("eval_oracle");
    c.eval_oracle = e.is_null() ? std::nullopt : std::optional(oracle_from_json(e));
  }
  c.budget = body.value("budget", c.budget);
  c.batch = body.value("batch", c.batch);
  c.seed = body.value("seed", c.seed);
  c.condition = body.value("condition", c.condition);
  if (body.contains("stop_success")) {
    const auto& s = body.at("stop_success");
    c.stop_success = s.is_null() ? std::nullopt : std::optional(s.get<double>());
  }
  c.final_eval_n = body.value("final_eval_n", c.final_eval_n);
  validate(c);
  return c;
}

}  // namespace detail

void validate(const RunConfig& c) {
  if (c.batch < 2) throw std::invalid_argument("RunConfig: batch must be at least 2");
  if (c.budget < c.batch) throw std::invalid_argument("RunConfig: budget must be at least one batch");
  if (c.feedback.source != "oracle" && c.feedback.source != "service") {
    throw std::invalid_argument("RunConfig: feedback.source must be 'oracle' or 'service'");
  }
  if (c.final_eval_n < 0) throw std::invalid_argument("RunConfig: final_eval_n must be non-negative");
  if (!(c.pi_hero.beta >= 0.0 && c.pi_hero.beta <= 1.0)) throw std::invalid_argument("RunConfig: pi_hero.beta must lie in [0, 1]");
  if (!(c.pi_hero.eps2 >= 0.0)) throw std::invalid_argument("RunConfig: pi_hero.eps2 must be non-negative");
  diffusion::validate(c.sampler);
  ddpo::validate(c.ddpo);
}

RunConfig run_preset(const std::string& name) {
  RunConfig c;
  if (name == "default") return c;
  if (name == "large") {
    c.budget = 1152;
    c.batch = 128;
    return c;
  }
  throw std::invalid_argument("unknown run preset '" + name + "'");
}

std::string to_json(const BaseConfig& c) { return detail::config_json(c).dump(2); }
std::string to_json(const RunConfig& c) { return detail::config_json(c).dump(2); }

namespace {

nlohmann::json parse_document(const std::string& text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string(what) + ": " + e.what());
  }
}

template <typename F>
auto convert(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string(what) + ": " + e.what());
  }
}

}  // namespace

BaseConfig base_config_from_json(const std::string& text) {
  const auto j = parse_document(text, "base config");
  return convert("base config", [&] { return detail::base_config_from(j); });
}

RunConfig run_config_from_json(const std::string& text) {
  const auto j = parse_document(text, "run config");
  return convert("run config", [&] { return detail::run_config_from(j); });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

BaseConfig load_base_config(const std::filesystem::path& path) { return base_config_from_json(read_file(path)); }
RunConfig load_run_config(const std::filesystem::path& path) { return run_config_from_json(read_file(path)); }

}  // namespace hero::run
