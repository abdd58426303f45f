// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/run/checkpoint.hpp"

#include <stdexcept>

#include "hero/diffusion/pretrain.hpp"
#include "json_io.hpp"

namespace hero::run {

using detail::json;

BaseModel pretrain_base(const BaseConfig& config, diffusion::PretrainResult* result) {
  BaseConfig c = config;
  c.denoiser.dim = diffusion::dataset_dim(c.dataset.name);
  c.denoiser.num_labels = diffusion::dataset_num_labels(c.dataset.name);
  Rng rng(c.seed);
  Rng data_rng = rng.fork();
  const auto data = diffusion::make_dataset(c.dataset, data_rng);
  auto schedule = make_schedule(c.schedule);
  BaseModel model{c, schedule, diffusion::DenoiserNet(c.denoiser, schedule, rng)};
  model.net.prepare_pretraining();
  auto r = diffusion::pretrain(model.net, model.schedule, data, c.pretrain, rng);
  if (result) *result = std::move(r);
  return model;
}

std::filesystem::path save_base(const BaseModel& model, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const json j = {{"format_version", kCheckpointFormat},
                  {"config", detail::config_json(model.config)},
                  {"params", detail::params_to_json(model.net.params())}};
  const auto path = dir / kBaseFileName;
  write_file_atomic(path, j.dump());
  return path;
}

BaseModel load_base(const std::filesystem::path& path) {
  const auto file = std::filesystem::is_directory(path) ? path / kBaseFileName : path;
  if (!std::filesystem::exists(file)) throw std::runtime_error("base checkpoint not found: " + file.string());
  try {
    const json j = json::parse(read_file(file));
    if (j.at("format_version").get<int>() != kCheckpointFormat) {
      throw std::runtime_error("unsupported base checkpoint format");
    }
    BaseConfig config = detail::base_config_from(j.at("config"));
    Rng rng(0);
    auto schedule = make_schedule(config.schedule);
    BaseModel model{config, schedule, diffusion::DenoiserNet(config.denoiser, schedule, rng)};
    detail::params_from_json(j.at("params"), model.net.params());
    return model;
  } catch (const json::exception& e) {
    throw std::runtime_error("corrupt base checkpoint " + file.string() + ": " + e.what());
  }
}

namespace {

json store_json(const ad::ParamStore& s) { return detail::params_to_json(s); }

ad::ParamStore store_from(const json& j) {
  ad::ParamStore s;
  for (const auto& [name, v] : j.items()) {
    ad::Tensor t;
    t.shape = v.at("shape").get<ad::Shape>();
    t.data = v.at("data").get<std::vector<double>>();
    if (t.data.size() != ad::shape_numel(t.shape)) throw std::runtime_error("tensor '" + name + "' size mismatch");
    s.add(name, std::move(t), false);
  }
  return s;
}

}  // namespace

void save_checkpoint(const RunCheckpoint& c, const std::filesystem::path& run_dir) {
  const json state = {{"epoch", c.state.epoch},
                      {"n_fb", c.state.n_fb},
                      {"phase", feedback::to_string(c.state.phase)},
                      {"success_history", c.state.success_history},
                      {"metrics_rows", c.state.metrics_rows}};
  const json j = {{"format_version", c.format_version},
                  {"state", state},
                  {"pi_hero", detail::pi_hero_to_json(c.pi)},
                  {"adapters", store_json(c.adapters)},
                  {"embedding", store_json(c.embedding)},
                  {"head", store_json(c.head)},
                  {"ddpo_adam", detail::adam_to_json(c.ddpo_adam)},
                  {"rng", c.rng}};
  write_file_atomic(run_dir / kCheckpointFileName, j.dump());
}

bool has_checkpoint(const std::filesystem::path& run_dir) {
  return std::filesystem::exists(run_dir / kCheckpointFileName);
}

RunCheckpoint load_checkpoint(const std::filesystem::path& run_dir) {
  const auto file = run_dir / kCheckpointFileName;
  if (!std::filesystem::exists(file)) throw std::runtime_error("run checkpoint not found: " + file.string());
  try {
    const json j = json::parse(read_file(file));
    RunCheckpoint c;
    c.format_version = j.at("format_version").get<int>();
    if (c.format_version != kCheckpointFormat) {
      throw std::runtime_error("unsupported checkpoint format " + std::to_string(c.format_version));
    }
    const auto& s = j.at("state");
    c.state.epoch = s.at("epoch").get<int>();
    c.state.n_fb = s.at("n_fb").get<long>();
    c.state.phase = feedback::phase_from_string(s.at("phase").get<std::string>());
    c.state.success_history = s.at("success_history").get<std::vector<double>>();
    c.state.metrics_rows = s.at("metrics_rows").get<int>();
    c.pi = detail::pi_hero_from_json(j.at("pi_hero"));
    c.adapters = store_from(j.at("adapters"));
    c.embedding = store_from(j.at("embedding"));
    c.head = store_from(j.at("head"));
    c.ddpo_adam = detail::adam_from_json(j.at("ddpo_adam"));
    c.rng = j.at("rng").get<std::string>();
    return c;
  } catch (const json::exception& e) {
    throw std::runtime_error("corrupt run checkpoint " + file.string() + ": " + e.what());
  }
}

void assign_params(const ad::ParamStore& src, ad::ParamStore& dst) {
  for (const auto& [name, entry] : src.entries()) {
    if (!dst.contains(name)) throw std::runtime_error("parameter '" + name + "' unknown to the model");
    auto& t = dst.at(name);
    if (t.shape != entry.tensor.shape) throw std::runtime_error("parameter '" + name + "' has a different shape");
    t.data = entry.tensor.data;
  }
}

}  // namespace hero::run
