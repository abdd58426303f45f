// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "json_io.hpp"

#include <stdexcept>

namespace hero::run::detail {

json params_to_json(const ad::ParamStore& store, const std::string& prefix) {
  json out = json::object();
  for (const auto& [name, entry] : store.entries()) {
    if (name.rfind(prefix, 0) != 0) continue;
    out[name] = {{"shape", entry.tensor.shape}, {"data", entry.tensor.data}};
  }
  return out;
}

void params_from_json(const json& j, ad::ParamStore& store) {
  for (const auto& [name, value] : j.items()) {
    if (!store.contains(name)) throw std::runtime_error("checkpoint parameter '" + name + "' unknown to the model");
    auto& t = store.at(name);
    const auto shape = value.at("shape").get<ad::Shape>();
    if (shape != t.shape) throw std::runtime_error("checkpoint parameter '" + name + "' has a different shape");
    auto data = value.at("data").get<std::vector<double>>();
    if (data.size() != t.data.size()) throw std::runtime_error("checkpoint parameter '" + name + "' has wrong size");
    t.data = std::move(data);
  }
}

json adam_to_json(const ad::AdamState& s) {
  return {{"lr", s.config.lr},       {"beta1", s.config.beta1}, {"beta2", s.config.beta2},
          {"eps", s.config.eps},     {"weight_decay", s.config.weight_decay},
          {"step", s.step},          {"m", s.m},                {"v", s.v}};
}

ad::AdamState adam_from_json(const json& j) {
  ad::AdamState s;
  s.config.lr = j.at("lr").get<double>();
  s.config.beta1 = j.at("beta1").get<double>();
  s.config.beta2 = j.at("beta2").get<double>();
  s.config.eps = j.at("eps").get<double>();
  s.config.weight_decay = j.at("weight_decay").get<double>();
  s.step = j.at("step").get<long>();
  s.m = j.at("m").get<std::map<std::string, std::vector<double>>>();
  s.v = j.at("v").get<std::map<std::string, std::vector<double>>>();
  return s;
}

json pi_hero_to_json(const noise::PiHeroState& s) {
  return {{"dim", s.dim},
          {"first_iteration", s.first_iteration},
          {"best", s.best ? json(*s.best) : json(nullptr)},
          {"goods", s.goods},
          {"beta", s.beta},
          {"eps2", s.eps2}};
}

noise::PiHeroState pi_hero_from_json(const json& j) {
  noise::PiHeroState s;
  s.dim = j.at("dim").get<std::size_t>();
  s.first_iteration = j.at("first_iteration").get<bool>();
  if (!j.at("best").is_null()) s.best = j.at("best").get<std::vector<double>>();
  s.goods = j.at("goods").get<std::vector<std::vector<double>>>();
  s.beta = j.at("beta").get<double>();
  s.eps2 = j.at("eps2").get<double>();
  s.validate();
  return s;
}

}  // namespace hero::run::detail
