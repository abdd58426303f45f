// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

// JSON mappings shared by the run module's translation units.

#pragma once

#include "hero/autodiff/adam.hpp"
#include "hero/autodiff/tensor.hpp"
#include "hero/noise/pi_hero.hpp"
#include "hero/run/config.hpp"
#include "json.hpp"

namespace hero::run::detail {

using nlohmann::json;

json oracle_to_json(const feedback::OracleSpec& oracle);
/// Accepts a preset name or a full object.
feedback::OracleSpec oracle_from_json(const json& j);

json config_json(const BaseConfig& config);
json config_json(const RunConfig& config);
BaseConfig base_config_from(const json& j);
RunConfig run_config_from(const json& j);

json params_to_json(const ad::ParamStore& store, const std::string& prefix = "");
/// Overwrites matching entries of `store`; every stored name must exist with the same shape.
void params_from_json(const json& j, ad::ParamStore& store);

json adam_to_json(const ad::AdamState& state);
ad::AdamState adam_from_json(const json& j);

json pi_hero_to_json(const noise::PiHeroState& state);
noise::PiHeroState pi_hero_from_json(const json& j);

}  // namespace hero::run::detail
