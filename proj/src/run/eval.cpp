// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/run/eval.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hero/run/checkpoint.hpp"
#include "hero/run/train.hpp"
#include "json.hpp"

namespace hero::run {

using nlohmann::json;

namespace {

std::vector<std::vector<double>> final_states(const std::vector<diffusion::Trajectory>& trajs) {
  std::vector<std::vector<double>> z0;
  z0.reserve(trajs.size());
  for (const auto& t : trajs) z0.push_back(t.z0());
  return z0;
}

noise::PiHeroState standard_prior(std::size_t dim) {
  noise::PiHeroState pi;
  pi.dim = dim;
  return pi;
}

}  // namespace

SampleSet generate_final(const std::filesystem::path& run_dir, std::size_t n, bool use_refined_prior,
                         std::optional<std::uint64_t> seed) {
  const auto model = load_run(run_dir);
  SampleSet s;
  s.prior = use_refined_prior ? "refined" : "standard";
  s.condition = model.config.condition;
  s.seed = seed.value_or(model.config.seed);
  Rng rng = evaluation_rng(s.seed);
  const auto prior = use_refined_prior ? model.pi : standard_prior(model.base.config.denoiser.dim);
  s.z_T = noise::pi_hero_sample(prior, n, rng);
  if (n > 0) {
    s.z_0 = final_states(diffusion::sample_trajectories(model.base.net, model.base.schedule, s.z_T, s.condition,
                                                        model.config.sampler, rng));
  }
  return s;
}

std::string to_json(const SampleSet& s) {
  json samples = json::array();
  for (std::size_t i = 0; i < s.z_0.size(); ++i) {
    samples.push_back({{"id", i}, {"z_T", s.z_T[i]}, {"z_0", s.z_0[i]}});
  }
  return json{{"prior", s.prior}, {"condition", s.condition}, {"seed", s.seed}, {"samples", samples}}.dump(1);
}

void write_samples(const SampleSet& s, const std::filesystem::path& file) { write_file_atomic(file, to_json(s)); }

EvalReport evaluate(const std::filesystem::path& path, const feedback::OracleSpec& oracle, std::size_t n,
                    std::optional<std::uint64_t> seed, bool use_refined_prior) {
  if (n == 0) throw std::invalid_argument("evaluate: n must be positive");
  EvalReport r;
  r.oracle = oracle.name;
  r.n = n;
  std::vector<std::vector<double>> z0;
  if (std::filesystem::is_directory(path) && has_checkpoint(path)) {
    r.source = "run";
    z0 = generate_final(path, n, use_refined_prior, seed).z_0;
  } else {
    r.source = "base";
    const auto base = load_base(path);
    const RunConfig defaults;
    Rng rng = evaluation_rng(seed.value_or(base.config.seed));
    const auto z_T = noise::pi_hero_sample(standard_prior(base.config.denoiser.dim), n, rng);
    z0 = final_states(diffusion::sample_trajectories(base.net, base.schedule, z_T, defaults.condition,
                                                     defaults.sampler, rng));
  }
  r.success = feedback::success_rate(z0, oracle);
  r.standard_error = std::sqrt(r.success * (1.0 - r.success) / static_cast<double>(n));
  return r;
}

std::string to_json(const EvalReport& r) {
  return json{{"source", r.source}, {"oracle", r.oracle}, {"n", r.n}, {"success", r.success},
              {"standard_error", r.standard_error}}
      .dump(2);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, sep);) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

}  // namespace

AblationGrid parse_grid(const std::string& spec, const RunConfig& config) {
  AblationGrid g{{config.reward}, {config.pi_hero.beta}, {config.pi_hero.refined_prior}, {config.seed}};
  for (const auto& clause : split(spec, ';')) {
    const auto eq = clause.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("grid clause '" + clause + "' lacks '='");
    const auto key = clause.substr(0, eq);
    const auto values = split(clause.substr(eq + 1), ',');
    if (values.empty()) throw std::invalid_argument("grid clause '" + clause + "' has no values");
    if (key == "variant") {
      g.variants.clear();
      for (const auto& v : values) g.variants.push_back(repr::reward_variant_from_string(v));
    } else if (key == "beta") {
      g.betas.clear();
      for (const auto& v : values) {
        const double b = std::stod(v);
        if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("grid beta outside [0, 1]");
        g.betas.push_back(b);
      }
    } else if (key == "prior") {
      g.refined_priors.clear();
      for (const auto& v : values) {
        if (v != "refined" && v != "random") throw std::invalid_argument("grid prior must be refined or random");
        g.refined_priors.push_back(v == "refined");
      }
    } else if (key == "seeds" || key == "seed") {
      g.seeds.clear();
      for (const auto& v : values) g.seeds.push_back(std::stoull(v));
    } else {
      throw std::invalid_argument("unknown grid key '" + key + "'");
    }
  }
  return g;
}

std::optional<int> epochs_to_reach(const std::vector<double>& history, double threshold) {
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (history[i] >= threshold) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

namespace {

std::string beta_label(double beta) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", beta);
  return buf;
}

std::string cell_name(const AblationCell& c) {
  return repr::to_string(c.variant) + "_beta" + beta_label(c.beta) + "_" + (c.refined_prior ? "refined" : "random");
}

}  // namespace

std::vector<AblationGroup> AblationReport::groups() const {
  std::map<std::string, AblationGroup> by_name;
  std::vector<std::string> order;
  for (const auto& c : cells) {
    const auto name = cell_name(c);
    if (!by_name.count(name)) {
      order.push_back(name);
      by_name[name] = AblationGroup{c.variant, c.beta, c.refined_prior, {}, 0.0, 0.0, 0.0};
    }
    by_name[name].cells.push_back(&c);
  }
  std::vector<AblationGroup> out;
  for (const auto& name : order) {
    auto g = by_name[name];
    const double k = static_cast<double>(g.cells.size());
    double finals = 0.0, epochs = 0.0;
    for (const auto* c : g.cells) {
      finals += c->final_success.value_or(c->success_history.empty() ? 0.0 : c->success_history.back());
      const auto e = epochs_to_reach(c->success_history, 0.5);
      epochs += e ? *e : static_cast<double>(c->success_history.size()) + 1.0;
    }
    g.mean_final = finals / k;
    g.mean_epochs_to_half = epochs / k;
    double var_sum = 0.0;
    int var_epochs = 0;
    for (std::size_t e = 0; e < 3; ++e) {
      std::vector<double> vals;
      for (const auto* c : g.cells) {
        if (e < c->success_history.size()) vals.push_back(c->success_history[e]);
      }
      if (vals.size() < 2) continue;
      double m = 0.0;
      for (double v : vals) m += v;
      m /= static_cast<double>(vals.size());
      double v2 = 0.0;
      for (double v : vals) v2 += (v - m) * (v - m);
      var_sum += v2 / static_cast<double>(vals.size() - 1);
      ++var_epochs;
    }
    g.early_variance = var_epochs ? var_sum / var_epochs : 0.0;
    out.push_back(std::move(g));
  }
  return out;
}

std::string AblationReport::to_json() const {
  json jc = json::array();
  for (const auto& c : cells) {
    jc.push_back({{"variant", repr::to_string(c.variant)},
                  {"beta", c.beta},
                  {"prior", c.refined_prior ? "refined" : "random"},
                  {"seed", c.seed},
                  {"final_success", c.final_success ? json(*c.final_success) : json(nullptr)},
                  {"success_history", c.success_history}});
  }
  json jg = json::array();
  for (const auto& g : groups()) {
    jg.push_back({{"variant", repr::to_string(g.variant)},
                  {"beta", g.beta},
                  {"prior", g.refined_prior ? "refined" : "random"},
                  {"seeds", g.cells.size()},
                  {"mean_final", g.mean_final},
                  {"mean_epochs_to_half", g.mean_epochs_to_half},
                  {"early_variance", g.early_variance}});
  }
  return json{{"cells", jc}, {"groups", jg}}.dump(2);
}

std::string AblationReport::table() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %5s %-8s %5s %10s %14s %14s\n", "variant", "beta", "prior", "seeds",
                "mean_final", "epochs_to_0.5", "early_var");
  out << line;
  for (const auto& g : groups()) {
    std::snprintf(line, sizeof line, "%-10s %5.2f %-8s %5zu %10.4f %14.2f %14.5f\n",
                  repr::to_string(g.variant).c_str(), g.beta, g.refined_prior ? "refined" : "random",
                  g.cells.size(), g.mean_final, g.mean_epochs_to_half, g.early_variance);
    out << line;
  }
  return out.str();
}

AblationReport ablate(const RunConfig& config, const AblationGrid& grid, bool verbose) {
  if (config.feedback.source != "oracle") throw std::invalid_argument("ablate requires an oracle feedback source");
  AblationReport report;
  for (auto variant : grid.variants) {
    for (double beta : grid.betas) {
      for (bool refined : grid.refined_priors) {
        for (auto seed : grid.seeds) {
          AblationCell cell{variant, beta, refined, seed, std::nullopt, {}};
          RunConfig c = config;
          c.reward = variant;
          c.pi_hero.beta = beta;
          c.pi_hero.refined_prior = refined;
          c.seed = seed;
          c.run_dir = config.run_dir / cell_name(cell) / ("seed-" + std::to_string(seed));
          if (verbose) std::cerr << "ablate: " << c.run_dir.string() << "\n";
          const auto result = hero_train(c);
          cell.final_success = result.final_success;
          cell.success_history = result.state.success_history;
          report.cells.push_back(std::move(cell));
        }
      }
    }
  }
  return report;
}

}  // namespace hero::run
