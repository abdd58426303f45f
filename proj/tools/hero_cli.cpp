// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: pretrain, train, generate, eval, ablate, diag.

#include <pthread.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "hero/noise/diagnostics.hpp"
#include "hero/run/checkpoint.hpp"
#include "hero/run/eval.hpp"
#include "hero/run/service.hpp"
#include "hero/run/train.hpp"
#include "json.hpp"

namespace {

using namespace hero;
using nlohmann::json;

int cmd_pretrain(const std::string& config_path, const std::string& out) {
  const auto config = config_path.empty() ? run::BaseConfig{} : run::load_base_config(config_path);
  diffusion::PretrainResult result;
  const auto model = run::pretrain_base(config, &result);
  const auto path = run::save_base(model, out);
  const double last = result.loss_history.empty() ? 0.0 : result.loss_history.back();
  std::cout << json{{"checkpoint", path.string()}, {"steps", result.loss_history.size()}, {"final_loss", last}}.dump(2)
            << "\n";
  return 0;
}

void print_result(const run::RunResult& r) {
  json out = {{"epochs", r.state.epoch},
              {"n_fb", r.state.n_fb},
              {"phase", feedback::to_string(r.state.phase)},
              {"success_history", r.state.success_history},
              {"interrupted", r.interrupted}};
  out["final_success"] = r.final_success ? json(*r.final_success) : json(nullptr);
  std::cout << out.dump(2) << "\n";
}

int cmd_train(const std::string& config_path, int serve_port, bool verbose) {
  auto config = run::load_run_config(config_path);
  if (serve_port < 0) {
    if (config.feedback.source != "oracle") {
      std::cerr << "config selects service feedback; pass --serve PORT\n";
      return 2;
    }
    run::TrainOptions options;
    options.verbose = verbose;
    print_result(run::hero_train(config, options));
    return 0;
  }

  // Signals are taken by a dedicated thread so shutdown never runs inside a handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  config.feedback.source = "service";
  config.feedback.port = serve_port;
  feedback::FeedbackHub hub;
  run::FeedbackServer server(hub);
  const int port = server.start("127.0.0.1", serve_port);
  std::cerr << "feedback service on http://127.0.0.1:" << port << "\n";

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    hub.shutdown();
  });

  run::TrainOptions options;
  options.source = &hub;
  options.hub = &hub;
  options.verbose = true;
  int code = 0;
  try {
    print_result(run::hero_train(config, options));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = 1;
  }
  if (!hub.is_shut_down()) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  server.stop();
  return code;
}

int cmd_generate(const std::string& run_dir, std::size_t n, bool standard_prior, const std::string& out,
                 std::optional<std::uint64_t> seed) {
  const auto samples = run::generate_final(run_dir, n, !standard_prior, seed);
  const std::filesystem::path file = out.empty() ? std::filesystem::path(run_dir) / "samples.json" : std::filesystem::path(out);
  run::write_samples(samples, file);
  std::cout << json{{"samples", samples.z_0.size()}, {"file", file.string()}, {"prior", samples.prior}}.dump(2) << "\n";
  return 0;
}

int cmd_eval(const std::string& path, const std::string& oracle, std::size_t n, bool standard_prior,
             std::optional<std::uint64_t> seed) {
  const auto report = run::evaluate(path, feedback::oracle_preset(oracle), n, seed, !standard_prior);
  std::cout << run::to_json(report) << "\n";
  return 0;
}

int cmd_ablate(const std::string& config_path, const std::string& grid_spec, const std::string& out, bool verbose) {
  const auto config = run::load_run_config(config_path);
  const auto report = run::ablate(config, run::parse_grid(grid_spec, config), verbose);
  std::cout << report.table();
  const std::filesystem::path file = out.empty() ? config.run_dir / "ablation.json" : std::filesystem::path(out);
  std::filesystem::create_directories(file.parent_path().empty() ? "." : file.parent_path());
  run::write_file_atomic(file, report.to_json());
  std::cout << "report: " << file.string() << "\n";
  return 0;
}

int cmd_concentration(std::size_t dim, double eps2, std::size_t n, std::uint64_t seed, bool sphere) {
  Rng rng(seed);
  const auto r = noise::concentration_diagnostic(dim, eps2, n, rng,
                                                 sphere ? noise::MeansSource::sphere : noise::MeansSource::prior);
  std::cout << json{{"fraction", r.fraction}, {"dim", r.dim}, {"eps2", r.eps2}, {"n", r.n},
                    {"components", r.components}, {"means", sphere ? "sphere" : "prior"}}
                   .dump(2)
            << "\n";
  return 0;
}

int cmd_info_link(const std::string& path, int steps, std::size_t n, double eta, std::uint64_t seed) {
  const std::filesystem::path p(path);
  const bool is_run = std::filesystem::is_directory(p) && run::has_checkpoint(p);
  diffusion::SamplerConfig sampler = is_run ? run::load_run_config(p / run::kConfigFileName).sampler
                                            : diffusion::SamplerConfig{};
  sampler.steps = steps;
  if (eta >= 0.0) sampler.eta = eta;
  const auto base = is_run ? run::load_run(p).base : run::load_base(p);
  Rng rng(seed);
  const auto r = noise::info_link_diagnostic(base.net, base.schedule, sampler, n, 0, rng);
  std::cout << json{{"score", r.score}, {"shuffled_score", r.shuffled_score}, {"threshold", r.threshold},
                    {"steps", r.steps}, {"n", r.n}, {"eta", sampler.eta}, {"dependent", r.score > r.threshold}}
                   .dump(2)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hero: online fine-tuning of a toy diffusion model from sparse feedback"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "progress on stderr");

  std::string config, out, run_dir, oracle = "mode0", grid, path;
  int serve = -1, steps = 50;
  std::size_t n = 64, dim = 1024;
  double eps2 = 0.1, eta = -1.0;
  bool standard_prior = false, sphere = false;
  std::uint64_t diag_seed = 0;
  std::optional<std::uint64_t> seed;

  auto* pre = app.add_subcommand("pretrain", "train a base denoiser");
  pre->add_option("--config", config, "base config JSON (defaults when omitted)");
  pre->add_option("--out", out, "output directory")->required();

  auto* train = app.add_subcommand("train", "run the online fine-tuning loop");
  train->add_option("--config", config, "run config JSON")->required();
  train->add_option("--serve", serve, "collect feedback over HTTP on this port (0 picks one)");

  auto* gen = app.add_subcommand("generate", "sample from a finished run");
  gen->add_option("--run", run_dir, "run directory")->required();
  gen->add_option("--n", n, "number of samples");
  gen->add_flag("--standard-prior", standard_prior, "draw z_T from N(0, I) instead of the refined prior");
  gen->add_option("--out", out, "samples file (default <run>/samples.json)");
  gen->add_option("--seed", seed, "sampling seed (default: run seed)");

  auto* ev = app.add_subcommand("eval", "oracle success rate of fresh samples");
  ev->add_option("--run", path, "run directory or base checkpoint")->required();
  ev->add_option("--oracle", oracle, "oracle preset");
  ev->add_option("--n", n, "number of samples");
  ev->add_flag("--standard-prior", standard_prior, "draw z_T from N(0, I)");
  ev->add_option("--seed", seed, "sampling seed");

  auto* abl = app.add_subcommand("ablate", "run a grid of oracle-driven runs");
  abl->add_option("--config", config, "run config JSON")->required();
  abl->add_option("--grid", grid, "e.g. variant=best,binary;beta=0.5,1.0;prior=refined,random;seeds=0,1,2");
  abl->add_option("--out", out, "report file (default <run_dir>/ablation.json)");

  auto* diag = app.add_subcommand("diag", "diagnostics");
  diag->require_subcommand(1);
  auto* conc = diag->add_subcommand("concentration", "shell concentration of the noise mixture");
  conc->add_option("--dim", dim, "dimension");
  conc->add_option("--eps2", eps2, "component variance");
  conc->add_option("--n", n, "samples");
  conc->add_option("--seed", diag_seed, "seed");
  conc->add_flag("--sphere", sphere, "place means on the sqrt(D) sphere");
  auto* link = diag->add_subcommand("info-link", "dependence between z_T and z_0");
  link->add_option("--run", path, "run directory or base checkpoint")->required();
  link->add_option("--steps", steps, "sampler steps");
  link->add_option("--n", n, "trajectories");
  link->add_option("--eta", eta, "override sampler eta");
  link->add_option("--seed", diag_seed, "seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*pre) return cmd_pretrain(config, out);
    if (*train) return cmd_train(config, serve, verbose);
    if (*gen) return cmd_generate(run_dir, n, standard_prior, out, seed);
    if (*ev) return cmd_eval(path, oracle, n, standard_prior, seed);
    if (*abl) return cmd_ablate(config, grid, out, verbose);
    if (*conc) return cmd_concentration(dim, eps2, n, diag_seed, sphere);
    if (*link) return cmd_info_link(path, steps, n, eta, diag_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
