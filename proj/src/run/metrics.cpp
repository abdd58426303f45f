// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/run/metrics.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hero/run/config.hpp"

namespace hero::run {

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

}  // namespace

std::string to_csv_row(const EpochMetrics& m) {
  std::ostringstream out;
  out << m.epoch << ',' << m.n_fb << ',' << m.n_good << ',' << num(m.success_rate) << ','
      << num(m.mean_reward) << ',' << num(m.best_reward) << ',' << num(m.min_reward) << ','
      << num(m.max_reward) << ',' << num(m.mean_advantage) << ',' << num(m.ddpo_loss) << ','
      << num(m.clip_fraction) << ',' << num(m.mean_ratio) << ',' << num(m.embed_loss);
  return out.str();
}

EpochMetrics from_csv_row(const std::string& row) {
  std::vector<std::string> f;
  std::stringstream ss(row);
  for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
  if (f.size() != 13) throw std::invalid_argument("metrics row has " + std::to_string(f.size()) + " fields, expected 13");
  EpochMetrics m;
  m.epoch = std::stoi(f[0]);
  m.n_fb = std::stol(f[1]);
  m.n_good = std::stoi(f[2]);
  m.success_rate = parse_double(f[3]);
  m.mean_reward = parse_double(f[4]);
  m.best_reward = parse_double(f[5]);
  m.min_reward = parse_double(f[6]);
  m.max_reward = parse_double(f[7]);
  m.mean_advantage = parse_double(f[8]);
  m.ddpo_loss = parse_double(f[9]);
  m.clip_fraction = parse_double(f[10]);
  m.mean_ratio = parse_double(f[11]);
  m.embed_loss = parse_double(f[12]);
  return m;
}

void append_metrics(const std::filesystem::path& file, const EpochMetrics& m) {
  const bool fresh = !std::filesystem::exists(file);
  std::ofstream out(file, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to " + file.string());
  if (fresh) out << kMetricsHeader << '\n';
  out << to_csv_row(m) << '\n';
}

std::vector<EpochMetrics> load_metrics(const std::filesystem::path& file) {
  std::vector<EpochMetrics> rows;
  if (!std::filesystem::exists(file)) return rows;
  std::ifstream in(file);
  std::string line;
  if (!std::getline(in, line)) return rows;
  if (line != kMetricsHeader) throw std::runtime_error(file.string() + ": unexpected metrics header");
  for (int n = 2; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    try {
      rows.push_back(from_csv_row(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(file.string() + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  return rows;
}

void truncate_metrics(const std::filesystem::path& file, std::size_t rows) {
  auto all = load_metrics(file);
  if (all.size() <= rows) return;
  std::string out = std::string(kMetricsHeader) + "\n";
  for (std::size_t i = 0; i < rows; ++i) out += to_csv_row(all[i]) + "\n";
  write_file_atomic(file, out);
}

}  // namespace hero::run
