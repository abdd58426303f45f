// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/feedback/log.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace hero::feedback {

using nlohmann::json;

BatchAnnotation FeedbackLogEntry::annotation() const {
  std::vector<int> ids;
  std::vector<bool> flags;
  for (const auto& r : records) {
    ids.push_back(r.id);
    flags.push_back(r.good);
  }
  return make_annotation(epoch, ids, flags, best, annotator);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string to_json_line(const FeedbackLogEntry& e) {
  json records = json::array();
  for (const auto& r : e.records) {
    records.push_back({{"id", r.id}, {"label", r.good ? "good" : "bad"}, {"z_T", r.z_T}, {"z_0", r.z_0}});
  }
  json j = {{"epoch", e.epoch},
            {"records", records},
            {"best_id", e.best ? json(*e.best) : json(nullptr)},
            {"annotator", e.annotator},
            {"timestamp", e.timestamp}};
  return j.dump();
}

FeedbackLogEntry from_json_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    FeedbackLogEntry e;
    e.epoch = j.at("epoch").get<int>();
    for (const auto& r : j.at("records")) {
      SampleRecord rec;
      rec.id = r.at("id").get<int>();
      const auto label = r.at("label").get<std::string>();
      if (label != "good" && label != "bad") throw std::runtime_error("label must be good or bad");
      rec.good = label == "good";
      rec.z_T = r.at("z_T").get<std::vector<double>>();
      rec.z_0 = r.at("z_0").get<std::vector<double>>();
      e.records.push_back(std::move(rec));
    }
    if (!j.at("best_id").is_null()) e.best = j.at("best_id").get<int>();
    e.annotator = j.value("annotator", "");
    e.timestamp = j.value("timestamp", "");
    return e;
  } catch (const json::exception& ex) {
    throw std::runtime_error(ex.what());
  }
}

void log_feedback(const FeedbackLogEntry& entry, const std::filesystem::path& run_dir) {
  if (!std::filesystem::is_directory(run_dir)) {
    throw std::runtime_error("log_feedback: run directory '" + run_dir.string() + "' does not exist");
  }
  std::ofstream out(run_dir / kFeedbackLogName, std::ios::app);
  if (!out) throw std::runtime_error("log_feedback: cannot open feedback log in " + run_dir.string());
  out << to_json_line(entry) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("log_feedback: write failed");
}

std::vector<FeedbackLogEntry> load_feedback(const std::filesystem::path& run_dir) {
  std::vector<FeedbackLogEntry> entries;
  std::ifstream in(run_dir / kFeedbackLogName);
  if (!in) return entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      entries.push_back(from_json_line(line));
    } catch (const std::exception& ex) {
      throw std::runtime_error("feedback log line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return entries;
}

}  // namespace hero::feedback
