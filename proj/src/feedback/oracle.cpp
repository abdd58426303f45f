// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/feedback/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace hero::feedback {

std::string to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::region2d: return "region-2d";
    case OracleKind::scorer2d: return "scorer-2d";
    case OracleKind::image_predicate: return "image-predicate";
  }
  return "unknown";
}

OracleKind oracle_kind_from_string(const std::string& s) {
  if (s == "region-2d") return OracleKind::region2d;
  if (s == "scorer-2d") return OracleKind::scorer2d;
  if (s == "image-predicate") return OracleKind::image_predicate;
  throw std::invalid_argument("unknown oracle kind '" + s + "'");
}

double oracle_score(const OracleSpec& o, std::span<const double> z) {
  switch (o.kind) {
    case OracleKind::region2d: {
      if (z.size() != o.center.size()) throw std::invalid_argument("region oracle: dimension mismatch");
      double d2 = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) d2 += (z[i] - o.center[i]) * (z[i] - o.center[i]);
      return -std::sqrt(d2);
    }
    case OracleKind::scorer2d: {
      if (!o.weights.empty() && o.weights.size() != z.size()) {
        throw std::invalid_argument("scorer oracle: dimension mismatch");
      }
      double s = o.bias;
      for (std::size_t i = 0; i < o.weights.size(); ++i) s += o.weights[i] * z[i];
      return s;
    }
    case OracleKind::image_predicate: {
      if (z.size() != 64) throw std::invalid_argument("image oracle: expected 64 pixels");
      double first = 0.0, second = 0.0;
      for (std::size_t r = 0; r < 8; ++r) {
        for (std::size_t c = 0; c < 8; ++c) {
          const double px = std::clamp((z[r * 8 + c] + 1.0) / 2.0, 0.0, 1.0);
          const bool in_first = o.predicate == "top-heavy" ? r < 4 : c < 4;
          (in_first ? first : second) += px;
        }
      }
      if (o.predicate != "left-heavy" && o.predicate != "top-heavy") {
        throw std::invalid_argument("unknown image predicate '" + o.predicate + "'");
      }
      return (first - second) / 32.0;
    }
  }
  return 0.0;
}

bool oracle_accepts(const OracleSpec& o, std::span<const double> z) {
  const double s = oracle_score(o, z);
  if (o.kind == OracleKind::region2d) return -s <= o.radius;
  return s >= o.threshold;
}

OracleSpec oracle_preset(const std::string& name) {
  OracleSpec o;
  o.name = name;
  if (name.size() == 5 && name.rfind("mode", 0) == 0 && name[4] >= '0' && name[4] <= '7') {
    const double a = 2.0 * std::numbers::pi * (name[4] - '0') / 8.0;
    o.kind = OracleKind::region2d;
    o.center = {2.0 * std::cos(a), 2.0 * std::sin(a)};
    o.radius = 0.5;
    return o;
  }
  if (name == "right-half") {
    o.kind = OracleKind::scorer2d;
    o.weights = {1.0, 0.0};
    o.threshold = 0.0;
    return o;
  }
  if (name == "accept-all") {
    o.kind = OracleKind::scorer2d;
    o.weights.clear();
    o.threshold = 0.0;
    return o;
  }
  if (name == "left-heavy" || name == "top-heavy") {
    o.kind = OracleKind::image_predicate;
    o.predicate = name;
    o.threshold = 0.05;
    return o;
  }
  throw std::invalid_argument("unknown oracle preset '" + name + "'");
}

BatchAnnotation oracle_annotate(int epoch, const std::vector<int>& ids,
                                const std::vector<std::vector<double>>& z0,
                                const OracleSpec& oracle) {
  if (ids.size() != z0.size()) throw std::invalid_argument("oracle_annotate: ids/samples length mismatch");
  std::vector<bool> flags(ids.size());
  std::optional<int> best;
  double best_score = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    flags[i] = oracle_accepts(oracle, z0[i]);
    if (!flags[i]) continue;
    const double s = oracle_score(oracle, z0[i]);
    if (!best || s > best_score || (s == best_score && ids[i] < *best)) {
      best = ids[i];
      best_score = s;
    }
  }
  return make_annotation(epoch, ids, flags, best, oracle.name.empty() ? "oracle" : oracle.name);
}

double success_rate(const std::vector<std::vector<double>>& z0, const OracleSpec& oracle) {
  if (z0.empty()) throw std::invalid_argument("success_rate: empty sample list");
  std::size_t good = 0;
  for (const auto& z : z0) good += oracle_accepts(oracle, z) ? 1 : 0;
  return static_cast<double>(good) / static_cast<double>(z0.size());
}

}  // namespace hero::feedback
