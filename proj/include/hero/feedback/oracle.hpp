// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "hero/feedback/annotation.hpp"

namespace hero::feedback {

enum class OracleKind { region2d, scorer2d, image_predicate };

/// Scripted stand-in for the human evaluator.
///
///  - region2d: good iff ||z - center|| <= radius; score = -||z - center||.
///  - scorer2d: score = weights . z + bias, good iff score >= threshold. Empty
///    weights score every sample as `bias`.
///  - image_predicate: 8x8 images in [-1, 1]; `predicate` is "left-heavy"
///    (mean brightness of the left half minus the right half) or "top-heavy";
///    good iff score >= threshold.
///
/// The best sample is the good one with the highest score, ties to the lowest id.
struct OracleSpec {
  std::string name;
  OracleKind kind = OracleKind::region2d;
  std::vector<double> center{2.0, 0.0};
  double radius = 0.5;
  std::vector<double> weights;
  double bias = 0.0;
  double threshold = 0.0;
  std::string predicate = "left-heavy";

  bool operator==(const OracleSpec&) const = default;
};

std::string to_string(OracleKind kind);
OracleKind oracle_kind_from_string(const std::string& s);

double oracle_score(const OracleSpec& oracle, std::span<const double> z0);
bool oracle_accepts(const OracleSpec& oracle, std::span<const double> z0);

/// Named presets: "mode0".."mode7" (region of radius 0.5 around an
/// eight-gaussians mode), "right-half", "accept-all", "left-heavy", "top-heavy".
OracleSpec oracle_preset(const std::string& name);

/// Labels samples ids[i] -> z0[i]. An all-bad batch has no best.
BatchAnnotation oracle_annotate(int epoch, const std::vector<int>& ids,
                                const std::vector<std::vector<double>>& z0,
                                const OracleSpec& oracle);

/// Fraction of samples the oracle accepts. Throws on an empty list.
double success_rate(const std::vector<std::vector<double>>& z0, const OracleSpec& oracle);

}  // namespace hero::feedback
