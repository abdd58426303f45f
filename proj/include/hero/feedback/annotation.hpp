// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hero::feedback {

/// Raised when an annotation breaks the partition or best-in-good rules.
class AnnotationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One epoch's verdicts over a batch. Sample ids are the batch positions
/// 0..n-1 of that epoch.
struct BatchAnnotation {
  int epoch = 0;
  std::vector<int> ids;
  std::vector<int> good;  // ascending
  std::vector<int> bad;   // ascending
  std::optional<int> best;
  std::string annotator;

  bool is_good(int id) const;
  bool operator==(const BatchAnnotation&) const = default;
};

/// Throws AnnotationError unless good and bad partition ids and best is a
/// member of good exactly when good is nonempty.
void validate(const BatchAnnotation& annotation);

/// Builds an annotation from per-id labels; `good_flags[i]` labels `ids[i]`.
BatchAnnotation make_annotation(int epoch, const std::vector<int>& ids,
                                const std::vector<bool>& good_flags, std::optional<int> best,
                                std::string annotator);

}  // namespace hero::feedback
