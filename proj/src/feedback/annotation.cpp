// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/feedback/annotation.hpp"

#include <algorithm>
#include <set>

namespace hero::feedback {

bool BatchAnnotation::is_good(int id) const {
  return std::binary_search(good.begin(), good.end(), id);
}

void validate(const BatchAnnotation& a) {
  std::set<int> ids(a.ids.begin(), a.ids.end());
  if (ids.size() != a.ids.size()) throw AnnotationError("duplicate sample ids in batch");
  std::set<int> seen;
  for (const auto* group : {&a.good, &a.bad}) {
    for (int id : *group) {
      if (!ids.count(id)) throw AnnotationError("label for unknown sample id " + std::to_string(id));
      if (!seen.insert(id).second) throw AnnotationError("sample id " + std::to_string(id) + " labeled twice");
    }
  }
  if (seen.size() != ids.size()) {
    throw AnnotationError("labels incomplete: " + std::to_string(seen.size()) + " of " +
                          std::to_string(ids.size()) + " samples labeled");
  }
  if (a.good.empty()) {
    if (a.best) throw AnnotationError("best given but no sample is labeled good");
  } else {
    if (!a.best) throw AnnotationError("good samples present but best is missing");
    if (!a.is_good(*a.best)) throw AnnotationError("best id " + std::to_string(*a.best) + " is not labeled good");
  }
}

BatchAnnotation make_annotation(int epoch, const std::vector<int>& ids,
                                const std::vector<bool>& good_flags, std::optional<int> best,
                                std::string annotator) {
  if (ids.size() != good_flags.size()) throw AnnotationError("ids and labels differ in length");
  BatchAnnotation a;
  a.epoch = epoch;
  a.ids = ids;
  a.best = best;
  a.annotator = std::move(annotator);
  for (std::size_t i = 0; i < ids.size(); ++i) (good_flags[i] ? a.good : a.bad).push_back(ids[i]);
  std::sort(a.good.begin(), a.good.end());
  std::sort(a.bad.begin(), a.bad.end());
  return a;
}

}  // namespace hero::feedback
