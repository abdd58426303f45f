// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/common/rng.hpp"

#include <sstream>
#include <stdexcept>

namespace hero {

std::string Rng::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << engine_ << ' ' << normal_ << ' ' << uniform_;
  return os.str();
}

Rng Rng::deserialize(const std::string& state) {
  Rng rng;
  std::istringstream is(state);
  is >> rng.engine_ >> rng.normal_ >> rng.uniform_;
  if (is.fail()) throw std::runtime_error("Rng: corrupt serialized state");
  return rng;
}

}  // namespace hero
