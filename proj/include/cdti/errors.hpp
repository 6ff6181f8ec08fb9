#pragma once

#include <stdexcept>
#include <string>

namespace cdti {

/// Thrown when an enumeration or exact-sum operation would exceed its
/// combinatorial size guard.
struct capacity_error : std::runtime_error {
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a root bracket cannot be established; the message carries the
/// function values at the attempted bracket ends.
struct bracket_error : std::runtime_error {
  explicit bracket_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a sampler is asked to target a parameter point in the
/// divergent region without an explicit override.
struct divergent_region_error : std::runtime_error {
  explicit divergent_region_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cdti
