#pragma once

#include <optional>

#include "rankcg/pricing.hpp"

namespace rankcg::oracle {

struct OracleConfig {
  int n_limit = 8;
  /// Defaults to the instance's eta_max / q when unset.
  std::optional<int> eta_max;
  std::optional<int> q;
};

/// Exhaustive search over every duplicate-free list and every capacity,
/// scoring each candidate with the choice rule. Ties go to the
/// lexicographically smallest (η, σ). Throws std::invalid_argument when the
/// universe exceeds n_limit or n_limit exceeds 9.
pricing::PricingResult brute_force_glop(const pricing::PricingInstance& inst,
                                        const OracleConfig& cfg = {});

}  // namespace rankcg::oracle
