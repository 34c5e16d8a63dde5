#pragma once

#include <optional>

#include "rankcg/core.hpp"

namespace rankcg::metrics {

/// |B(S, η)| = Σ_{i=0}^{η} C(|S|, i).
long bundle_space_size(int offer_size, int eta);

struct SrmseOptions {
  /// Defaults to max η over the types of both models.
  std::optional<int> eta;
  /// Also count the empty offer (whose only bundle is ∅).
  bool include_empty_offer = false;
};

/// Root mean squared difference of bundle probabilities over every offer
/// S ⊆ {1..n} and every B ∈ B(S, η). Throws std::invalid_argument for n > 12.
double srmse(const ChoiceModel& model, const ChoiceModel& truth, int n,
             const SrmseOptions& opts = {});

/// Out-of-sample bundle RMSE against the observed bundle indicators. η
/// defaults to the largest bundle in `test`. Throws DataError on an empty log.
double hrmse(const ChoiceModel& model, const TransactionLog& test,
             std::optional<int> eta = std::nullopt);

/// Out-of-sample RMSE of marginal purchase probabilities P(j | S_t).
/// Throws DataError on an empty log.
double mrmse(const ChoiceModel& model, const TransactionLog& test);

/// Shifted geometric mean (Π (x_i + σ))^{1/n} − σ, computed in log space.
double shifted_geomean(const std::vector<double>& x, double shift);

}  // namespace rankcg::metrics
