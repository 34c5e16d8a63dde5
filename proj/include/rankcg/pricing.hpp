#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rankcg/core.hpp"

namespace rankcg::pricing {

struct RewardedTransaction {
  ProductSet offer;
  ProductSet bundle;
  double mu = 0.0;
};

/// The generalized linear ordering subproblem: find (σ, η) maximizing the sum
/// of μ_t over transactions t with π((σ, η), S_t) = B_t.
class PricingInstance {
 public:
  /// Drops zero-reward transactions. Throws std::invalid_argument when n is
  /// outside 1..63, eta_max outside 1..n, q < 1, or a transaction is invalid.
  PricingInstance(int n, int eta_max, std::optional<int> q,
                  std::vector<RewardedTransaction> transactions);

  int n() const { return n_; }
  int eta_max() const { return eta_max_; }
  std::optional<int> q() const { return q_; }
  /// List-length cap, n when unlimited.
  int length_cap() const { return q_ ? std::min(*q_, n_) : n_; }
  std::size_t size() const { return txns_.size(); }
  const std::vector<RewardedTransaction>& transactions() const { return txns_; }

  double mu(std::size_t t) const { return txns_[t].mu; }
  int bundle_size(std::size_t t) const { return bundle_size_[t]; }
  std::uint64_t offer_mask(std::size_t t) const { return offer_mask_[t]; }
  std::uint64_t bundle_mask(std::size_t t) const { return bundle_mask_[t]; }
  std::uint64_t rest_mask(std::size_t t) const { return offer_mask_[t] & ~bundle_mask_[t]; }
  /// Transactions whose offer contains product j.
  const std::vector<int>& touching(Product j) const { return touching_[j]; }
  std::uint64_t universe() const { return universe_; }

 private:
  int n_;
  int eta_max_;
  std::optional<int> q_;
  std::vector<RewardedTransaction> txns_;
  std::vector<int> bundle_size_;
  std::vector<std::uint64_t> offer_mask_;
  std::vector<std::uint64_t> bundle_mask_;
  std::vector<std::vector<int>> touching_;
  std::uint64_t universe_ = 0;
};

/// Per-transaction status: -1 closed, otherwise the number of bundle items
/// met so far (reward collected once it equals |B_t|).
using Kappa = std::int8_t;
constexpr Kappa kClosed = -1;

struct Label {
  Product last = 0;  // 0 for root labels
  std::uint64_t visited = 0;
  std::uint64_t unreachable = 0;
  int eta = 0;
  double profit = 0.0;
  int length = 0;
  std::vector<Kappa> kappa;
  long pred = -1;  // index into the solver's label pool
};

/// One root label per η ∈ {1..eta_max}.
std::vector<Label> init_labels(const PricingInstance& inst);
Label root_label(const PricingInstance& inst, int eta);

/// U(L) ∪ U(pred): products outside N(L) whose insertion can no longer raise
/// the profit of any completion.
std::uint64_t unreachable_update(const Label& label, const PricingInstance& inst);

/// L ⊕ j. Throws std::invalid_argument if j ∈ N(L) ∪ U(L), j is outside the
/// universe, or the list is already at the length cap.
Label extend(const Label& label, Product j, const PricingInstance& inst,
             bool track_unreachable = true);

/// p(L) plus every positive reward still collectable minus every negative
/// reward still losable.
double completion_bound(const Label& label, const PricingInstance& inst);
bool completion_bound_prune(const Label& label, double lower_bound, const PricingInstance& inst);

struct DominanceOptions {
  /// Require N(L) ∪ U(L) ⊆ N(L') ∪ U(L'). Dropping it is only valid when
  /// every label has η = 1.
  bool require_inclusion = true;
};

/// True when every completion of `other` is matched or beaten by the same
/// completion of `label`.
bool dominates(const Label& label, const Label& other, const PricingInstance& inst,
               DominanceOptions opts = {});

enum class QueueOrder { BestBound, Fifo };

struct PricingOptions {
  bool completion_bounds = true;
  bool unreachable = true;
  bool dominance = true;
  /// Profit-only dominance for η = 1 instances.
  bool single_purchase = false;
  /// Heuristic bucket pruning: at most this many labels are extended per
  /// (last product, length, η) bucket.
  std::optional<int> bucket_cap;
  QueueOrder order = QueueOrder::BestBound;
  /// Wall-clock budget in seconds; the result is flagged incomplete on expiry.
  std::optional<double> time_limit;
};

struct PricingResult {
  ConsumerType best_type;
  double best_profit = 0.0;
  long labels_generated = 0;
  long labels_dominated = 0;
  long labels_pruned = 0;
  double wall_time = 0.0;
  bool complete = true;
};

/// Labeling algorithm. When `seed` is supplied its replayed profit is the
/// initial incumbent and lower bound; it is returned if nothing beats it.
PricingResult solve_pricing(const PricingInstance& inst, const PricingOptions& opts = {},
                            const std::optional<ConsumerType>& seed = std::nullopt);

/// Bucket-pruned labeling; the result is feasible but not necessarily optimal.
PricingResult solve_pricing_heuristic(const PricingInstance& inst, int bucket_cap,
                                      const std::optional<ConsumerType>& seed = std::nullopt);

/// Labels obtained by appending σ one product at a time from the root of
/// capacity c.eta (passive types map to the η = 1 root). Unreachable products
/// are not enforced. The first entry is the root.
std::vector<Label> replay(const PricingInstance& inst, const ConsumerType& c);

/// Σ μ_t over transactions compatible with c, via the label recursion.
double replay_profit(const PricingInstance& inst, const ConsumerType& c);

/// Σ μ_t over transactions compatible with c, via the choice rule directly.
double direct_profit(const PricingInstance& inst, const ConsumerType& c);

}  // namespace rankcg::pricing
