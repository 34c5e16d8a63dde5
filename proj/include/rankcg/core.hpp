#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rankcg {

/// Products are 1-based indices into the universe {1..n}.
using Product = int;

/// A set of products stored as a strictly increasing sequence.
using ProductSet = std::vector<Product>;

/// Raised when input data violates a documented invariant.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sorts and deduplicates `items` into canonical set order.
ProductSet make_set(std::vector<Product> items);

bool is_subset(std::span<const Product> a, std::span<const Product> b);
bool contains(std::span<const Product> set, Product j);

/// Bitmask over products 1..63 (bit j set for product j).
std::uint64_t to_mask(std::span<const Product> set);

struct Transaction {
  ProductSet offer;
  ProductSet bundle;

  /// Validates and canonicalizes. Throws DataError when the offer is empty
  /// or the bundle is not a subset of the offer.
  static Transaction make(std::vector<Product> offer, std::vector<Product> bundle);

  friend auto operator<=>(const Transaction&, const Transaction&) = default;
};

struct TransactionLog {
  int n = 0;
  std::vector<Transaction> transactions;
  long no_arrival_periods = 0;

  long purchase_periods() const;
  long no_purchase_periods() const;
  /// Throws DataError when a product index falls outside {1..n}.
  void validate() const;
};

/// A ranked list plus a purchase capacity. The passive consumer is (σ=(), η=0).
struct ConsumerType {
  std::vector<Product> sigma;
  int eta = 0;

  static ConsumerType passive() { return {}; }
  bool is_passive() const { return sigma.empty(); }

  /// Behaviourally equivalent representative: η is clipped to |σ|, and an
  /// empty list collapses to the passive type.
  ConsumerType canonical() const;
  /// Throws DataError on repeated products, out-of-range ids or a bad η.
  void validate(int n) const;

  friend auto operator<=>(const ConsumerType&, const ConsumerType&) = default;
};

struct ChoiceModel {
  std::vector<ConsumerType> types;
  std::vector<double> probs;
  double lambda = 1.0;

  /// Checks the simplex, duplicate-free types, and λ ∈ (0,1].
  void validate(int n) const;
  int max_eta() const;
};

/// π(c, S): the first min(η, |σ ∩ S|) products of σ that are offered.
ProductSet purchase_outcome(const ConsumerType& c, std::span<const Product> offer);

/// True iff π(c, S_t) = B_t. Allocation-free.
bool is_compatible(const ConsumerType& c, std::span<const Product> offer,
                   std::span<const Product> bundle);
inline bool is_compatible(const ConsumerType& c, const Transaction& t) {
  return is_compatible(c, t.offer, t.bundle);
}

/// Empirical bundle frequencies per distinct offer.
struct DistinctMarket {
  struct Row {
    ProductSet offer;
    ProductSet bundle;
    double v = 0.0;
    long count = 0;
  };
  std::vector<Row> rows;  // sorted by (offer, bundle)

  std::size_t size() const { return rows.size(); }
};

DistinctMarket empirical_probabilities(const TransactionLog& log);

/// Σ of x_c over the types compatible with (S, B).
double predicted_probability(const ChoiceModel& model, std::span<const Product> bundle,
                             std::span<const Product> offer);

/// Bundle distribution induced by `model` on `offer`.
std::map<ProductSet, double> bundle_distribution(const ChoiceModel& model,
                                                 std::span<const Product> offer);

/// λ* = (|P_p| + |P_0|) / (|P_p| + |P_0| + |P_λ̄|).
double estimate_arrival_rate(const TransactionLog& log);

/// Transactions grouped by identical (S, B), with multiplicities.
struct WeightedTransaction {
  Transaction txn;
  long count = 0;
};
std::vector<WeightedTransaction> aggregate(const TransactionLog& log);

}  // namespace rankcg
