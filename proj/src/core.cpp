#include "rankcg/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace rankcg {

ProductSet make_set(std::vector<Product> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

bool is_subset(std::span<const Product> a, std::span<const Product> b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool contains(std::span<const Product> set, Product j) {
  return std::binary_search(set.begin(), set.end(), j);
}

std::uint64_t to_mask(std::span<const Product> set) {
  std::uint64_t m = 0;
  for (Product j : set) {
    if (j < 1 || j > 63) throw DataError("product id out of bitmask range: " + std::to_string(j));
    m |= std::uint64_t{1} << j;
  }
  return m;
}

Transaction Transaction::make(std::vector<Product> offer, std::vector<Product> bundle) {
  Transaction t{make_set(std::move(offer)), make_set(std::move(bundle))};
  if (t.offer.empty()) throw DataError("transaction has an empty offer set");
  if (!is_subset(t.bundle, t.offer)) throw DataError("bundle is not a subset of the offer set");
  return t;
}

long TransactionLog::purchase_periods() const {
  return std::count_if(transactions.begin(), transactions.end(),
                       [](const Transaction& t) { return !t.bundle.empty(); });
}

long TransactionLog::no_purchase_periods() const {
  return static_cast<long>(transactions.size()) - purchase_periods();
}

void TransactionLog::validate() const {
  if (n < 1) throw DataError("product universe must be non-empty");
  if (no_arrival_periods < 0) throw DataError("negative no-arrival period count");
  for (const auto& t : transactions) {
    if (t.offer.empty()) throw DataError("transaction has an empty offer set");
    if (t.offer.front() < 1 || t.offer.back() > n)
      throw DataError("offer contains a product outside 1..n");
    if (!std::is_sorted(t.offer.begin(), t.offer.end()) ||
        std::adjacent_find(t.offer.begin(), t.offer.end()) != t.offer.end())
      throw DataError("offer is not strictly increasing");
    if (!is_subset(t.bundle, t.offer)) throw DataError("bundle is not a subset of the offer set");
  }
}

ConsumerType ConsumerType::canonical() const {
  if (sigma.empty()) return passive();
  return {sigma, std::min<int>(eta, static_cast<int>(sigma.size()))};
}

void ConsumerType::validate(int n) const {
  if (sigma.empty()) {
    if (eta < 0) throw DataError("negative capacity");
    return;
  }
  if (eta < 1) throw DataError("non-empty preference list needs capacity >= 1");
  if (eta > n) throw DataError("capacity exceeds universe size");
  std::set<Product> seen;
  for (Product j : sigma) {
    if (j < 1 || j > n) throw DataError("preference list product outside 1..n");
    if (!seen.insert(j).second) throw DataError("preference list repeats a product");
  }
}

void ChoiceModel::validate(int n) const {
  if (types.size() != probs.size()) throw DataError("types/probs length mismatch");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DataError("arrival rate must lie in (0,1]");
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw DataError("negative type probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DataError("type probabilities do not sum to 1");
  std::set<ConsumerType> seen;
  for (const auto& c : types) {
    c.validate(n);
    if (!seen.insert(c).second) throw DataError("duplicate consumer type in model");
  }
}

int ChoiceModel::max_eta() const {
  int m = 0;
  for (const auto& c : types) m = std::max(m, c.canonical().eta);
  return m;
}

ProductSet purchase_outcome(const ConsumerType& c, std::span<const Product> offer) {
  ProductSet out;
  for (Product j : c.sigma) {
    if (static_cast<int>(out.size()) >= c.eta) break;
    if (contains(offer, j)) out.push_back(j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_compatible(const ConsumerType& c, std::span<const Product> offer,
                   std::span<const Product> bundle) {
  int taken = 0;
  for (Product j : c.sigma) {
    if (taken >= c.eta) break;
    if (!contains(offer, j)) continue;
    if (!contains(bundle, j)) return false;
    ++taken;
  }
  return taken == static_cast<int>(bundle.size());
}

DistinctMarket empirical_probabilities(const TransactionLog& log) {
  std::map<ProductSet, std::map<ProductSet, long>> counts;
  for (const auto& t : log.transactions) ++counts[t.offer][t.bundle];
  DistinctMarket market;
  for (const auto& [offer, bundles] : counts) {
    long total = 0;
    for (const auto& [b, k] : bundles) total += k;
    for (const auto& [b, k] : bundles)
      market.rows.push_back({offer, b, static_cast<double>(k) / static_cast<double>(total), k});
  }
  return market;
}

double predicted_probability(const ChoiceModel& model, std::span<const Product> bundle,
                             std::span<const Product> offer) {
  double p = 0.0;
  for (std::size_t i = 0; i < model.types.size(); ++i)
    if (is_compatible(model.types[i], offer, bundle)) p += model.probs[i];
  return p;
}

std::map<ProductSet, double> bundle_distribution(const ChoiceModel& model,
                                                 std::span<const Product> offer) {
  std::map<ProductSet, double> dist;
  for (std::size_t i = 0; i < model.types.size(); ++i)
    dist[purchase_outcome(model.types[i], offer)] += model.probs[i];
  return dist;
}

double estimate_arrival_rate(const TransactionLog& log) {
  const auto arrivals = static_cast<double>(log.transactions.size());
  if (arrivals < 1.0) throw DataError("arrival rate is undefined for a log without arrivals");
  return arrivals / (arrivals + static_cast<double>(log.no_arrival_periods));
}

std::vector<WeightedTransaction> aggregate(const TransactionLog& log) {
  std::map<Transaction, long> counts;
  for (const auto& t : log.transactions) ++counts[t];
  std::vector<WeightedTransaction> out;
  out.reserve(counts.size());
  for (const auto& [t, k] : counts) out.push_back({t, k});
  return out;
}

}  // namespace rankcg
