#include "rankcg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rankcg::metrics {

long bundle_space_size(int offer_size, int eta) {
  long total = 0, binom = 1;
  for (int i = 0; i <= std::min(eta, offer_size); ++i) {
    total += binom;
    binom = binom * (offer_size - i) / (i + 1);
  }
  return total;
}

namespace {

// Σ over B ∈ B(S, η) of (p(B) − q(B))²; bundles outside both supports
// contribute zero.
double squared_gap(const std::map<ProductSet, double>& p, const std::map<ProductSet, double>& q,
                   int eta) {
  double acc = 0.0;
  for (const auto& [b, v] : p) {
    if (static_cast<int>(b.size()) > eta) continue;
    const auto it = q.find(b);
    const double d = v - (it == q.end() ? 0.0 : it->second);
    acc += d * d;
  }
  for (const auto& [b, v] : q)
    if (static_cast<int>(b.size()) <= eta && !p.contains(b)) acc += v * v;
  return acc;
}

}  // namespace

double srmse(const ChoiceModel& model, const ChoiceModel& truth, int n, const SrmseOptions& opts) {
  if (n < 1 || n > 12) throw std::invalid_argument("srmse enumerates offers only for 1 <= n <= 12");
  const int eta = opts.eta.value_or(std::max(model.max_eta(), truth.max_eta()));
  double num = 0.0;
  long den = 0;
  if (opts.include_empty_offer) den += 1;  // B(∅) = {∅}; both models buy nothing
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    ProductSet s;
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1u) s.push_back(j + 1);
    num += squared_gap(bundle_distribution(model, s), bundle_distribution(truth, s), eta);
    den += bundle_space_size(static_cast<int>(s.size()), eta);
  }
  return std::sqrt(num / static_cast<double>(den));
}

double hrmse(const ChoiceModel& model, const TransactionLog& test, std::optional<int> eta) {
  if (test.transactions.empty()) throw DataError("hrmse needs a non-empty test log");
  int h = 0;
  for (const auto& t : test.transactions) h = std::max(h, static_cast<int>(t.bundle.size()));
  h = eta.value_or(h);
  std::map<ProductSet, std::map<ProductSet, double>> cache;
  double num = 0.0;
  long den = 0;
  for (const auto& t : test.transactions) {
    auto it = cache.find(t.offer);
    if (it == cache.end()) it = cache.emplace(t.offer, bundle_distribution(model, t.offer)).first;
    const std::map<ProductSet, double> observed{{t.bundle, 1.0}};
    num += squared_gap(it->second, observed, h);
    den += bundle_space_size(static_cast<int>(t.offer.size()), h);
  }
  return std::sqrt(num / static_cast<double>(den));
}

double mrmse(const ChoiceModel& model, const TransactionLog& test) {
  if (test.transactions.empty()) throw DataError("mrmse needs a non-empty test log");
  std::map<ProductSet, std::map<Product, double>> cache;
  double num = 0.0;
  long den = 0;
  for (const auto& t : test.transactions) {
    auto it = cache.find(t.offer);
    if (it == cache.end()) {
      std::map<Product, double> marginal;
      for (std::size_t c = 0; c < model.types.size(); ++c)
        for (Product j : purchase_outcome(model.types[c], t.offer)) marginal[j] += model.probs[c];
      it = cache.emplace(t.offer, std::move(marginal)).first;
    }
    for (Product j : t.offer) {
      const auto m = it->second.find(j);
      const double p = m == it->second.end() ? 0.0 : m->second;
      const double d = (contains(t.bundle, j) ? 1.0 : 0.0) - p;
      num += d * d;
    }
    den += static_cast<long>(t.offer.size());
  }
  return std::sqrt(num / static_cast<double>(den));
}

double shifted_geomean(const std::vector<double>& x, double shift) {
  if (x.empty()) throw std::invalid_argument("shifted geometric mean of an empty sample");
  double acc = 0.0;
  for (double v : x) {
    if (v + shift <= 0.0) throw std::invalid_argument("shifted values must be positive");
    acc += std::log(v + shift);
  }
  return std::exp(acc / static_cast<double>(x.size())) - shift;
}

}  // namespace rankcg::metrics
