#pragma once

// Random instance builders shared by the unit and acceptance suites.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "rankcg/core.hpp"
#include "rankcg/pricing.hpp"

namespace rankcg::testing {

inline ProductSet random_subset(std::mt19937_64& rng, int n, int min_size, int max_size) {
  std::vector<Product> all(n);
  std::iota(all.begin(), all.end(), 1);
  std::shuffle(all.begin(), all.end(), rng);
  std::uniform_int_distribution<int> size(min_size, max_size);
  all.resize(size(rng));
  return make_set(all);
}

inline ConsumerType random_type(std::mt19937_64& rng, int n, int eta_max) {
  std::vector<Product> perm(n);
  std::iota(perm.begin(), perm.end(), 1);
  std::shuffle(perm.begin(), perm.end(), rng);
  perm.resize(std::uniform_int_distribution<int>(0, n)(rng));
  const int eta = perm.empty() ? 0 : std::uniform_int_distribution<int>(1, eta_max)(rng);
  return ConsumerType{perm, eta}.canonical();
}

struct RandomPricingSpec {
  int n_min = 2, n_max = 7;
  int t_min = 1, t_max = 30;
  int eta_max = 3;
  bool signed_rewards = true;
  bool random_q = true;
};

// Bundles are drawn from random types so a good share of transactions are
// satisfiable, plus arbitrary subsets for the rest.
inline pricing::PricingInstance random_pricing_instance(std::mt19937_64& rng,
                                                        const RandomPricingSpec& spec) {
  const int n = std::uniform_int_distribution<int>(spec.n_min, spec.n_max)(rng);
  const int eta_max = std::min(n, std::uniform_int_distribution<int>(1, spec.eta_max)(rng));
  const int count = std::uniform_int_distribution<int>(spec.t_min, spec.t_max)(rng);
  std::uniform_real_distribution<double> reward(spec.signed_rewards ? -1.0 : 0.01, 1.0);
  std::vector<pricing::RewardedTransaction> txns;
  for (int i = 0; i < count; ++i) {
    ProductSet offer = random_subset(rng, n, 1, n);
    ProductSet bundle;
    if (rng() % 3 == 0) {
      std::vector<Product> b;
      for (Product j : offer)
        if (rng() % 2) b.push_back(j);
      bundle = make_set(b);
    } else {
      bundle = purchase_outcome(random_type(rng, n, 3), offer);
    }
    txns.push_back({offer, bundle, reward(rng)});
  }
  std::optional<int> q;
  if (spec.random_q && rng() % 2) q = std::min(2, n);
  return pricing::PricingInstance(n, eta_max, q, std::move(txns));
}

}  // namespace rankcg::testing
