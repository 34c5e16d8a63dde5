#include "rankcg/assortment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rankcg/io.hpp"
#include "rankcg/rng.hpp"

namespace rankcg::assortment {

double expected_revenue(const ChoiceModel& model, std::span<const Product> offer,
                        const RevenueVector& r) {
  double total = 0.0;
  for (std::size_t c = 0; c < model.types.size(); ++c) {
    double rev = 0.0;
    for (Product j : purchase_outcome(model.types[c], offer)) rev += r.at(j - 1);
    total += model.probs[c] * rev;
  }
  return total;
}

AssortmentResult optimize_assortment(const ChoiceModel& model, const RevenueVector& r, int n) {
  if (n < 1 || n > 20) throw std::invalid_argument("assortment enumeration needs 1 <= n <= 20");
  if (static_cast<int>(r.size()) < n) throw std::invalid_argument("revenue vector too short");
  for (int j = 0; j < n; ++j)
    if (r[j] < 0.0) throw std::invalid_argument("revenues must be non-negative");

  // Σ over the chosen prefix is evaluated with masks to keep the inner loop
  // allocation-free.
  std::vector<std::vector<int>> lists;
  for (const auto& c : model.types) {
    std::vector<int> l;
    for (Product j : c.sigma)
      if (j >= 1 && j <= n) l.push_back(j - 1);
    lists.push_back(std::move(l));
  }
  AssortmentResult best;
  std::uint32_t best_mask = 0;
  double best_value = -1.0;
  auto as_set = [n](std::uint32_t m) {
    ProductSet s;
    for (int j = 0; j < n; ++j)
      if (m >> j & 1u) s.push_back(j + 1);
    return s;
  };
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double value = 0.0;
    for (std::size_t c = 0; c < lists.size(); ++c) {
      int left = model.types[c].eta;
      double rev = 0.0;
      for (int j : lists[c]) {
        if (left == 0) break;
        if (mask >> j & 1u) {
          rev += r[j];
          --left;
        }
      }
      value += model.probs[c] * rev;
    }
    bool better = value > best_value + 1e-12;
    if (!better && std::abs(value - best_value) <= 1e-12) {
      const int pc = std::popcount(mask), bc = std::popcount(best_mask);
      better = pc < bc || (pc == bc && as_set(mask) < as_set(best_mask));
    }
    if (better) {
      best_value = value;
      best_mask = mask;
    }
  }
  best.offer = as_set(best_mask);
  best.value = expected_revenue(model, best.offer, r);
  return best;
}

Population build_probit_population(const datagen::ProbitParams& p, int consumers,
                                   std::uint64_t seed) {
  const int n = static_cast<int>(p.V.size());
  std::vector<double> qcum = datagen::probit_quantity_pmf();
  std::partial_sum(qcum.begin(), qcum.end(), qcum.begin());
  auto rng = SplitMix64::stream(seed, "probit_population");
  Population pop;
  std::vector<std::pair<double, Product>> util(n + 1);
  for (int i = 0; i < consumers; ++i) {
    util[0] = {-rng.normal(), 0};
    for (int j = 1; j <= n; ++j)
      util[j] = {-(p.V[j - 1] - p.beta[j - 1] * p.r[j - 1] + rng.normal()), j};
    std::sort(util.begin(), util.end());
    std::vector<Product> ranking;
    for (const auto& [u, j] : util) ranking.push_back(j);
    pop.rankings.push_back(std::move(ranking));
    pop.quantity.push_back(static_cast<int>(rng.categorical(qcum)));
  }
  return pop;
}

Population population_from_model(const ChoiceModel& model, int n, int consumers,
                                 std::uint64_t seed) {
  std::vector<double> cum(model.probs);
  std::partial_sum(cum.begin(), cum.end(), cum.begin());
  auto rng = SplitMix64::stream(seed, "model_population");
  Population pop;
  for (int i = 0; i < consumers; ++i) {
    const auto& c = model.types[rng.categorical(cum)];
    const ProductSet listed = make_set(c.sigma);
    std::vector<Product> ranking(c.sigma);
    ranking.push_back(0);
    for (Product j = 1; j <= n; ++j)
      if (!contains(listed, j)) ranking.push_back(j);
    pop.rankings.push_back(std::move(ranking));
    pop.quantity.push_back(c.eta);
  }
  return pop;
}

double consumer_revenue(const std::vector<Product>& ranking, int quantity,
                        std::span<const Product> offer, const RevenueVector& r) {
  double rev = 0.0;
  int bought = 0;
  for (Product j : ranking) {
    if (bought >= quantity || j == 0) break;
    if (contains(offer, j)) {
      rev += r.at(j - 1);
      ++bought;
    }
  }
  return rev;
}

double simulate_revenue(const Population& pop, std::span<const Product> offer,
                        const RevenueVector& r) {
  if (pop.size() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i)
    total += consumer_revenue(pop.rankings[i], pop.quantity[i], offer, r);
  return total / static_cast<double>(pop.size());
}

double simulate_revenue_variance(const Population& pop, std::span<const Product> offer,
                                 const RevenueVector& r) {
  if (pop.size() < 2) return 0.0;
  const double mean = simulate_revenue(pop, offer, r);
  double acc = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const double d = consumer_revenue(pop.rankings[i], pop.quantity[i], offer, r) - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(pop.size() - 1);
}

void write_population(std::ostream& os, const Population& pop) {
  for (std::size_t i = 0; i < pop.size(); ++i)
    os << io::json{{"ranking", pop.rankings[i]}, {"q", pop.quantity[i]}}.dump() << '\n';
}

Population read_population(std::istream& is) {
  Population pop;
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = io::json::parse(line);
      auto ranking = j.at("ranking").get<std::vector<Product>>();
      const int q = j.at("q").get<int>();
      auto sorted = ranking;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t k = 0; k < sorted.size(); ++k)
        if (sorted[k] != static_cast<Product>(k)) throw DataError("ranking is not a permutation of 0..n");
      if (q < 0) throw DataError("negative quantity");
      pop.rankings.push_back(std::move(ranking));
      pop.quantity.push_back(q);
    } catch (const io::json::exception& e) {
      throw DataError("population line " + std::to_string(lineno) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("population line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return pop;
}

double aao_ratio(double estimated_value, double true_optimum) {
  if (true_optimum <= 0.0) return 1.0;
  return estimated_value / true_optimum;
}

}  // namespace rankcg::assortment
