#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "rankcg/core.hpp"
#include "rankcg/datagen.hpp"

namespace rankcg::assortment {

/// Unit revenue r_j of product j is stored at index j-1.
using RevenueVector = std::vector<double>;

/// Σ_c x_c Σ_{j ∈ π(c,S)} r_j.
double expected_revenue(const ChoiceModel& model, std::span<const Product> offer,
                        const RevenueVector& r);

struct AssortmentResult {
  ProductSet offer;
  double value = 0.0;
};

/// Exhaustive search over the non-empty subsets of {1..n}; ties go to the
/// smaller offer, then the lexicographically smaller one. Throws
/// std::invalid_argument for n > 20 or a negative revenue.
AssortmentResult optimize_assortment(const ChoiceModel& model, const RevenueVector& r, int n);

/// Consumers as full rankings over products and the outside option 0,
/// each with an intended purchase quantity.
struct Population {
  std::vector<std::vector<Product>> rankings;
  std::vector<int> quantity;

  std::size_t size() const { return rankings.size(); }
};

/// Probit consumers: U_j = V_j − β_j r_j + ε_j, U_0 = ε_0, all ε ~ N(0,1);
/// products sorted by decreasing utility (ties to the smaller index) and
/// quantity drawn from P(q) ∝ exp(0.6 q), q = 0..2.
Population build_probit_population(const datagen::ProbitParams& params, int consumers,
                                   std::uint64_t seed);

/// Consumers sampled from a ranked-list model: σ, then the outside option,
/// then the remaining products; the quantity is η.
Population population_from_model(const ChoiceModel& model, int n, int consumers,
                                 std::uint64_t seed);

/// Revenue of one consumer: scan the ranking, buying offered products until
/// the quantity is reached or the outside option is met.
double consumer_revenue(const std::vector<Product>& ranking, int quantity,
                        std::span<const Product> offer, const RevenueVector& r);

/// Mean consumer revenue on `offer`.
double simulate_revenue(const Population& pop, std::span<const Product> offer,
                        const RevenueVector& r);
/// Sample variance of the per-consumer revenue.
double simulate_revenue_variance(const Population& pop, std::span<const Product> offer,
                                 const RevenueVector& r);

void write_population(std::ostream& os, const Population& pop);
/// Throws DataError on malformed lines.
Population read_population(std::istream& is);

/// ρ_e / ρ_t; 1 when the ground-truth optimum is zero.
double aao_ratio(double estimated_value, double true_optimum);

}  // namespace rankcg::assortment
