#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rankcg/core.hpp"
#include "rankcg/rng.hpp"

namespace rankcg::datagen {

enum class Family {
  SingleRandom,
  SingleStructured,
  MultipurchaseRankedList,
  LimitedList,
  MultipurchaseProbit
};

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct GenSpec {
  Family family = Family::SingleRandom;
  int n = 10;
  int k = 10;                    // ground-truth type count
  double p1 = 0.5;               // passive-consumer probability
  int eta_max = 1;               // multipurchase_rankedlist capacity bound
  int periods = 30;
  /// Defaults to 10 (single families) or 50 (multipurchase_rankedlist).
  std::optional<int> arrivals_per_period;
  double pd = 0.0;               // limited_list deletion probability
  int F = 1;                     // limited_list swap attempts
  long transactions = 5000;      // limited_list and probit sizes
  bool strong_substitution = false;  // limited_list: keep lists with >= 8 items
  std::uint64_t seed = 1;
  /// Enforce the documented parameter grids; off for reduced-scale studies.
  bool strict_ranges = true;

  /// Throws std::invalid_argument on an out-of-range parameter.
  void validate() const;
};

struct ProbitParams {
  std::vector<double> V;
  std::vector<double> beta;
  std::vector<double> r;  // revenues, also the price in the utility
};

struct Instance {
  int n = 0;
  std::optional<ChoiceModel> truth;
  TransactionLog train;
  TransactionLog test;
  /// Index into truth->types of the type behind each training transaction.
  std::vector<int> train_types;
  std::optional<std::vector<double>> revenues;  // r_j at index j-1
  std::optional<ProbitParams> probit;
};

Instance gen_single_random(const GenSpec& spec);
Instance gen_single_structured(const GenSpec& spec);
Instance gen_multipurchase_rankedlist(const GenSpec& spec);
Instance gen_limited_list(const GenSpec& spec);
Instance gen_multipurchase_probit(const GenSpec& spec);
Instance generate(const GenSpec& spec);

/// A single structured preference list over 5 items x 3 price levels
/// (product 3i+l+1 is item i at level l), truncated at a uniform length.
ConsumerType sample_structured_type(SplitMix64& rng);

/// Limited-list preference list from the interval [i, j]: deletions with
/// probability pd, then F adjacent-swap attempts each firing with
/// probability 0.5. May be empty.
std::vector<Product> sample_limited_list(SplitMix64& rng, int n, double pd, int F);

/// The intended-quantity law P(q) ∝ exp(0.6 q), q = 0..2.
std::vector<double> probit_quantity_pmf();

/// Writes header.json, train.jsonl, test.jsonl and, when present,
/// ground_truth.json, revenues.json and probit_params.json.
void write_instance_dir(const Instance& inst, const std::filesystem::path& dir,
                        const GenSpec& spec);

/// Reads back what write_instance_dir wrote.
Instance read_instance_dir(const std::filesystem::path& dir);

}  // namespace rankcg::datagen
