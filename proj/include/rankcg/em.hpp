#pragma once

#include <vector>

#include "rankcg/core.hpp"
#include "rankcg/io.hpp"
#include "rankcg/pricing.hpp"

namespace rankcg::em {

/// n singletons, the passive type, and one covering type per distinct
/// non-empty observed bundle, so every transaction has a compatible column.
/// Throws std::invalid_argument when n < 1.
std::vector<ConsumerType> initial_columns(const TransactionLog& log, int n);

struct TraceRecord {
  long iter = 0;
  double loglik = 0.0;
  std::size_t columns = 0;
  bool accepted = false;
};

/// Latent-class EM over a fixed column set. Identical transactions are
/// stored once with their multiplicity; every per-transaction quantity below
/// refers to these distinct rows.
struct EmState {
  std::vector<WeightedTransaction> data;
  double total = 0.0;  // |T|
  std::vector<ConsumerType> columns;
  std::vector<std::vector<int>> support;  // rows compatible with each column
  std::vector<double> x;
  std::vector<double> y;
  double loglik = 0.0;
  long iterations = 0;
  /// Log-likelihood after every M-step of the most recent em_solve.
  std::vector<double> loglik_path;
  std::vector<TraceRecord> trace;

  /// Uniform x over `columns` (duplicates are removed).
  EmState(const TransactionLog& log, std::vector<ConsumerType> columns);

  /// Appends a column with zero mass; false for a duplicate.
  bool add_column(const ConsumerType& c);
  void refresh_y();
};

struct EmOptions {
  double tol = 1e-8;
  int max_iter = 2000;
};

/// Runs EM from the current x. Throws DataError if some y_t is zero.
void em_solve(EmState& state, const EmOptions& opts = {});

struct EmDuals {
  std::vector<double> mu;  // 1 / y_t per distinct row
  double acceptance_threshold = 0.0;
};
EmDuals em_duals(const EmState& state);

/// Distinct rows rewarded with count_t / y_t, so a type's pricing profit is
/// Σ_t a_tc μ_t over the full log.
std::vector<pricing::RewardedTransaction> em_rewards(const EmState& state);

/// χ²₁ critical value at level alpha.
double chi2_critical(double alpha);

struct AcceptResult {
  bool accepted = false;
  bool resolved = false;  // EM was re-run on the augmented column set
  double lr = 0.0;
};

/// Rejects without re-solving when profit ≤ |T| + 1e-6. Otherwise adds the
/// candidate at mass 1/(|C|+1), re-runs EM and keeps it iff the likelihood
/// ratio 2(ℓ_new − ℓ_old) reaches the critical value; rolls back otherwise.
AcceptResult accept_column(EmState& state, const ConsumerType& candidate, double profit,
                           double alpha = 0.05, const EmOptions& opts = {});

io::json trace_json(const EmState& state);

}  // namespace rankcg::em
