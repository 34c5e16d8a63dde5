#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rankcg/core.hpp"
#include "rankcg/io.hpp"
#include "rankcg/pricing.hpp"

namespace rankcg::cg {

enum class Master { Em, L1 };
enum class Termination { Converged, LrFailed, TimeLimit, ColumnCap };

std::string to_string(Master m);
std::string to_string(Termination t);
Master master_from_string(const std::string& s);

struct CgConfig {
  Master master = Master::L1;
  int eta_max = 1;
  std::optional<int> q;
  /// Heuristic bucket caps tried in order before the exact DP (L1 mode).
  std::vector<int> heuristic_caps{2, 5};
  bool use_heuristic = true;
  /// EM mode: seed the exact DP with the cap-2 heuristic column.
  bool use_heuristic_lb_seed = true;
  std::optional<double> time_limit;
  std::optional<int> max_columns;
  double alpha = 0.05;
  double reduced_cost_tol = 1e-6;
  double em_tol = 1e-8;
  int em_max_iter = 2000;

  /// Throws std::invalid_argument on eta_max < 1 or a cap < 1.
  void validate() const;
};

struct CgReport {
  long iterations = 0;
  long columns_added = 0;
  double final_objective = 0.0;  // ℓ1 error, or log-likelihood in EM mode
  long heuristic_calls = 0;
  long exact_calls = 0;
  double wall_time = 0.0;
  Termination termination = Termination::Converged;
  /// Master objective after every RMP solve.
  std::vector<double> objective_history;
};

struct CgOutcome {
  ChoiceModel model;
  CgReport report;
  /// Every column in the final RMP, with its mass.
  std::vector<ConsumerType> columns;
  std::vector<double> x;
  /// Pricing rewards and convexity dual (L1) of the final master solve.
  std::vector<pricing::RewardedTransaction> final_rewards;
  double final_gamma = 0.0;
};

/// Column generation for either master. Throws DataError on an empty log or,
/// in EM mode, when eta_max is below the largest observed bundle.
CgOutcome run_estimation(const TransactionLog& log, const CgConfig& cfg);

io::json report_json(const CgReport& r);

}  // namespace rankcg::cg
