#pragma once

#include <memory>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "rankcg/core.hpp"
#include "rankcg/lp.hpp"
#include "rankcg/pricing.hpp"

namespace rankcg::l1 {

/// The LP solver stopped without an optimal basis (as opposed to the RMP
/// being infeasible, which the ε columns rule out).
class LpFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ℓ1-error restricted master:
///   min Σ (ε⁺_m + ε⁻_m)  s.t.  Σ_c a_mc x_c + ε⁺_m − ε⁻_m = v_m,  Σ_c x_c = 1.
class L1State {
 public:
  /// Starts from the passive consumer when `columns` is empty.
  explicit L1State(DistinctMarket market, std::vector<ConsumerType> columns = {});

  /// Returns false (and leaves the state unchanged) for a duplicate column.
  bool add_column(const ConsumerType& c);

  const DistinctMarket& market() const { return market_; }
  const std::vector<ConsumerType>& columns() const { return columns_; }
  /// Market rows compatible with column c.
  const std::vector<int>& support(std::size_t c) const { return support_[c]; }

  bool solved() const { return solved_; }
  double objective() const { return objective_; }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& eps_plus() const { return eps_plus_; }
  const std::vector<double>& eps_minus() const { return eps_minus_; }
  const std::vector<double>& mu() const { return mu_; }
  double gamma() const { return gamma_; }
  long lp_iterations() const { return lp_->iterations(); }

  /// γ + Σ_m a_mc μ_m for any type.
  double reduced_cost(const ConsumerType& c) const;
  /// Market rows as a pricing instance with rewards μ_m.
  std::vector<pricing::RewardedTransaction> rewards() const;

  void dump_mps(std::ostream& os) const;

 private:
  friend void build_and_solve(L1State& state);

  DistinctMarket market_;
  std::vector<ConsumerType> columns_;
  std::vector<std::vector<int>> support_;
  std::unique_ptr<lp::RevisedSimplex> lp_;
  std::vector<int> lp_column_;  // type column -> LP column index
  bool solved_ = false;
  double objective_ = 0.0;
  std::vector<double> x_, eps_plus_, eps_minus_, mu_;
  double gamma_ = 0.0;
};

/// Solves the current RMP, warm-starting from the previous basis. Throws
/// LpFailure when the simplex does not reach optimality.
void build_and_solve(L1State& state);

struct L1Duals {
  std::vector<double> mu;
  double gamma = 0.0;
};
L1Duals l1_duals(const L1State& state);

}  // namespace rankcg::l1
