#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace rankcg::lp {

/// Sparse column: (row, coefficient) pairs with distinct rows.
using SparseColumn = std::vector<std::pair<int, double>>;

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

std::string to_string(LpStatus s);

/// min c·z  s.t.  E z = d,  z ≥ 0.
/// Columns can be appended between solves; the next solve warm-starts from
/// the previous basis.
class LpSolver {
 public:
  virtual ~LpSolver() = default;

  virtual int add_column(double cost, SparseColumn column) = 0;
  virtual LpStatus solve() = 0;

  virtual int num_rows() const = 0;
  virtual int num_columns() const = 0;
  virtual double objective() const = 0;
  /// Primal values for the user columns.
  virtual const std::vector<double>& primal() const = 0;
  /// Row duals y with Eᵀy ≤ c at optimality.
  virtual const std::vector<double>& duals() const = 0;
  virtual long iterations() const = 0;
};

struct SimplexOptions {
  double tolerance = 1e-9;
  /// Consecutive degenerate pivots before switching to Bland's rule, as a
  /// multiple of the row count.
  int degenerate_factor = 10;
  long max_iterations = 1'000'000;
};

/// Primal revised simplex with a two-phase start. Basic columns of the form
/// ±e_r are inverted implicitly; the remaining block is LU-factorized at
/// every pivot.
class RevisedSimplex final : public LpSolver {
 public:
  RevisedSimplex(std::vector<double> rhs, SimplexOptions opts = {});
  ~RevisedSimplex() override;

  int add_column(double cost, SparseColumn column) override;
  LpStatus solve() override;

  int num_rows() const override { return static_cast<int>(rhs_.size()); }
  int num_columns() const override { return static_cast<int>(user_cost_.size()); }
  double objective() const override { return objective_; }
  const std::vector<double>& primal() const override { return primal_; }
  const std::vector<double>& duals() const override { return duals_; }
  long iterations() const override { return iterations_; }

  const std::vector<double>& costs() const { return user_cost_; }
  const std::vector<SparseColumn>& columns() const { return user_cols_; }
  const std::vector<double>& rhs() const { return rhs_; }

 private:
  struct Impl;
  std::vector<double> rhs_;
  std::vector<double> user_cost_;
  std::vector<SparseColumn> user_cols_;
  std::vector<double> primal_;
  std::vector<double> duals_;
  double objective_ = 0.0;
  long iterations_ = 0;
  std::unique_ptr<Impl> impl_;
};

/// Writes the problem in a fixed-format MPS-like text with values printed in
/// hexadecimal floating point, so a dump can be reloaded bit-exactly.
void write_mps(std::ostream& os, const std::string& name, const std::vector<double>& costs,
               const std::vector<SparseColumn>& columns, const std::vector<double>& rhs,
               const std::vector<std::string>& column_names = {},
               const std::vector<std::string>& row_names = {});

}  // namespace rankcg::lp
