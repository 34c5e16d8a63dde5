#include "rankcg/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace rankcg::lp {

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
    case LpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

struct Column {
  double cost = 0.0;
  SparseColumn entries;
  int unit_row = -1;  // row of a ±e_r column, else -1
  double unit_sign = 0.0;
  bool artificial = false;
};

Column make_column(double cost, SparseColumn entries, bool artificial) {
  Column c;
  c.cost = cost;
  c.artificial = artificial;
  std::erase_if(entries, [](const auto& e) { return e.second == 0.0; });
  if (entries.size() == 1 && std::abs(entries[0].second) == 1.0) {
    c.unit_row = entries[0].first;
    c.unit_sign = entries[0].second;
  }
  c.entries = std::move(entries);
  return c;
}

}  // namespace

struct RevisedSimplex::Impl {
  int m = 0;
  SimplexOptions opts;
  std::vector<Column> cols;
  std::vector<int> user_index;  // internal -> user column, -1 for artificials
  std::vector<int> basis;       // basis position -> internal column
  std::vector<int> position;    // internal column -> basis position or -1
  bool has_basis = false;

  // Factorization of the current basis.
  std::vector<int> row_owner;  // row -> basis position of its unit column, or -1
  std::vector<int> xb;         // basis positions of the factorized block
  std::vector<int> rx;         // rows not covered by unit columns
  std::vector<int> rx_local;   // row -> index in rx, or -1
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  std::vector<double> acc;

  bool factor() {
    row_owner.assign(m, -1);
    xb.clear();
    for (int p = 0; p < m; ++p) {
      const Column& c = cols[basis[p]];
      if (c.unit_row >= 0 && row_owner[c.unit_row] < 0)
        row_owner[c.unit_row] = p;
      else
        xb.push_back(p);
    }
    rx.clear();
    rx_local.assign(m, -1);
    for (int r = 0; r < m; ++r)
      if (row_owner[r] < 0) {
        rx_local[r] = static_cast<int>(rx.size());
        rx.push_back(r);
      }
    if (rx.size() != xb.size()) return false;
    const int k = static_cast<int>(xb.size());
    if (k == 0) return true;
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(k, k);
    for (int b = 0; b < k; ++b)
      for (const auto& [r, v] : cols[basis[xb[b]]].entries)
        if (rx_local[r] >= 0) block(rx_local[r], b) = v;
    lu.compute(block);
    const auto& f = lu.matrixLU();
    double big = 0.0, small = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      big = std::max(big, std::abs(f(i, i)));
      small = std::min(small, std::abs(f(i, i)));
    }
    return small > 1e-11 * std::max(1.0, big);
  }

  // Solves B w = b for a dense right-hand side indexed by row; the result is
  // indexed by basis position.
  std::vector<double> ftran(const std::vector<double>& b) {
    std::vector<double> w(m, 0.0);
    const int k = static_cast<int>(xb.size());
    Eigen::VectorXd z;
    if (k > 0) {
      Eigen::VectorXd rhs(k);
      for (int i = 0; i < k; ++i) rhs(i) = b[rx[i]];
      z = lu.solve(rhs);
    }
    acc.assign(m, 0.0);
    for (int i = 0; i < k; ++i) {
      w[xb[i]] = z(i);
      if (z(i) == 0.0) continue;
      for (const auto& [r, v] : cols[basis[xb[i]]].entries) acc[r] += v * z(i);
    }
    for (int r = 0; r < m; ++r)
      if (const int p = row_owner[r]; p >= 0) w[p] = (b[r] - acc[r]) / cols[basis[p]].unit_sign;
    return w;
  }

  std::vector<double> btran(const std::vector<double>& cb) {
    std::vector<double> y(m, 0.0);
    for (int r = 0; r < m; ++r)
      if (const int p = row_owner[r]; p >= 0) y[r] = cb[p] / cols[basis[p]].unit_sign;
    const int k = static_cast<int>(xb.size());
    if (k > 0) {
      Eigen::VectorXd rhs(k);
      for (int i = 0; i < k; ++i) {
        double v = cb[xb[i]];
        for (const auto& [r, a] : cols[basis[xb[i]]].entries)
          if (row_owner[r] >= 0) v -= a * y[r];
        rhs(i) = v;
      }
      const Eigen::VectorXd yx = lu.transpose().solve(rhs);
      for (int i = 0; i < k; ++i) y[rx[i]] = yx(i);
    }
    return y;
  }

  double cost(int j, bool phase1) const {
    if (phase1) return cols[j].artificial ? 1.0 : 0.0;
    return cols[j].artificial ? 0.0 : cols[j].cost;
  }

  void crash(const std::vector<double>& rhs) {
    basis.assign(m, -1);
    position.assign(cols.size(), -1);
    std::vector<bool> covered(m, false);
    for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
      const Column& c = cols[j];
      if (c.unit_row < 0 || covered[c.unit_row]) continue;
      if (c.unit_sign * rhs[c.unit_row] < 0.0) continue;
      covered[c.unit_row] = true;
      basis[c.unit_row] = j;
      position[j] = c.unit_row;
    }
    for (int r = 0; r < m; ++r) {
      if (covered[r]) continue;
      const double s = rhs[r] >= 0.0 ? 1.0 : -1.0;
      cols.push_back(make_column(0.0, {{r, s}}, true));
      user_index.push_back(-1);
      position.push_back(r);
      basis[r] = static_cast<int>(cols.size()) - 1;
    }
    has_basis = true;
  }

  // Runs one simplex phase from the current (primal feasible) basis.
  LpStatus run(const std::vector<double>& rhs, bool phase1, long& iterations,
               std::vector<double>& xb_values) {
    const double tol = opts.tolerance;
    const long degenerate_limit = static_cast<long>(opts.degenerate_factor) * std::max(m, 1);
    long degenerate_run = 0;
    std::vector<double> cb(m);
    std::vector<double> column(m, 0.0);
    for (;;) {
      if (!factor()) return LpStatus::NumericalFailure;
      xb_values = ftran(rhs);
      for (int p = 0; p < m; ++p) cb[p] = cost(basis[p], phase1);
      const std::vector<double> y = btran(cb);

      const bool bland = degenerate_run >= degenerate_limit;
      int entering = -1;
      double best = -tol;
      for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
        if (position[j] >= 0 || cols[j].artificial) continue;
        double d = cost(j, phase1);
        for (const auto& [r, v] : cols[j].entries) d -= v * y[r];
        if (d < best) {
          entering = j;
          if (bland) break;
          best = d;
        }
      }
      if (entering < 0) return LpStatus::Optimal;
      if (iterations >= opts.max_iterations) return LpStatus::IterationLimit;

      std::fill(column.begin(), column.end(), 0.0);
      for (const auto& [r, v] : cols[entering].entries) column[r] = v;
      const std::vector<double> w = ftran(column);

      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int p = 0; p < m; ++p) {
        const bool art = cols[basis[p]].artificial;
        double wp = w[p];
        if (!phase1 && art) wp = std::abs(wp);
        if (wp <= tol) continue;
        const double t = std::max(xb_values[p], 0.0) / wp;
        bool take = false;
        if (leave < 0 || t < ratio - tol) {
          take = true;
        } else if (t <= ratio + tol) {
          // Ties: artificials leave first, then Bland's smallest index or
          // the largest pivot element.
          const bool art_cur = cols[basis[leave]].artificial;
          if (art != art_cur)
            take = art;
          else if (bland)
            take = basis[p] < basis[leave];
          else
            take = std::abs(wp) > std::abs(w[leave]);
        }
        if (take) {
          leave = p;
          ratio = std::min(t, ratio);
        }
      }
      if (leave < 0) return LpStatus::Unbounded;

      position[basis[leave]] = -1;
      basis[leave] = entering;
      position[entering] = leave;
      ++iterations;
      degenerate_run = ratio <= tol ? degenerate_run + 1 : 0;
    }
  }
};

RevisedSimplex::RevisedSimplex(std::vector<double> rhs, SimplexOptions opts)
    : rhs_(std::move(rhs)), impl_(std::make_unique<Impl>()) {
  impl_->m = static_cast<int>(rhs_.size());
  impl_->opts = opts;
  duals_.assign(rhs_.size(), 0.0);
}

RevisedSimplex::~RevisedSimplex() = default;

int RevisedSimplex::add_column(double cost, SparseColumn column) {
  std::sort(column.begin(), column.end());
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (column[i].first < 0 || column[i].first >= num_rows())
      throw std::invalid_argument("column row index out of range");
    if (i > 0 && column[i].first == column[i - 1].first)
      throw std::invalid_argument("column has a repeated row");
  }
  user_cost_.push_back(cost);
  user_cols_.push_back(column);
  impl_->cols.push_back(make_column(cost, std::move(column), false));
  impl_->user_index.push_back(num_columns() - 1);
  if (impl_->has_basis) impl_->position.push_back(-1);
  primal_.push_back(0.0);
  return num_columns() - 1;
}

LpStatus RevisedSimplex::solve() {
  Impl& s = *impl_;
  if (!s.has_basis) s.crash(rhs_);
  std::vector<double> xb;

  bool need_phase1 = false;
  for (int p = 0; p < s.m; ++p) need_phase1 |= s.cols[s.basis[p]].artificial;
  if (need_phase1) {
    if (!s.factor()) return LpStatus::NumericalFailure;
    xb = s.ftran(rhs_);
    double infeas = 0.0;
    for (int p = 0; p < s.m; ++p)
      if (s.cols[s.basis[p]].artificial) infeas += std::max(xb[p], 0.0);
    if (infeas > s.opts.tolerance) {
      const LpStatus st = s.run(rhs_, true, iterations_, xb);
      if (st != LpStatus::Optimal) return st;
      infeas = 0.0;
      for (int p = 0; p < s.m; ++p)
        if (s.cols[s.basis[p]].artificial) infeas += std::max(xb[p], 0.0);
      if (infeas > 1e-7) return LpStatus::Infeasible;
    }
  }

  const LpStatus st = s.run(rhs_, false, iterations_, xb);
  if (st != LpStatus::Optimal) return st;

  std::fill(primal_.begin(), primal_.end(), 0.0);
  objective_ = 0.0;
  std::vector<double> cb(s.m);
  for (int p = 0; p < s.m; ++p) {
    const int j = s.basis[p];
    cb[p] = s.cost(j, false);
    if (const int u = s.user_index[j]; u >= 0) {
      primal_[u] = std::max(xb[p], 0.0);
      objective_ += user_cost_[u] * primal_[u];
    }
  }
  duals_ = s.btran(cb);
  return LpStatus::Optimal;
}

void write_mps(std::ostream& os, const std::string& name, const std::vector<double>& costs,
               const std::vector<SparseColumn>& columns, const std::vector<double>& rhs,
               const std::vector<std::string>& column_names,
               const std::vector<std::string>& row_names) {
  auto row = [&](int r) { return r < static_cast<int>(row_names.size()) ? row_names[r] : "R" + std::to_string(r); };
  auto col = [&](std::size_t c) {
    return c < column_names.size() ? column_names[c] : "C" + std::to_string(c);
  };
  const auto flags = os.flags();
  os << std::hexfloat;
  os << "NAME " << name << "\nROWS\n N OBJ\n";
  for (std::size_t r = 0; r < rhs.size(); ++r) os << " E " << row(static_cast<int>(r)) << '\n';
  os << "COLUMNS\n";
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (costs[c] != 0.0) os << "    " << col(c) << " OBJ " << costs[c] << '\n';
    for (const auto& [r, v] : columns[c]) os << "    " << col(c) << ' ' << row(r) << ' ' << v << '\n';
  }
  os << "RHS\n";
  for (std::size_t r = 0; r < rhs.size(); ++r)
    if (rhs[r] != 0.0) os << "    RHS " << row(static_cast<int>(r)) << ' ' << rhs[r] << '\n';
  os << "ENDATA\n";
  os.flags(flags);
}

}  // namespace rankcg::lp
