#include "rankcg/l1.hpp"

#include <algorithm>

namespace rankcg::l1 {

L1State::L1State(DistinctMarket market, std::vector<ConsumerType> columns)
    : market_(std::move(market)) {
  if (market_.size() == 0) throw std::invalid_argument("empty market");
  const int rows = static_cast<int>(market_.size());
  std::vector<double> rhs;
  rhs.reserve(rows + 1);
  for (const auto& r : market_.rows) rhs.push_back(r.v);
  rhs.push_back(1.0);
  lp_ = std::make_unique<lp::RevisedSimplex>(std::move(rhs));
  for (int m = 0; m < rows; ++m) {
    lp_->add_column(1.0, {{m, 1.0}});
    lp_->add_column(1.0, {{m, -1.0}});
  }
  if (columns.empty()) columns.push_back(ConsumerType::passive());
  for (const auto& c : columns) add_column(c);
}

bool L1State::add_column(const ConsumerType& c) {
  const ConsumerType canon = c.canonical();
  if (std::find(columns_.begin(), columns_.end(), canon) != columns_.end()) return false;
  std::vector<int> rows;
  lp::SparseColumn col;
  for (int m = 0; m < static_cast<int>(market_.size()); ++m) {
    const auto& r = market_.rows[m];
    if (is_compatible(canon, r.offer, r.bundle)) {
      rows.push_back(m);
      col.emplace_back(m, 1.0);
    }
  }
  col.emplace_back(static_cast<int>(market_.size()), 1.0);
  columns_.push_back(canon);
  support_.push_back(std::move(rows));
  lp_column_.push_back(lp_->add_column(0.0, std::move(col)));
  solved_ = false;
  return true;
}

double L1State::reduced_cost(const ConsumerType& c) const {
  double rc = gamma_;
  for (std::size_t m = 0; m < market_.size(); ++m) {
    const auto& r = market_.rows[m];
    if (is_compatible(c, r.offer, r.bundle)) rc += mu_[m];
  }
  return rc;
}

std::vector<pricing::RewardedTransaction> L1State::rewards() const {
  std::vector<pricing::RewardedTransaction> out;
  out.reserve(market_.size());
  for (std::size_t m = 0; m < market_.size(); ++m)
    out.push_back({market_.rows[m].offer, market_.rows[m].bundle, mu_[m]});
  return out;
}

void L1State::dump_mps(std::ostream& os) const {
  std::vector<std::string> names;
  for (std::size_t m = 0; m < market_.size(); ++m) {
    names.push_back("EPSP" + std::to_string(m));
    names.push_back("EPSM" + std::to_string(m));
  }
  for (std::size_t c = 0; c < columns_.size(); ++c) names.push_back("X" + std::to_string(c));
  std::vector<std::string> rows;
  for (std::size_t m = 0; m < market_.size(); ++m) rows.push_back("M" + std::to_string(m));
  rows.push_back("CONV");
  lp::write_mps(os, "L1RMP", lp_->costs(), lp_->columns(), lp_->rhs(), names, rows);
}

void build_and_solve(L1State& s) {
  const lp::LpStatus st = s.lp_->solve();
  if (st != lp::LpStatus::Optimal) throw LpFailure("L1 master: " + lp::to_string(st));
  const auto& z = s.lp_->primal();
  const auto& y = s.lp_->duals();
  const std::size_t rows = s.market_.size();
  s.eps_plus_.assign(rows, 0.0);
  s.eps_minus_.assign(rows, 0.0);
  for (std::size_t m = 0; m < rows; ++m) {
    s.eps_plus_[m] = z[2 * m];
    s.eps_minus_[m] = z[2 * m + 1];
  }
  s.x_.assign(s.columns_.size(), 0.0);
  for (std::size_t c = 0; c < s.columns_.size(); ++c) s.x_[c] = z[s.lp_column_[c]];
  s.mu_.assign(y.begin(), y.begin() + static_cast<long>(rows));
  s.gamma_ = y[rows];
  s.objective_ = s.lp_->objective();
  s.solved_ = true;
}

L1Duals l1_duals(const L1State& state) {
  if (!state.solved()) throw std::logic_error("L1 master has not been solved");
  return {state.mu(), state.gamma()};
}

}  // namespace rankcg::l1
