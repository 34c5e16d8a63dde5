#include "rankcg/em.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <set>
#include <stdexcept>

namespace rankcg::em {

std::vector<ConsumerType> initial_columns(const TransactionLog& log, int n) {
  if (n < 1) throw std::invalid_argument("empty product universe");
  std::vector<ConsumerType> cols;
  for (Product j = 1; j <= n; ++j) cols.push_back({{j}, 1});
  cols.push_back(ConsumerType::passive());
  std::set<ProductSet> bundles;
  for (const auto& t : log.transactions)
    if (t.bundle.size() >= 2) bundles.insert(t.bundle);
  for (const auto& b : bundles) cols.push_back({b, static_cast<int>(b.size())});
  return cols;
}

EmState::EmState(const TransactionLog& log, std::vector<ConsumerType> cols) {
  data = aggregate(log);
  for (const auto& w : data) total += static_cast<double>(w.count);
  for (const auto& c : cols) add_column(c);
  x.assign(columns.size(), columns.empty() ? 0.0 : 1.0 / static_cast<double>(columns.size()));
  refresh_y();
}

bool EmState::add_column(const ConsumerType& c) {
  const ConsumerType canon = c.canonical();
  if (std::find(columns.begin(), columns.end(), canon) != columns.end()) return false;
  std::vector<int> rows;
  for (int t = 0; t < static_cast<int>(data.size()); ++t)
    if (is_compatible(canon, data[t].txn)) rows.push_back(t);
  columns.push_back(canon);
  support.push_back(std::move(rows));
  x.push_back(0.0);
  return true;
}

void EmState::refresh_y() {
  y.assign(data.size(), 0.0);
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (int t : support[c]) y[t] += x[c];
  loglik = 0.0;
  for (std::size_t t = 0; t < data.size(); ++t)
    loglik += static_cast<double>(data[t].count) * std::log(y[t]);
}

void em_solve(EmState& s, const EmOptions& opts) {
  s.loglik_path.clear();
  s.refresh_y();
  for (double v : s.y)
    if (!(v > 0.0)) throw DataError("EM coverage violated: a transaction has no compatible column");
  std::vector<double> ratio(s.data.size());
  for (int it = 0; it < opts.max_iter; ++it) {
    for (std::size_t t = 0; t < s.data.size(); ++t)
      ratio[t] = static_cast<double>(s.data[t].count) / s.y[t];
    double sum = 0.0;
    for (std::size_t c = 0; c < s.columns.size(); ++c) {
      double acc = 0.0;
      for (int t : s.support[c]) acc += ratio[t];
      s.x[c] *= acc / s.total;
      sum += s.x[c];
    }
    for (double& v : s.x) v /= sum;
    const double before = s.loglik;
    s.refresh_y();
    ++s.iterations;
    s.loglik_path.push_back(s.loglik);
    if (s.loglik - before < opts.tol) break;
  }
}

EmDuals em_duals(const EmState& s) {
  EmDuals d;
  d.mu.reserve(s.y.size());
  for (double v : s.y) d.mu.push_back(1.0 / v);
  d.acceptance_threshold = s.total;
  return d;
}

std::vector<pricing::RewardedTransaction> em_rewards(const EmState& s) {
  std::vector<pricing::RewardedTransaction> out;
  out.reserve(s.data.size());
  for (std::size_t t = 0; t < s.data.size(); ++t)
    out.push_back({s.data[t].txn.offer, s.data[t].txn.bundle,
                   static_cast<double>(s.data[t].count) / s.y[t]});
  return out;
}

double chi2_critical(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  return boost::math::quantile(boost::math::chi_squared(1.0), 1.0 - alpha);
}

AcceptResult accept_column(EmState& s, const ConsumerType& candidate, double profit, double alpha,
                           const EmOptions& opts) {
  AcceptResult r;
  if (profit <= s.total + 1e-6) return r;
  const ConsumerType canon = candidate.canonical();
  if (std::find(s.columns.begin(), s.columns.end(), canon) != s.columns.end()) return r;

  EmState backup = s;
  const double before = s.loglik;
  s.add_column(canon);
  const double share = 1.0 / static_cast<double>(s.columns.size());
  for (double& v : s.x) v *= 1.0 - share;
  s.x.back() = share;
  em_solve(s, opts);
  r.resolved = true;
  r.lr = 2.0 * (s.loglik - before);
  r.accepted = r.lr >= chi2_critical(alpha);
  const TraceRecord rec{static_cast<long>(backup.trace.size()) + 1, s.loglik, s.columns.size(),
                        r.accepted};
  if (!r.accepted) s = std::move(backup);
  s.trace.push_back(rec);
  return r;
}

io::json trace_json(const EmState& s) {
  io::json out = io::json::array();
  for (const auto& t : s.trace)
    out.push_back({{"iter", t.iter}, {"loglik", t.loglik}, {"columns", t.columns},
                   {"accepted", t.accepted}});
  return out;
}

}  // namespace rankcg::em
