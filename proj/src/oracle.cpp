#include "rankcg/oracle.hpp"

#include <chrono>
#include <stdexcept>

namespace rankcg::oracle {

namespace {

struct Search {
  const pricing::PricingInstance& inst;
  int max_len;
  ConsumerType current;
  std::vector<bool> used;
  ConsumerType best_type = ConsumerType::passive();
  double best = 0.0;
  long visited = 0;

  double score() const {
    double p = 0.0;
    for (const auto& t : inst.transactions())
      if (is_compatible(current, t.offer, t.bundle)) p += t.mu;
    return p;
  }

  void dfs() {
    if (static_cast<int>(current.sigma.size()) >= max_len) return;
    for (Product j = 1; j <= inst.n(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      current.sigma.push_back(j);
      ++visited;
      if (const double p = score(); p > best) {
        best = p;
        best_type = current;
      }
      dfs();
      current.sigma.pop_back();
      used[j] = false;
    }
  }
};

}  // namespace

pricing::PricingResult brute_force_glop(const pricing::PricingInstance& inst,
                                        const OracleConfig& cfg) {
  if (cfg.n_limit > 9) throw std::invalid_argument("oracle n_limit must be <= 9");
  if (inst.n() > cfg.n_limit) throw std::invalid_argument("instance too large for the oracle");
  const auto start = std::chrono::steady_clock::now();
  const int eta_max = cfg.eta_max.value_or(inst.eta_max());
  const int max_len = std::min(inst.n(), cfg.q ? *cfg.q : inst.length_cap());

  Search s{inst, max_len, ConsumerType::passive(), std::vector<bool>(inst.n() + 1, false)};
  s.best = s.score();
  for (int eta = 1; eta <= eta_max; ++eta) {
    s.current = ConsumerType{{}, eta};
    s.dfs();
  }

  pricing::PricingResult r;
  r.best_type = s.best_type.canonical();
  r.best_profit = s.best;
  r.labels_generated = s.visited;
  r.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace rankcg::oracle
