#include "rankcg/cg.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "rankcg/em.hpp"
#include "rankcg/l1.hpp"

namespace rankcg::cg {

std::string to_string(Master m) { return m == Master::Em ? "em" : "l1"; }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::LrFailed: return "lr_failed";
    case Termination::TimeLimit: return "time_limit";
    case Termination::ColumnCap: return "column_cap";
  }
  return "unknown";
}

Master master_from_string(const std::string& s) {
  if (s == "em") return Master::Em;
  if (s == "l1") return Master::L1;
  throw std::invalid_argument("unknown master: " + s);
}

void CgConfig::validate() const {
  if (eta_max < 1) throw std::invalid_argument("eta_max must be >= 1");
  if (q && *q < 1) throw std::invalid_argument("q must be >= 1");
  for (int c : heuristic_caps)
    if (c < 1) throw std::invalid_argument("heuristic caps must be >= 1");
  if (max_columns && *max_columns < 0) throw std::invalid_argument("max_columns must be >= 0");
}

namespace {

using Clock = std::chrono::steady_clock;

class Pricer {
 public:
  Pricer(const TransactionLog& log, const CgConfig& cfg, CgReport& report, Clock::time_point start)
      : n_(log.n), eta_(std::min(cfg.eta_max, log.n)), cfg_(cfg), report_(report), start_(start) {}

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  bool out_of_time() const { return cfg_.time_limit && elapsed() >= *cfg_.time_limit; }

  pricing::PricingResult heuristic(const pricing::PricingInstance& inst, int cap) {
    ++report_.heuristic_calls;
    if (inst.size() == 0) return passive();
    return pricing::solve_pricing_heuristic(inst, cap);
  }

  pricing::PricingResult exact(const pricing::PricingInstance& inst,
                               const std::optional<ConsumerType>& seed = std::nullopt) {
    ++report_.exact_calls;
    if (inst.size() == 0) return passive();
    pricing::PricingOptions opts;
    if (cfg_.time_limit) opts.time_limit = std::max(0.0, *cfg_.time_limit - elapsed());
    return pricing::solve_pricing(inst, opts, seed);
  }

  pricing::PricingInstance instance(std::vector<pricing::RewardedTransaction> rewards) const {
    return pricing::PricingInstance(n_, eta_, cfg_.q, std::move(rewards));
  }

 private:
  static pricing::PricingResult passive() {
    pricing::PricingResult r;
    r.best_type = ConsumerType::passive();
    return r;
  }

  int n_;
  int eta_;
  const CgConfig& cfg_;
  CgReport& report_;
  Clock::time_point start_;
};

bool column_cap_reached(const CgConfig& cfg, const CgReport& r) {
  return cfg.max_columns && r.columns_added >= *cfg.max_columns;
}

void run_l1(const TransactionLog& log, const CgConfig& cfg, Pricer& pricer, CgOutcome& out) {
  CgReport& rep = out.report;
  l1::L1State state(empirical_probabilities(log));
  l1::build_and_solve(state);
  rep.objective_history.push_back(state.objective());
  for (;;) {
    if (pricer.out_of_time()) {
      rep.termination = Termination::TimeLimit;
      break;
    }
    if (column_cap_reached(cfg, rep)) {
      rep.termination = Termination::ColumnCap;
      break;
    }
    ++rep.iterations;
    const auto inst = pricer.instance(state.rewards());
    const double gamma = state.gamma();
    auto improving = [&](const pricing::PricingResult& r) {
      return r.best_profit + gamma > cfg.reduced_cost_tol;
    };
    std::optional<ConsumerType> candidate;
    if (cfg.use_heuristic) {
      for (int cap : cfg.heuristic_caps) {
        const auto r = pricer.heuristic(inst, cap);
        if (improving(r)) {
          candidate = r.best_type;
          break;
        }
      }
    }
    if (!candidate) {
      const auto r = pricer.exact(inst);
      if (!r.complete) {
        rep.termination = Termination::TimeLimit;
        break;
      }
      if (!improving(r)) {
        rep.termination = Termination::Converged;
        break;
      }
      candidate = r.best_type;
    }
    if (!state.add_column(*candidate)) {
      rep.termination = Termination::Converged;
      break;
    }
    ++rep.columns_added;
    l1::build_and_solve(state);
    rep.objective_history.push_back(state.objective());
  }
  rep.final_objective = state.objective();
  out.columns = state.columns();
  out.x = state.x();
  out.final_rewards = state.rewards();
  out.final_gamma = state.gamma();
}

void run_em(const TransactionLog& log, const CgConfig& cfg, Pricer& pricer, CgOutcome& out) {
  CgReport& rep = out.report;
  std::size_t largest = 0;
  for (const auto& t : log.transactions) largest = std::max(largest, t.bundle.size());
  const int cap = std::min(cfg.eta_max, cfg.q.value_or(cfg.eta_max));
  if (static_cast<int>(largest) > cap)
    throw DataError("EM master needs eta_max (and q) >= the largest observed bundle (" +
                    std::to_string(largest) + ")");

  const em::EmOptions opts{cfg.em_tol, cfg.em_max_iter};
  em::EmState state(log, em::initial_columns(log, log.n));
  em::em_solve(state, opts);
  rep.objective_history.push_back(state.loglik);
  for (;;) {
    if (pricer.out_of_time()) {
      rep.termination = Termination::TimeLimit;
      break;
    }
    if (column_cap_reached(cfg, rep)) {
      rep.termination = Termination::ColumnCap;
      break;
    }
    ++rep.iterations;
    const auto inst = pricer.instance(em::em_rewards(state));
    std::optional<ConsumerType> seed;
    if (cfg.use_heuristic && cfg.use_heuristic_lb_seed && !cfg.heuristic_caps.empty())
      seed = pricer.heuristic(inst, cfg.heuristic_caps.front()).best_type;
    const auto r = pricer.exact(inst, seed);
    if (!r.complete) {
      rep.termination = Termination::TimeLimit;
      break;
    }
    const auto verdict = em::accept_column(state, r.best_type, r.best_profit, cfg.alpha, opts);
    if (!verdict.resolved) {
      rep.termination = Termination::Converged;
      break;
    }
    if (!verdict.accepted) {
      rep.termination = Termination::LrFailed;
      break;
    }
    ++rep.columns_added;
    rep.objective_history.push_back(state.loglik);
  }
  rep.final_objective = state.loglik;
  out.columns = state.columns;
  out.x = state.x;
  out.final_rewards = em::em_rewards(state);
}

}  // namespace

CgOutcome run_estimation(const TransactionLog& log, const CgConfig& cfg) {
  cfg.validate();
  log.validate();
  if (log.transactions.empty()) throw DataError("empty transaction log");
  const auto start = Clock::now();
  CgOutcome out;
  Pricer pricer(log, cfg, out.report, start);
  if (cfg.master == Master::L1)
    run_l1(log, cfg, pricer, out);
  else
    run_em(log, cfg, pricer, out);

  double mass = 0.0;
  for (std::size_t c = 0; c < out.columns.size(); ++c)
    if (out.x[c] >= 1e-10) {
      out.model.types.push_back(out.columns[c]);
      out.model.probs.push_back(out.x[c]);
      mass += out.x[c];
    }
  for (double& p : out.model.probs) p /= mass;
  out.model.lambda = estimate_arrival_rate(log);
  out.report.wall_time = pricer.elapsed();
  return out;
}

io::json report_json(const CgReport& r) {
  return {{"iterations", r.iterations},
          {"columns_added", r.columns_added},
          {"final_objective", r.final_objective},
          {"pricing_calls", {{"heuristic", r.heuristic_calls}, {"exact", r.exact_calls}}},
          {"wall_time", r.wall_time},
          {"termination_reason", to_string(r.termination)},
          {"objective_history", r.objective_history}};
}

}  // namespace rankcg::cg
