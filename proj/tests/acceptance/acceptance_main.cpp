// Acceptance checks. One PASS/FAIL line per criterion; the exit status is
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "../support.hpp"
#include "rankcg/assortment.hpp"
#include "rankcg/cg.hpp"
#include "rankcg/datagen.hpp"
#include "rankcg/em.hpp"
#include "rankcg/l1.hpp"
#include "rankcg/metrics.hpp"
#include "rankcg/oracle.hpp"
#include "rankcg/pricing.hpp"

using namespace rankcg;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Criterion 1 and 2 share the instance stream.
std::vector<pricing::PricingInstance> pricing_instances(int count) {
  std::mt19937_64 rng(20240601);
  testing::RandomPricingSpec spec;
  spec.n_min = 2;
  spec.n_max = 7;
  spec.t_min = 1;
  spec.t_max = 30;
  spec.eta_max = 3;
  std::vector<pricing::PricingInstance> out;
  for (int i = 0; i < count; ++i) out.push_back(testing::random_pricing_instance(rng, spec));
  return out;
}

Verdict pricing_exactness() {
  const auto t0 = Clock::now();
  const auto insts = pricing_instances(600);
  double worst = 0.0;
  int mismatches = 0;
  for (const auto& inst : insts) {
    const auto dp = pricing::solve_pricing(inst);
    const auto bf = oracle::brute_force_glop(inst);
    const double gap = std::abs(dp.best_profit - bf.best_profit);
    // The returned type must also earn the reported profit.
    const double replay = std::abs(pricing::direct_profit(inst, dp.best_type) - dp.best_profit);
    worst = std::max({worst, gap, replay});
    if (gap > 1e-9 || replay > 1e-9) ++mismatches;
  }
  const double wall = seconds_since(t0);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu instances, %d mismatches, max gap %.3g, %.1f s",
                insts.size(), mismatches, worst, wall);
  return {mismatches == 0 && wall < 60.0, buf};
}

Verdict acceleration_soundness() {
  const auto insts = pricing_instances(100);
  int profit_mismatch = 0, smaller_or_equal = 0;
  for (const auto& inst : insts) {
    std::vector<pricing::PricingResult> res;
    for (bool bounds : {true, false})
      for (bool unreach : {true, false}) {
        pricing::PricingOptions o;
        o.completion_bounds = bounds;
        o.unreachable = unreach;
        res.push_back(pricing::solve_pricing(inst, o));
      }
    bool same = true, fewest = true;
    for (std::size_t k = 1; k < res.size(); ++k) {
      same = same && std::abs(res[k].best_profit - res[0].best_profit) <= 1e-9;
      fewest = fewest && res[0].labels_generated <= res[k].labels_generated;
    }
    profit_mismatch += !same;
    smaller_or_equal += fewest;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "100 instances x 4 configurations, %d profit mismatches, fully accelerated "
                "label count minimal on %d/100",
                profit_mismatch, smaller_or_equal);
  return {profit_mismatch == 0 && smaller_or_equal >= 95, buf};
}

Verdict single_purchase() {
  std::mt19937_64 rng(77);
  testing::RandomPricingSpec spec;
  spec.eta_max = 1;
  spec.t_max = 30;
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto inst = testing::random_pricing_instance(rng, spec);
    pricing::PricingOptions sp;
    sp.single_purchase = true;
    const double a = pricing::solve_pricing(inst, sp).best_profit;
    const double b = pricing::solve_pricing(inst).best_profit;
    worst = std::max(worst, std::abs(a - b));
    bad += std::abs(a - b) > 1e-9;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "100 instances, %d mismatches, max gap %.3g", bad, worst);
  return {bad == 0, buf};
}

// Every duplicate-free list over {1..n} with every capacity up to eta_max,
// plus the passive type; calls `f` on each.
void for_each_type(int n, int eta_max, const std::function<void(const ConsumerType&)>& f) {
  f(ConsumerType::passive());
  std::vector<Product> list;
  std::vector<bool> used(n + 1, false);
  std::function<void()> rec = [&] {
    if (!list.empty())
      for (int eta = 1; eta <= std::min<int>(eta_max, static_cast<int>(list.size())); ++eta)
        f(ConsumerType{list, eta});
    for (Product j = 1; j <= n; ++j) {
      if (used[j]) continue;
      used[j] = true;
      list.push_back(j);
      rec();
      list.pop_back();
      used[j] = false;
    }
  };
  rec();
}

Verdict l1_certificate() {
  int violations = 0, nonmonotone = 0;
  double worst_rc = -1e300;
  long types_checked = 0;
  for (int i = 0; i < 50; ++i) {
    datagen::GenSpec spec;
    spec.family = datagen::Family::SingleRandom;
    spec.n = 4 + i % 3;
    spec.k = 5 + i % 6;
    spec.p1 = 0.5;
    spec.periods = 10;
    spec.seed = 1000 + static_cast<std::uint64_t>(i);
    spec.strict_ranges = false;
    const auto inst = datagen::generate(spec);
    cg::CgConfig cfg;
    cfg.master = cg::Master::L1;
    cfg.eta_max = 1;
    const auto out = cg::run_estimation(inst.train, cfg);
    const auto& h = out.report.objective_history;
    for (std::size_t k = 1; k < h.size(); ++k)
      if (h[k] > h[k - 1] + 1e-9 * std::max(1.0, std::abs(h[k - 1]))) ++nonmonotone;
    for_each_type(inst.n, cfg.eta_max, [&](const ConsumerType& c) {
      double rc = out.final_gamma;
      for (const auto& r : out.final_rewards)
        if (is_compatible(c, r.offer, r.bundle)) rc += r.mu;
      worst_rc = std::max(worst_rc, rc);
      violations += rc > 1e-6;
      ++types_checked;
    });
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "50 instances, %ld types enumerated, %d with reduced cost > 1e-6 (max %.3g), "
                "%d objective increases",
                types_checked, violations, worst_rc, nonmonotone);
  return {violations == 0 && nonmonotone == 0, buf};
}

Verdict em_behaviour() {
  std::mt19937_64 rng(5150);
  int drops = 0, simplex = 0, duals = 0;
  double worst_drop = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = 3 + i % 4;
    ChoiceModel truth;
    std::map<ConsumerType, double> w;
    for (int k = 0; k < 4; ++k) w[testing::random_type(rng, n, 3)] += 1.0;
    for (const auto& [c, v] : w) {
      truth.types.push_back(c);
      truth.probs.push_back(v / 4.0);
    }
    std::discrete_distribution<std::size_t> pick(truth.probs.begin(), truth.probs.end());
    TransactionLog log{n, {}, 0};
    for (int t = 0; t < 60; ++t) {
      const auto s = testing::random_subset(rng, n, 1, n);
      log.transactions.push_back(Transaction::make(s, purchase_outcome(truth.types[pick(rng)], s)));
    }
    int h = 1;
    for (const auto& t : log.transactions) h = std::max(h, static_cast<int>(t.bundle.size()));

    em::EmState state(log, em::initial_columns(log, n));
    auto check = [&] {
      for (std::size_t k = 1; k < state.loglik_path.size(); ++k) {
        const double d = state.loglik_path[k] - state.loglik_path[k - 1];
        if (d < -1e-12) {
          ++drops;
          worst_drop = std::min(worst_drop, d);
        }
      }
      double mass = 0.0;
      for (double x : state.x) mass += x;
      simplex += std::abs(mass - 1.0) > 1e-9;
      const auto d = em::em_duals(state);
      for (std::size_t t = 0; t < state.y.size(); ++t) duals += d.mu[t] != 1.0 / state.y[t];
    };
    em::em_solve(state);
    check();
    // A few pricing rounds; each accepted column triggers another EM solve.
    for (int round = 0; round < 4; ++round) {
      pricing::PricingInstance inst(n, h, std::nullopt, em::em_rewards(state));
      const auto best = pricing::solve_pricing(inst);
      const auto acc = em::accept_column(state, best.best_type, best.best_profit);
      check();
      if (!acc.accepted) break;
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "100 instances, %d log-likelihood drops (worst %.3g), %d simplex violations, "
                "%d inexact duals",
                drops, worst_drop, simplex, duals);
  return {drops == 0 && simplex == 0 && duals == 0, buf};
}

Verdict value_trend() {
  const auto t0 = Clock::now();
  double mean[4] = {0, 0, 0, 0};
  for (int i = 0; i < 10; ++i) {
    datagen::GenSpec spec;
    spec.family = datagen::Family::MultipurchaseRankedList;
    spec.n = 10;
    spec.k = 25;
    spec.p1 = 0.2;
    spec.eta_max = 3;
    spec.periods = 150;
    spec.seed = 600 + static_cast<std::uint64_t>(i);
    const auto inst = datagen::generate(spec);
    for (int eta = 1; eta <= 3; ++eta) {
      cg::CgConfig cfg;
      cfg.master = cg::Master::L1;
      cfg.eta_max = eta;
      const auto out = cg::run_estimation(inst.train, cfg);
      mean[eta] += metrics::srmse(out.model, *inst.truth, 10, {.eta = 3}) / 10.0;
    }
  }
  const double wall = seconds_since(t0);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "mean SRMSE eta_hat=1: %.4f, 2: %.4f, 3: %.4f, ratio 3/1 = %.3f, %.0f s", mean[1],
                mean[2], mean[3], mean[3] / mean[1], wall);
  const bool ok = mean[3] <= mean[2] && mean[2] <= mean[1] && mean[3] <= 0.7 * mean[1] &&
                  wall < 1800.0;
  return {ok, buf};
}

Verdict assortment_consistency() {
  int beaten = 0, out_of_range = 0;
  double min_aao = 2.0;
  for (int i = 0; i < 20; ++i) {
    datagen::GenSpec spec;
    spec.family = datagen::Family::MultipurchaseRankedList;
    spec.n = 6 + i % 7;  // 6..12
    spec.k = 10;
    spec.p1 = 0.2;
    spec.eta_max = 2;
    spec.periods = 10;
    spec.seed = 900 + static_cast<std::uint64_t>(i);
    spec.strict_ranges = false;
    const auto inst = datagen::generate(spec);
    const auto& r = *inst.revenues;
    const auto best = assortment::optimize_assortment(*inst.truth, r, inst.n);
    SplitMix64 rng = SplitMix64::stream(spec.seed, "random_offers");
    for (int s = 0; s < 1000; ++s) {
      ProductSet offer;
      for (Product j = 1; j <= inst.n; ++j)
        if (rng.bernoulli(0.5)) offer.push_back(j);
      beaten += assortment::expected_revenue(*inst.truth, offer, r) > best.value + 1e-12;
    }
    cg::CgConfig cfg;
    cfg.eta_max = 2;
    const auto est = cg::run_estimation(inst.train, cfg);
    const auto chosen = assortment::optimize_assortment(est.model, r, inst.n);
    const double aao = assortment::aao_ratio(
        assortment::expected_revenue(*inst.truth, chosen.offer, r), best.value);
    min_aao = std::min(min_aao, aao);
    out_of_range += aao < 0.0 || aao > 1.0 + 1e-12;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "20 instances, %d random offers beat the optimum, %d AAO ratios outside [0,1] "
                "(min %.3f)",
                beaten, out_of_range, min_aao);
  return {beaten == 0 && out_of_range == 0, buf};
}

Verdict monte_carlo() {
  const int m = 10000;
  const assortment::RevenueVector r{3.0, 1.0, 4.0, 1.5, 5.0};
  ChoiceModel single{{ConsumerType{{3, 1, 5}, 2}}, {1.0}};
  int misses = 0;
  double worst = 0.0;
  auto compare = [&](const ChoiceModel& model, std::uint64_t seed) {
    const auto pop = assortment::population_from_model(model, 5, m, seed);
    for (const ProductSet& s :
         {ProductSet{1}, ProductSet{1, 3}, ProductSet{2, 4}, ProductSet{1, 2, 3, 4, 5},
          ProductSet{3, 5}}) {
      const double sim = assortment::simulate_revenue(pop, s, r);
      const double v = assortment::simulate_revenue_variance(pop, s, r);
      const double gap = std::abs(sim - assortment::expected_revenue(model, s, r));
      worst = std::max(worst, gap);
      misses += gap > 3.0 * std::sqrt(v / m);
    }
  };
  compare(single, 1);
  // A mixed population exercises the non-degenerate tolerance as well.
  compare(ChoiceModel{{ConsumerType{{3, 1, 5}, 2}, ConsumerType{{2, 4}, 1}, ConsumerType::passive()},
                      {0.5, 0.3, 0.2}},
          2);

  datagen::ProbitParams params{{1.0, 0.4, 0.8, -0.2}, {-0.3, -0.1, -0.2, -0.05},
                               {2.0, 3.0, 1.5, 4.0}};
  const auto pop = assortment::build_probit_population(params, m, 3);
  std::vector<double> freq(3, 0.0);
  for (int q : pop.quantity) freq.at(q) += 1.0 / m;
  const auto pmf = datagen::probit_quantity_pmf();
  double qgap = 0.0;
  for (int k = 0; k < 3; ++k) qgap = std::max(qgap, std::abs(freq[k] - pmf[k]));
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%d revenue checks outside 3 standard errors (max gap %.3g); quantity "
                "frequencies (%.4f, %.4f, %.4f), max deviation %.4f",
                misses, worst, freq[0], freq[1], freq[2], qgap);
  return {misses == 0 && qgap <= 0.02, buf};
}

Verdict metric_identities() {
  std::mt19937_64 rng(99);
  double worst_self = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int n = 2 + i % 6;
    ChoiceModel m;
    std::map<ConsumerType, double> w;
    for (int k = 0; k < 5; ++k) w[testing::random_type(rng, n, 3)] += 1.0;
    for (const auto& [c, v] : w) {
      m.types.push_back(c);
      m.probs.push_back(v / 5.0);
    }
    worst_self = std::max(worst_self, metrics::srmse(m, m, n));
  }
  const ChoiceModel gen{{ConsumerType{{4, 2, 6, 1}, 2}}, {1.0}};
  TransactionLog test{6, {}, 0};
  for (int t = 0; t < 50; ++t) {
    const auto s = testing::random_subset(rng, 6, 1, 6);
    test.transactions.push_back(Transaction::make(s, purchase_outcome(gen.types[0], s)));
  }
  const double h = metrics::hrmse(gen, test);
  const TransactionLog one{2, {Transaction::make({1, 2}, {1})}, 0};
  const ChoiceModel half{{ConsumerType{{1}, 1}, ConsumerType::passive()}, {0.5, 0.5}};
  const double mr = metrics::mrmse(half, one);
  const double expected = std::sqrt((0.25 + 0.0) / 2.0);
  char buf[256];
  std::snprintf(buf, sizeof buf, "max SRMSE(m,m) = %.3g, HRMSE = %.3g, MRMSE hand case %.15f",
                worst_self, h, mr);
  return {worst_self == 0.0 && h == 0.0 && std::abs(mr - expected) <= 1e-12, buf};
}

Verdict dp_performance() {
  datagen::GenSpec spec;
  spec.family = datagen::Family::MultipurchaseRankedList;
  spec.n = 15;
  spec.k = 50;
  spec.p1 = 0.2;
  spec.eta_max = 3;
  spec.periods = 30;  // 30 periods x 50 arrivals = 1500 transactions
  spec.seed = 15;
  const auto inst = datagen::generate(spec);
  const long count = static_cast<long>(inst.train.transactions.size());

  // Duals of the first restricted masters of both estimators.
  em::EmState em_state(inst.train, em::initial_columns(inst.train, 15));
  em::em_solve(em_state);
  l1::L1State l1_state(empirical_probabilities(inst.train));
  l1::build_and_solve(l1_state);

  double worst = 0.0;
  bool complete = true;
  for (auto rewards : {em::em_rewards(em_state), l1_state.rewards()}) {
    pricing::PricingInstance p(15, 3, std::nullopt, std::move(rewards));
    const auto t0 = Clock::now();
    const auto res = pricing::solve_pricing(p);
    worst = std::max(worst, seconds_since(t0));
    complete = complete && res.complete;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "n = 15, %ld transactions, eta_max = 3, slowest exact call %.3f s",
                count, worst);
  return {complete && count == 1500 && worst < 10.0, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Verdict (*)()>> criteria{
      {"pricing exactness", pricing_exactness},
      {"acceleration soundness", acceleration_soundness},
      {"single-purchase specialization", single_purchase},
      {"l1 optimality certificate", l1_certificate},
      {"EM behaviour", em_behaviour},
      {"multi-purchase value trend", value_trend},
      {"assortment consistency", assortment_consistency},
      {"Monte Carlo evaluator", monte_carlo},
      {"metric identities", metric_identities},
      {"DP performance", dp_performance},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %zu (%s): %s\n", v.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
