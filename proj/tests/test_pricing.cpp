#include <doctest.h>

#include <cmath>

#include "rankcg/oracle.hpp"
#include "rankcg/pricing.hpp"
#include "support.hpp"

using namespace rankcg;
using namespace rankcg::pricing;

namespace {

PricingInstance make(int n, int eta_max, std::vector<RewardedTransaction> t,
                     std::optional<int> q = std::nullopt) {
  return PricingInstance(n, eta_max, q, std::move(t));
}

Label manual_label(const PricingInstance& inst, int eta, double profit, std::uint64_t visited,
                   std::vector<Kappa> kappa) {
  Label l;
  l.eta = eta;
  l.profit = profit;
  l.visited = visited;
  l.length = std::popcount(visited);
  l.kappa = std::move(kappa);
  REQUIRE(l.kappa.size() == inst.size());
  return l;
}

}  // namespace

TEST_CASE("zero rewards are dropped and the instance is validated") {
  auto inst = make(3, 2, {{{1}, {}, 0.0}, {{1, 2}, {1}, 1.0}});
  CHECK(inst.size() == 1);
  CHECK_THROWS_AS(make(3, 4, {}), std::invalid_argument);
  CHECK_THROWS_AS(make(3, 1, {{{1, 4}, {}, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(solve_pricing(make(3, 1, {{{1}, {}, 0.0}})), std::invalid_argument);
}

TEST_CASE("root labels") {
  auto inst = make(3, 3, {{{1}, {}, 0.5}, {{1, 2, 3}, {1, 2, 3}, 1.0}});
  auto r2 = root_label(inst, 2);
  CHECK(r2.profit == 0.5);
  CHECK(r2.kappa == std::vector<Kappa>{0, -1});
  auto r3 = root_label(inst, 3);
  CHECK(r3.profit == 0.5);
  CHECK(r3.kappa == std::vector<Kappa>{0, 0});
  CHECK(init_labels(inst).size() == 3);

  auto no_empty = make(2, 1, {{{1, 2}, {1}, 1.0}});
  CHECK(root_label(no_empty, 1).profit == 0.0);
}

TEST_CASE("label extension follows the status recursion") {
  auto inst = make(2, 2, {{{1, 2}, {1}, 2.0}});
  // Product 2 can only hurt here, so it starts out unreachable; clear U to
  // exercise the raw recursion.
  auto root1 = root_label(inst, 1);
  CHECK((root1.unreachable >> 2 & 1) == 1);
  root1.unreachable = 0;

  auto to1 = extend(root1, 1, inst, false);
  CHECK(to1.profit == 2.0);
  CHECK(to1.kappa[0] == kClosed);
  CHECK(to1.last == 1);
  CHECK(to1.length == 1);

  auto to2 = extend(root1, 2, inst, false);
  CHECK(to2.profit == 0.0);
  CHECK(to2.kappa[0] == kClosed);

  // With η = 2 the collected reward stays open and is lost on an R item.
  auto root2 = root_label(inst, 2);
  root2.unreachable = 0;
  auto collected = extend(root2, 1, inst, false);
  CHECK(collected.kappa[0] == 1);
  CHECK(collected.profit == 2.0);
  auto lost = extend(collected, 2, inst, false);
  CHECK(lost.profit == 0.0);
  CHECK(lost.kappa[0] == kClosed);

  CHECK_THROWS_AS(extend(collected, 1, inst), std::invalid_argument);
  CHECK_THROWS_AS(extend(collected, 3, inst), std::invalid_argument);
}

TEST_CASE("extension respects the list-length cap") {
  auto inst = make(3, 1, {{{1, 2, 3}, {3}, 1.0}}, 1);
  auto root = root_label(inst, 1);
  root.unreachable = 0;
  auto one = extend(root, 1, inst, false);
  CHECK_THROWS_AS(extend(one, 2, inst, false), std::invalid_argument);
}

TEST_CASE("dominance") {
  auto inst = make(3, 2, {{{1, 2}, {1}, 1.0}, {{3}, {3}, 3.0}});
  SUBCASE("reflexive") {
    auto r = root_label(inst, 1);
    CHECK(dominates(r, r, inst));
  }
  SUBCASE("higher profit with equal statuses") {
    auto l = manual_label(inst, 1, 5.0, 0b0010, {kClosed, kClosed});
    auto lp = manual_label(inst, 1, 3.0, 0b0110, {kClosed, kClosed});
    CHECK(dominates(l, lp, inst));
    CHECK_FALSE(dominates(lp, l, inst));
  }
  SUBCASE("an open positive reward on the other label can overturn profit") {
    auto l = manual_label(inst, 1, 5.0, 0b0010, {kClosed, kClosed});
    auto lp = manual_label(inst, 1, 3.0, 0b0010, {kClosed, 0});
    CHECK_FALSE(dominates(l, lp, inst));
  }
  SUBCASE("inclusion of visited products is required") {
    auto l = manual_label(inst, 1, 5.0, 0b0100, {kClosed, kClosed});
    auto lp = manual_label(inst, 1, 3.0, 0b0010, {kClosed, kClosed});
    CHECK_FALSE(dominates(l, lp, inst));
    CHECK(dominates(l, lp, inst, {.require_inclusion = false}));
  }
}

TEST_CASE("dominance accounts for bundles in progress on both labels") {
  // Root (η=2) against root ⊕ 1: both are still collecting {1,2}, but only
  // the second can finish it without revisiting product 1.
  auto inst = make(2, 2, {{{1, 2}, {1, 2}, 1.0}});
  auto root = root_label(inst, 2);
  auto one = extend(root, 1, inst);
  CHECK_FALSE(dominates(root, one, inst));
  CHECK(solve_pricing(inst).best_profit == 1.0);
}

TEST_CASE("completion bound") {
  auto closed = make(1, 1, {{{1}, {1}, 1.0}});
  auto l = manual_label(closed, 1, 4.0, 0b10, {kClosed});
  CHECK(completion_bound_prune(l, 4.0, closed));

  auto open = make(1, 1, {{{1}, {1}, 3.0}});
  CHECK_FALSE(completion_bound_prune(root_label(open, 1), 2.0, open));

  auto negative = make(2, 1, {{{1}, {}, -1.0}});
  auto r = root_label(negative, 1);
  CHECK(r.profit == -1.0);
  CHECK(completion_bound(r, negative) == 0.0);
  auto zero = manual_label(negative, 1, 0.0, 0, {0});
  CHECK_FALSE(completion_bound_prune(zero, 0.5, negative));
}

TEST_CASE("unreachable products") {
  auto inst = make(4, 1, {{{1, 2}, {1}, 1.0}, {{2, 3}, {2}, -1.0}});
  auto root = root_label(inst, 1);
  // Product 4 is in no offer at all.
  CHECK((root.unreachable >> 4 & 1) == 1);
  // Product 1 completes an open positive bundle.
  CHECK((root.unreachable >> 1 & 1) == 0);
  // Product 3 can block the negative transaction.
  CHECK((root.unreachable >> 3 & 1) == 0);
  auto after = extend(extend(root, 1, inst), 3, inst);
  // Every transaction mentioning 2 is now closed.
  CHECK((after.unreachable >> 2 & 1) == 1);
  CHECK((root.unreachable & ~after.unreachable) == 0);
}

TEST_CASE("a blocking product is never marked unreachable") {
  // σ = (2, 1) dodges the negative reward and still collects the positive one.
  auto inst = make(2, 1, {{{1, 2}, {1}, -1.0}, {{1}, {1}, 1.0}});
  auto r = solve_pricing(inst);
  CHECK(r.best_profit == 1.0);
  CHECK(r.best_type == ConsumerType{{2, 1}, 1});
}

TEST_CASE("solve_pricing examples") {
  auto one = solve_pricing(make(2, 1, {{{1, 2}, {1}, 1.0}}));
  CHECK(one.best_profit == 1.0);
  CHECK(one.best_type == ConsumerType{{1}, 1});

  auto two = solve_pricing(make(2, 1, {{{1}, {1}, 1.0}, {{2}, {2}, 1.0}}));
  CHECK(two.best_profit == 2.0);
  CHECK(two.best_type.sigma.size() == 2);

  auto neg = make(3, 2, {{{1, 2}, {1}, -0.5}, {{2, 3}, {2, 3}, -0.25}});
  auto r = solve_pricing(neg);
  CHECK(r.best_profit == oracle::brute_force_glop(neg).best_profit);
  CHECK(r.best_profit == 0.0);
  CHECK(r.best_type.is_passive());
}

TEST_CASE("returned types replay to the returned profit") {
  std::mt19937_64 rng(101);
  for (int it = 0; it < 200; ++it) {
    auto inst = testing::random_pricing_instance(rng, {});
    if (inst.size() == 0) continue;
    auto r = solve_pricing(inst);
    CHECK(replay_profit(inst, r.best_type) == doctest::Approx(r.best_profit).epsilon(1e-12));
    CHECK(direct_profit(inst, r.best_type) == doctest::Approx(r.best_profit).epsilon(1e-12));
  }
}

TEST_CASE("exact pricing matches the brute-force oracle") {
  std::mt19937_64 rng(2024);
  for (int it = 0; it < 150; ++it) {
    auto inst = testing::random_pricing_instance(rng, {});
    if (inst.size() == 0) continue;
    const double dp = solve_pricing(inst).best_profit;
    const double bf = oracle::brute_force_glop(inst).best_profit;
    INFO("iteration " << it);
    CHECK(std::abs(dp - bf) <= 1e-9);
  }
}

TEST_CASE("acceleration switches and dominance never change the optimum") {
  std::mt19937_64 rng(77);
  for (int it = 0; it < 60; ++it) {
    auto inst = testing::random_pricing_instance(rng, {});
    if (inst.size() == 0) continue;
    const double ref = oracle::brute_force_glop(inst).best_profit;
    for (int mask = 0; mask < 8; ++mask) {
      PricingOptions o;
      o.completion_bounds = mask & 1;
      o.unreachable = mask & 2;
      o.dominance = mask & 4;
      CHECK(std::abs(solve_pricing(inst, o).best_profit - ref) <= 1e-9);
    }
    PricingOptions fifo;
    fifo.order = QueueOrder::Fifo;
    CHECK(std::abs(solve_pricing(inst, fifo).best_profit - ref) <= 1e-9);
  }
}

TEST_CASE("single-purchase dominance agrees with the general rule") {
  std::mt19937_64 rng(31);
  testing::RandomPricingSpec spec;
  spec.eta_max = 1;
  for (int it = 0; it < 80; ++it) {
    auto inst = testing::random_pricing_instance(rng, spec);
    if (inst.size() == 0) continue;
    PricingOptions sp;
    sp.single_purchase = true;
    CHECK(std::abs(solve_pricing(inst, sp).best_profit - solve_pricing(inst).best_profit) <= 1e-9);
  }
  CHECK_THROWS_AS(solve_pricing(make(2, 2, {{{1}, {1}, 1.0}}), {.single_purchase = true}),
                  std::invalid_argument);
}

TEST_CASE("limited lists respect the cap and match the capped oracle") {
  std::mt19937_64 rng(9);
  for (int it = 0; it < 60; ++it) {
    auto base = testing::random_pricing_instance(rng, {.random_q = false});
    if (base.size() == 0) continue;
    const int q = 1 + static_cast<int>(rng() % base.n());
    PricingInstance inst(base.n(), base.eta_max(), q, base.transactions());
    auto r = solve_pricing(inst);
    CHECK(static_cast<int>(r.best_type.sigma.size()) <= q);
    CHECK(std::abs(r.best_profit - oracle::brute_force_glop(inst).best_profit) <= 1e-9);
  }
}

TEST_CASE("heuristic pricing is feasible and never beats the exact optimum") {
  std::mt19937_64 rng(55);
  for (int it = 0; it < 100; ++it) {
    auto inst = testing::random_pricing_instance(rng, {});
    if (inst.size() == 0) continue;
    const double exact = solve_pricing(inst).best_profit;
    for (int cap : {1, 2, 5}) {
      auto h = solve_pricing_heuristic(inst, cap);
      CHECK(h.best_profit <= exact + 1e-9);
      CHECK(direct_profit(inst, h.best_type) == doctest::Approx(h.best_profit));
    }
    CHECK(std::abs(solve_pricing_heuristic(inst, 1 << 30).best_profit - exact) <= 1e-9);
  }
}

TEST_CASE("a seed that cannot be beaten is returned") {
  auto inst = make(2, 1, {{{1, 2}, {1}, 1.0}});
  auto r = solve_pricing(inst, {}, ConsumerType{{1, 2}, 1});
  CHECK(r.best_profit == 1.0);
  CHECK(r.best_type == ConsumerType{{1, 2}, 1});
}

TEST_CASE("label replay reproduces statuses and profits, and U only grows") {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 200; ++it) {
    auto inst = testing::random_pricing_instance(rng, {.random_q = false});
    if (inst.size() == 0) continue;
    const auto c = testing::random_type(rng, inst.n(), inst.eta_max());
    const auto chain = replay(inst, c);
    for (std::size_t i = 1; i < chain.size(); ++i) {
      CHECK((chain[i - 1].unreachable & ~chain[i].unreachable & ~chain[i].visited) == 0);
      CHECK(chain[i].length == std::popcount(chain[i].visited));
      CHECK((chain[i].visited & chain[i].unreachable) == 0);
    }
    CHECK(chain.back().profit == doctest::Approx(direct_profit(inst, c)).epsilon(1e-12));
  }
}
