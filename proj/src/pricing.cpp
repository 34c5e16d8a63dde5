#include "rankcg/pricing.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace rankcg::pricing {

PricingInstance::PricingInstance(int n, int eta_max, std::optional<int> q,
                                 std::vector<RewardedTransaction> transactions)
    : n_(n), eta_max_(eta_max), q_(q) {
  if (n < 1 || n > 63) throw std::invalid_argument("pricing supports 1 <= n <= 63");
  if (eta_max < 1 || eta_max > n) throw std::invalid_argument("eta_max must lie in 1..n");
  if (q && *q < 1) throw std::invalid_argument("list-length cap must be >= 1");
  universe_ = (n == 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << (n + 1)) - 1) & ~std::uint64_t{1};
  touching_.resize(n + 1);
  for (auto& t : transactions) {
    if (t.mu == 0.0) continue;
    t.offer = make_set(std::move(t.offer));
    t.bundle = make_set(std::move(t.bundle));
    if (t.offer.empty()) throw std::invalid_argument("pricing transaction with empty offer");
    if (!is_subset(t.bundle, t.offer)) throw std::invalid_argument("bundle not within offer");
    if (t.offer.front() < 1 || t.offer.back() > n)
      throw std::invalid_argument("pricing transaction references a product outside 1..n");
    const int idx = static_cast<int>(txns_.size());
    for (Product j : t.offer) touching_[j].push_back(idx);
    offer_mask_.push_back(to_mask(t.offer));
    bundle_mask_.push_back(to_mask(t.bundle));
    bundle_size_.push_back(static_cast<int>(t.bundle.size()));
    txns_.push_back(std::move(t));
  }
}

Label root_label(const PricingInstance& inst, int eta) {
  Label root;
  root.eta = eta;
  root.kappa.resize(inst.size());
  for (std::size_t t = 0; t < inst.size(); ++t) {
    const int b = inst.bundle_size(t);
    root.kappa[t] = b <= eta ? 0 : kClosed;
    if (b == 0) root.profit += inst.mu(t);
  }
  root.unreachable = unreachable_update(root, inst);
  return root;
}

std::vector<Label> init_labels(const PricingInstance& inst) {
  std::vector<Label> roots;
  for (int eta = 1; eta <= inst.eta_max(); ++eta) roots.push_back(root_label(inst, eta));
  return roots;
}

std::uint64_t unreachable_update(const Label& label, const PricingInstance& inst) {
  // A product stays useful while it can complete an open bundle, or block a
  // negative reward that is collected or could still be collected.
  std::uint64_t needed = 0;
  for (std::size_t t = 0; t < inst.size(); ++t) {
    const Kappa k = label.kappa[t];
    if (k < 0) continue;
    if (k < inst.bundle_size(t)) needed |= inst.bundle_mask(t);
    if (inst.mu(t) < 0.0) needed |= inst.rest_mask(t);
  }
  return label.unreachable | (inst.universe() & ~label.visited & ~needed);
}

namespace {

void apply_product(Label& next, Product j, const PricingInstance& inst) {
  const std::uint64_t bit = std::uint64_t{1} << j;
  for (int t : inst.touching(j)) {
    Kappa& k = next.kappa[t];
    if (k < 0) continue;
    const int b = inst.bundle_size(t);
    if (inst.bundle_mask(t) & bit) {
      ++k;
      if (k == b) next.profit += inst.mu(t);
      if (k == next.eta) k = kClosed;
    } else {
      if (k >= b) next.profit -= inst.mu(t);
      k = kClosed;
    }
  }
  next.last = j;
  next.visited |= bit;
  ++next.length;
}

void check_extension(const Label& label, Product j, const PricingInstance& inst) {
  if (j < 1 || j > inst.n()) throw std::invalid_argument("extension product outside 1..n");
  const std::uint64_t bit = std::uint64_t{1} << j;
  if (label.visited & bit) throw std::invalid_argument("product already in the list");
  if (label.unreachable & bit) throw std::invalid_argument("product is unreachable");
  if (label.length >= inst.length_cap()) throw std::invalid_argument("list length cap reached");
}

}  // namespace

Label extend(const Label& label, Product j, const PricingInstance& inst, bool track_unreachable) {
  check_extension(label, j, inst);
  Label next = label;
  apply_product(next, j, inst);
  next.unreachable = track_unreachable ? unreachable_update(next, inst) : 0;
  return next;
}

double completion_bound(const Label& label, const PricingInstance& inst) {
  double bound = label.profit;
  for (std::size_t t = 0; t < inst.size(); ++t) {
    const Kappa k = label.kappa[t];
    if (k < 0) continue;
    const double mu = inst.mu(t);
    if (mu > 0.0 && k < inst.bundle_size(t)) bound += mu;
    if (mu < 0.0 && k >= inst.bundle_size(t)) bound -= mu;
  }
  return bound;
}

bool completion_bound_prune(const Label& label, double lower_bound, const PricingInstance& inst) {
  return completion_bound(label, inst) <= lower_bound;
}

namespace {

enum class Status { Closed, Open, Collected };

Status status_of(Kappa k, int b) {
  if (k < 0) return Status::Closed;
  return k >= b ? Status::Collected : Status::Open;
}

// Largest amount by which `other` can overtake `label` on one transaction
// under any common completion. Collected transactions are only ever open when
// |B| < η, and open ones can close on completion only when |B| = η.
double overtake(Kappa kl, int eta_l, Kappa ko, int eta_o, int b, double mu) {
  const Status sl = status_of(kl, b);
  const Status so = status_of(ko, b);
  if (mu > 0.0) {
    if (so == Status::Open) {
      switch (sl) {
        case Status::Closed: return mu;
        case Status::Collected: return eta_o == b ? 2.0 * mu : mu;
        case Status::Open:
          if (kl != ko) return mu;
          return (eta_o == b && eta_l > b) ? mu : 0.0;
      }
    }
    if (so == Status::Closed && sl == Status::Collected) return mu;
    return 0.0;
  }
  const double a = -mu;
  if (sl == Status::Open) {
    if (so != Status::Open) return a;
    if (kl < ko) return 0.0;
    if (kl > ko) return a;
    return (eta_l == b && eta_o > b) ? a : 0.0;
  }
  if (sl == Status::Closed && so == Status::Collected) return a;
  return 0.0;
}

}  // namespace

bool dominates(const Label& label, const Label& other, const PricingInstance& inst,
               DominanceOptions opts) {
  if (opts.require_inclusion) {
    const std::uint64_t mine = label.visited | label.unreachable;
    const std::uint64_t theirs = other.visited | other.unreachable;
    if (mine & ~theirs) return false;
  }
  if (inst.q() && *inst.q() < inst.n() && label.length > other.length) return false;
  double slack = label.profit - other.profit;
  if (slack < 0.0) return false;
  for (std::size_t t = 0; t < inst.size(); ++t) {
    const Kappa kl = label.kappa[t];
    const Kappa ko = other.kappa[t];
    if (kl < 0 && ko < 0) continue;
    slack -= overtake(kl, label.eta, ko, other.eta, inst.bundle_size(t), inst.mu(t));
    if (slack < 0.0) return false;
  }
  return true;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Processed labels grouped by their N ∪ U signature.
class DominanceStore {
 public:
  explicit DominanceStore(bool by_signature) : by_signature_(by_signature) {}

  template <typename Pred>
  bool any_dominator(std::uint64_t key, Pred&& dominated_by) const {
    if (!by_signature_) {
      for (long idx : flat_)
        if (dominated_by(idx)) return true;
      return false;
    }
    const int bits = std::popcount(key);
    if (bits < 20 && (std::size_t{1} << bits) < groups_.size()) {
      // Walk the subsets of key.
      std::uint64_t sub = key;
      while (true) {
        if (auto it = slot_.find(sub); it != slot_.end())
          for (long idx : groups_[it->second].second)
            if (dominated_by(idx)) return true;
        if (sub == 0) break;
        sub = (sub - 1) & key;
      }
      return false;
    }
    for (const auto& [k, members] : groups_) {
      if (k & ~key) continue;
      for (long idx : members)
        if (dominated_by(idx)) return true;
    }
    return false;
  }

  void add(std::uint64_t key, long idx) {
    if (!by_signature_) {
      flat_.push_back(idx);
      return;
    }
    auto [it, inserted] = slot_.try_emplace(key, groups_.size());
    if (inserted) groups_.emplace_back(key, std::vector<long>{});
    groups_[it->second].second.push_back(idx);
  }

 private:
  bool by_signature_;
  std::vector<long> flat_;
  std::vector<std::pair<std::uint64_t, std::vector<long>>> groups_;
  std::unordered_map<std::uint64_t, std::size_t> slot_;
};

struct QueueEntry {
  double key;
  long seq;
  long idx;
  bool operator<(const QueueEntry& o) const {
    if (key != o.key) return key < o.key;
    return seq > o.seq;
  }
};

ConsumerType backtrack(const std::vector<Label>& pool, long idx) {
  ConsumerType c;
  c.eta = pool[idx].eta;
  for (long i = idx; i >= 0; i = pool[i].pred)
    if (pool[i].last != 0) c.sigma.push_back(pool[i].last);
  std::reverse(c.sigma.begin(), c.sigma.end());
  return c.canonical();
}

void release(Label& l) { std::vector<Kappa>().swap(l.kappa); }

}  // namespace

PricingResult solve_pricing(const PricingInstance& inst, const PricingOptions& opts,
                            const std::optional<ConsumerType>& seed) {
  if (inst.size() == 0) throw std::invalid_argument("pricing instance has no transactions");
  if (opts.single_purchase && inst.eta_max() != 1)
    throw std::invalid_argument("single-purchase dominance requires eta_max = 1");
  if (opts.bucket_cap && *opts.bucket_cap < 1) throw std::invalid_argument("bucket cap must be >= 1");

  const auto start = Clock::now();
  PricingResult result;
  double best = -std::numeric_limits<double>::infinity();
  long best_idx = -1;
  bool have_best = false;
  if (seed) {
    result.best_type = seed->canonical();
    best = replay_profit(inst, result.best_type);
    have_best = true;
  }

  std::vector<Label> pool;
  std::priority_queue<QueueEntry> queue;
  long seq = 0;
  auto push = [&](long idx) {
    const double key = opts.order == QueueOrder::BestBound ? completion_bound(pool[idx], inst) : 0.0;
    queue.push({key, seq++, idx});
  };

  for (Label& root : init_labels(inst)) {
    if (!opts.unreachable) root.unreachable = 0;
    ++result.labels_generated;
    if (!have_best || root.profit > best) {
      best = root.profit;
      best_idx = -1;
      result.best_type = ConsumerType::passive();
      have_best = true;
    }
    pool.push_back(std::move(root));
    push(static_cast<long>(pool.size()) - 1);
  }

  DominanceStore store(!opts.single_purchase);
  std::unordered_map<std::uint32_t, int> buckets;
  const DominanceOptions dom_opts{.require_inclusion = !opts.single_purchase};
  const int cap = inst.length_cap();
  long pops = 0;

  while (!queue.empty()) {
    if (opts.time_limit && (++pops & 255) == 0 && seconds_since(start) > *opts.time_limit) {
      result.complete = false;
      break;
    }
    const long idx = queue.top().idx;
    queue.pop();

    if (opts.completion_bounds && completion_bound_prune(pool[idx], best, inst)) {
      ++result.labels_pruned;
      release(pool[idx]);
      continue;
    }
    std::uint32_t bucket_key = 0;
    if (opts.bucket_cap) {
      const Label& l = pool[idx];
      bucket_key = (static_cast<std::uint32_t>(l.last) << 16) |
                   (static_cast<std::uint32_t>(l.length) << 8) | static_cast<std::uint32_t>(l.eta);
      if (buckets[bucket_key] >= *opts.bucket_cap) {
        ++result.labels_pruned;
        release(pool[idx]);
        continue;
      }
    }
    const std::uint64_t key = pool[idx].visited | pool[idx].unreachable;
    if (opts.dominance &&
        store.any_dominator(key, [&](long other) {
          return dominates(pool[other], pool[idx], inst, dom_opts);
        })) {
      ++result.labels_dominated;
      release(pool[idx]);
      continue;
    }
    if (opts.dominance) store.add(key, idx);
    if (opts.bucket_cap) ++buckets[bucket_key];

    if (pool[idx].length >= cap) continue;
    const std::uint64_t blocked = pool[idx].visited | pool[idx].unreachable;
    for (Product j = 1; j <= inst.n(); ++j) {
      if (blocked & (std::uint64_t{1} << j)) continue;
      Label next = pool[idx];
      apply_product(next, j, inst);
      next.unreachable = opts.unreachable ? unreachable_update(next, inst) : 0;
      next.pred = idx;
      ++result.labels_generated;
      const bool improves = next.profit > best;
      if (!improves && opts.completion_bounds && completion_bound_prune(next, best, inst)) {
        ++result.labels_pruned;
        continue;
      }
      pool.push_back(std::move(next));
      const long nidx = static_cast<long>(pool.size()) - 1;
      if (improves) {
        best = pool[nidx].profit;
        best_idx = nidx;
      }
      if (opts.completion_bounds && completion_bound_prune(pool[nidx], best, inst)) {
        ++result.labels_pruned;
        release(pool[nidx]);
        continue;
      }
      push(nidx);
    }
  }

  if (best_idx >= 0) result.best_type = backtrack(pool, best_idx);
  result.best_profit = best;
  result.wall_time = seconds_since(start);
  return result;
}

PricingResult solve_pricing_heuristic(const PricingInstance& inst, int bucket_cap,
                                      const std::optional<ConsumerType>& seed) {
  PricingOptions opts;
  opts.bucket_cap = bucket_cap;
  return solve_pricing(inst, opts, seed);
}

std::vector<Label> replay(const PricingInstance& inst, const ConsumerType& c) {
  const ConsumerType canon = c.canonical();
  std::vector<Label> chain{root_label(inst, std::max(1, canon.eta))};
  for (Product j : canon.sigma) {
    if (j < 1 || j > inst.n()) throw std::invalid_argument("type references a product outside 1..n");
    Label next = chain.back();
    if (next.visited & (std::uint64_t{1} << j)) throw std::invalid_argument("type repeats a product");
    apply_product(next, j, inst);
    next.unreachable = unreachable_update(next, inst) & ~next.visited;
    next.pred = static_cast<long>(chain.size()) - 1;
    chain.push_back(std::move(next));
  }
  return chain;
}

double replay_profit(const PricingInstance& inst, const ConsumerType& c) {
  return replay(inst, c).back().profit;
}

double direct_profit(const PricingInstance& inst, const ConsumerType& c) {
  double p = 0.0;
  for (const auto& t : inst.transactions())
    if (is_compatible(c, t.offer, t.bundle)) p += t.mu;
  return p;
}

}  // namespace rankcg::pricing
