#include "rankcg/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "rankcg/io.hpp"

namespace rankcg::datagen {

std::string to_string(Family f) {
  switch (f) {
    case Family::SingleRandom: return "single_random";
    case Family::SingleStructured: return "single_structured";
    case Family::MultipurchaseRankedList: return "multipurchase_rankedlist";
    case Family::LimitedList: return "limited_list";
    case Family::MultipurchaseProbit: return "multipurchase_probit";
  }
  return "unknown";
}

Family family_from_string(const std::string& s) {
  for (Family f : {Family::SingleRandom, Family::SingleStructured, Family::MultipurchaseRankedList,
                   Family::LimitedList, Family::MultipurchaseProbit})
    if (to_string(f) == s) return f;
  throw std::invalid_argument("unknown family: " + s);
}

namespace {

template <class T>
bool one_of(T v, std::initializer_list<T> options) {
  return std::find(options.begin(), options.end(), v) != options.end();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("parameter out of range: " + what);
}

int arrivals(const GenSpec& s) {
  return s.arrivals_per_period.value_or(s.family == Family::MultipurchaseRankedList ? 50 : 10);
}

const std::vector<int> kPeriods{30, 75, 150, 300, 600};

}  // namespace

void GenSpec::validate() const {
  require(n >= 1 && n <= 63, "n");
  require(k >= 1, "k");
  require(p1 >= 0.0 && p1 <= 1.0, "p1");
  require(periods >= 1, "periods");
  require(arrivals(*this) >= 1, "arrivals_per_period");
  require(pd >= 0.0 && pd < 1.0, "pd");
  require(F >= 0, "F");
  require(transactions >= 1, "transactions");
  require(eta_max >= 1, "eta_max");
  const bool grid_periods = std::find(kPeriods.begin(), kPeriods.end(), periods) != kPeriods.end();
  switch (family) {
    case Family::SingleRandom:
      if (strict_ranges) {
        require(n == 10, "n (single_random uses n = 10)");
        require(one_of(p1, {0.2, 0.5, 0.9}), "p1");
        require(one_of(k, {10, 100}), "k");
        require(grid_periods, "periods");
      }
      break;
    case Family::SingleStructured:
      require(n == 15, "n (single_structured uses 5 items x 3 levels)");
      if (strict_ranges) {
        require(one_of(p1, {0.2, 0.5, 0.9}), "p1");
        require(one_of(k, {10, 100}), "k");
        require(grid_periods, "periods");
      }
      break;
    case Family::MultipurchaseRankedList:
      if (strict_ranges) {
        require(one_of(n, {10, 15}), "n");
        require(one_of(p1, {0.2, 0.5, 0.8}), "p1");
        require(one_of(k, {25, 50, 100}), "k");
        require(one_of(eta_max, {2, 3, 4, 5}), "eta_max");
        require(grid_periods, "periods");
      }
      break;
    case Family::LimitedList:
      if (strict_ranges) {
        require(n == 20, "n");
        require(one_of(k, {100, 500}), "k");
        require(one_of(pd, {0.0, 0.25}), "pd");
        require(one_of(F, {1, 2, 4}), "F");
        require(one_of(transactions, {5000L, 10000L}), "transactions");
      }
      if (strong_substitution) require(n >= 8, "n (strong substitution needs n >= 8)");
      break;
    case Family::MultipurchaseProbit:
      if (strict_ranges) {
        require(one_of(n, {5, 10, 15, 20, 25, 30}), "n");
        require(transactions == 1000, "transactions");
      }
      require(n >= 2, "n");
      require(transactions >= 2, "transactions");
      break;
  }
}

namespace {

std::vector<Product> iota_products(int n) {
  std::vector<Product> v(n);
  std::iota(v.begin(), v.end(), 1);
  return v;
}

ProductSet uniform_subset(SplitMix64& rng, int n, int size) {
  auto all = iota_products(n);
  rng.shuffle(all);
  all.resize(size);
  return make_set(all);
}

// Passive type with mass p1 plus `lists` with U(0,1) weights scaled to 1−p1.
// Identical types are merged so the model stays duplicate-free.
ChoiceModel assemble(SplitMix64& rng, double p1, const std::vector<ConsumerType>& lists,
                     bool include_passive) {
  std::vector<double> w(lists.size());
  double total = 0.0;
  for (double& v : w) total += (v = rng.uniform());
  std::map<ConsumerType, double> merged;
  if (include_passive) merged[ConsumerType::passive()] += p1;
  const double rest = include_passive ? 1.0 - p1 : 1.0;
  for (std::size_t i = 0; i < lists.size(); ++i) {
    const double share = total > 0.0 ? rest * w[i] / total : rest / static_cast<double>(lists.size());
    merged[lists[i].canonical()] += share;
  }
  if (lists.empty() && include_passive) merged[ConsumerType::passive()] = 1.0;
  ChoiceModel m;
  for (const auto& [c, p] : merged) {
    if (p <= 0.0 && !(c.is_passive() && merged.size() == 1)) continue;
    m.types.push_back(c);
    m.probs.push_back(p);
  }
  return m;
}

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> c(p.size());
  std::partial_sum(p.begin(), p.end(), c.begin());
  return c;
}

template <class OfferSampler>
TransactionLog periodic_log(const ChoiceModel& truth, int n, long count, int per_period,
                            SplitMix64& rng, OfferSampler&& offer, std::vector<int>* types) {
  TransactionLog log;
  log.n = n;
  const auto cum = cumulative(truth.probs);
  ProductSet s;
  for (long i = 0; i < count; ++i) {
    if (i % per_period == 0) s = offer(rng);
    const std::size_t c = rng.categorical(cum);
    log.transactions.push_back({s, purchase_outcome(truth.types[c], s)});
    if (types) types->push_back(static_cast<int>(c));
  }
  return log;
}

long test_size(long train) { return static_cast<long>(std::ceil(0.3 * static_cast<double>(train))); }

template <class OfferSampler>
Instance ranked_instance(const GenSpec& spec, ChoiceModel truth, int per_period,
                         OfferSampler&& offer) {
  Instance inst;
  inst.n = spec.n;
  const long train = static_cast<long>(spec.periods) * per_period;
  auto train_rng = SplitMix64::stream(spec.seed, to_string(spec.family) + "/train");
  auto test_rng = SplitMix64::stream(spec.seed, to_string(spec.family) + "/test");
  inst.train = periodic_log(truth, spec.n, train, per_period, train_rng, offer, &inst.train_types);
  inst.test = periodic_log(truth, spec.n, test_size(train), per_period, test_rng, offer, nullptr);
  inst.truth = std::move(truth);
  return inst;
}

std::vector<double> revenues(const GenSpec& spec) {
  auto rng = SplitMix64::stream(spec.seed, to_string(spec.family) + "/revenue");
  std::vector<double> r(spec.n);
  for (double& v : r) v = rng.uniform(1.0, 5.0);
  return r;
}

}  // namespace

Instance gen_single_random(const GenSpec& spec) {
  spec.validate();
  auto rng = SplitMix64::stream(spec.seed, "single_random/truth");
  std::vector<ConsumerType> lists;
  for (int i = 1; i < spec.k; ++i) {
    auto perm = iota_products(spec.n);
    rng.shuffle(perm);
    lists.push_back({perm, 1});
  }
  ChoiceModel truth = assemble(rng, spec.p1, lists, true);
  const int lo = std::min(3, spec.n), hi = std::min(6, spec.n);
  Instance inst = ranked_instance(spec, std::move(truth), arrivals(spec), [&](SplitMix64& r) {
    return uniform_subset(r, spec.n, static_cast<int>(r.uniform_int(lo, hi)));
  });
  inst.revenues = revenues(spec);
  return inst;
}

ConsumerType sample_structured_type(SplitMix64& rng) {
  auto perm = iota_products(15);
  rng.shuffle(perm);
  // Keep the item slots of the shuffled list but hand out each item's price
  // levels in increasing order.
  int next_level[5] = {0, 0, 0, 0, 0};
  for (Product& p : perm) {
    const int item = (p - 1) / 3;
    p = 3 * item + next_level[item]++ + 1;
  }
  perm.resize(static_cast<std::size_t>(rng.uniform_int(1, 15)));
  return {perm, 1};
}

Instance gen_single_structured(const GenSpec& spec) {
  spec.validate();
  auto rng = SplitMix64::stream(spec.seed, "single_structured/truth");
  std::vector<ConsumerType> lists;
  for (int i = 1; i < spec.k; ++i) lists.push_back(sample_structured_type(rng));
  ChoiceModel truth = assemble(rng, spec.p1, lists, true);
  Instance inst = ranked_instance(spec, std::move(truth), arrivals(spec), [](SplitMix64& r) {
    std::vector<int> items{0, 1, 2, 3, 4};
    r.shuffle(items);
    items.resize(static_cast<std::size_t>(r.uniform_int(3, 5)));
    std::vector<Product> s;
    for (int i : items) s.push_back(3 * i + static_cast<int>(r.uniform_int(0, 2)) + 1);
    return make_set(s);
  });
  inst.revenues = revenues(spec);
  return inst;
}

Instance gen_multipurchase_rankedlist(const GenSpec& spec) {
  spec.validate();
  auto rng = SplitMix64::stream(spec.seed, "multipurchase_rankedlist/truth");
  std::vector<ConsumerType> lists;
  for (int i = 1; i < spec.k; ++i) {
    auto perm = iota_products(spec.n);
    rng.shuffle(perm);
    perm.resize(static_cast<std::size_t>(rng.uniform_int(1, spec.n)));
    const int cap = std::min<int>(spec.eta_max, static_cast<int>(perm.size()));
    lists.push_back({perm, static_cast<int>(rng.uniform_int(1, cap))});
  }
  ChoiceModel truth = assemble(rng, spec.p1, lists, true);
  const int lo = std::min(5, spec.n), hi = std::min(10, spec.n);
  Instance inst = ranked_instance(spec, std::move(truth), arrivals(spec), [&](SplitMix64& r) {
    return uniform_subset(r, spec.n, static_cast<int>(r.uniform_int(lo, hi)));
  });
  inst.revenues = revenues(spec);
  return inst;
}

std::vector<Product> sample_limited_list(SplitMix64& rng, int n, double pd, int F) {
  long a = rng.uniform_int(1, n), b = rng.uniform_int(1, n);
  if (a > b) std::swap(a, b);
  std::vector<Product> list;
  for (long j = a; j <= b; ++j)
    if (!rng.bernoulli(pd)) list.push_back(static_cast<Product>(j));
  for (int f = 0; f < F; ++f) {
    if (!rng.bernoulli(0.5) || list.size() < 2) continue;
    const auto pos = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(list.size()) - 2));
    std::swap(list[pos], list[pos + 1]);
  }
  return list;
}

Instance gen_limited_list(const GenSpec& spec) {
  spec.validate();
  auto rng = SplitMix64::stream(spec.seed, "limited_list/truth");
  std::vector<ConsumerType> lists;
  while (static_cast<int>(lists.size()) < spec.k) {
    auto list = sample_limited_list(rng, spec.n, spec.pd, spec.F);
    if (list.empty() || (spec.strong_substitution && list.size() < 8)) continue;
    lists.push_back({list, 1});
  }
  ChoiceModel truth = assemble(rng, 0.0, lists, false);
  Instance inst;
  inst.n = spec.n;
  auto offer = [&](SplitMix64& r) {
    for (;;) {
      std::vector<Product> s;
      for (Product j = 1; j <= spec.n; ++j)
        if (r.bernoulli(0.5)) s.push_back(j);
      if (!s.empty()) return ProductSet(s);
    }
  };
  auto train_rng = SplitMix64::stream(spec.seed, "limited_list/train");
  auto test_rng = SplitMix64::stream(spec.seed, "limited_list/test");
  inst.train = periodic_log(truth, spec.n, spec.transactions, 1, train_rng, offer, &inst.train_types);
  inst.test = periodic_log(truth, spec.n, test_size(spec.transactions), 1, test_rng, offer, nullptr);
  inst.truth = std::move(truth);
  inst.revenues = revenues(spec);
  return inst;
}

std::vector<double> probit_quantity_pmf() {
  std::vector<double> p{1.0, std::exp(0.6), std::exp(1.2)};
  const double z = p[0] + p[1] + p[2];
  for (double& v : p) v /= z;
  return p;
}

Instance gen_multipurchase_probit(const GenSpec& spec) {
  spec.validate();
  const int n = spec.n;
  auto prng = SplitMix64::stream(spec.seed, "multipurchase_probit/params");
  ProbitParams par;
  for (int j = 0; j < n; ++j) {
    par.V.push_back(prng.normal(3.0, 1.0));
    par.r.push_back(prng.uniform(1.0, 5.0));
    par.beta.push_back(-std::abs(prng.normal()));
  }
  const auto qcum = cumulative(probit_quantity_pmf());
  const int lo = std::max(2, static_cast<int>(std::ceil(n / 3.0)));
  const int hi = std::max(lo, (2 * n) / 3);

  auto rng = SplitMix64::stream(spec.seed, "multipurchase_probit/transactions");
  TransactionLog all;
  all.n = n;
  std::vector<std::pair<double, Product>> util;
  for (long t = 0; t < spec.transactions; ++t) {
    const ProductSet s = uniform_subset(rng, n, static_cast<int>(rng.uniform_int(lo, hi)));
    const int q = static_cast<int>(rng.categorical(qcum));
    const double outside = rng.normal();
    util.clear();
    for (Product j : s) {
      const double u = par.V[j - 1] - par.beta[j - 1] * par.r[j - 1] + rng.normal();
      if (u > outside) util.emplace_back(-u, j);  // ties fall to the smaller index
    }
    std::sort(util.begin(), util.end());
    std::vector<Product> bundle;
    for (int i = 0; i < q && i < static_cast<int>(util.size()); ++i) bundle.push_back(util[i].second);
    all.transactions.push_back({s, make_set(bundle)});
  }
  Instance inst;
  inst.n = n;
  const long train = (spec.transactions * 8) / 10;
  inst.train.n = inst.test.n = n;
  inst.train.transactions.assign(all.transactions.begin(), all.transactions.begin() + train);
  inst.test.transactions.assign(all.transactions.begin() + train, all.transactions.end());
  inst.revenues = par.r;
  inst.probit = std::move(par);
  return inst;
}

Instance generate(const GenSpec& spec) {
  switch (spec.family) {
    case Family::SingleRandom: return gen_single_random(spec);
    case Family::SingleStructured: return gen_single_structured(spec);
    case Family::MultipurchaseRankedList: return gen_multipurchase_rankedlist(spec);
    case Family::LimitedList: return gen_limited_list(spec);
    case Family::MultipurchaseProbit: return gen_multipurchase_probit(spec);
  }
  throw std::invalid_argument("unknown family");
}

namespace {

io::json spec_json(const GenSpec& s) {
  return {{"family", to_string(s.family)}, {"n", s.n}, {"k", s.k}, {"p1", s.p1},
          {"eta_max", s.eta_max}, {"periods", s.periods}, {"arrivals_per_period", arrivals(s)},
          {"pd", s.pd}, {"F", s.F}, {"transactions", s.transactions},
          {"strong_substitution", s.strong_substitution}, {"seed", s.seed},
          {"prng", "splitmix64-v1"}};
}

void write_jsonl_file(const std::filesystem::path& p, const TransactionLog& log) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  io::write_jsonl(os, log);
}

}  // namespace

void write_instance_dir(const Instance& inst, const std::filesystem::path& dir,
                        const GenSpec& spec) {
  std::filesystem::create_directories(dir);
  io::json header = io::header_json(inst.train);
  header["generator"] = spec_json(spec);
  header["test_no_arrival_periods"] = inst.test.no_arrival_periods;
  io::write_json_file(dir / "header.json", header);
  write_jsonl_file(dir / "train.jsonl", inst.train);
  write_jsonl_file(dir / "test.jsonl", inst.test);
  if (inst.truth) io::write_json_file(dir / "ground_truth.json", io::to_json(*inst.truth));
  if (inst.revenues) io::write_json_file(dir / "revenues.json", io::json(*inst.revenues));
  if (inst.probit)
    io::write_json_file(dir / "probit_params.json",
                        {{"V", inst.probit->V}, {"beta", inst.probit->beta}, {"r", inst.probit->r}});
}

Instance read_instance_dir(const std::filesystem::path& dir) {
  Instance inst;
  const io::json header = io::read_json_file(dir / "header.json");
  inst.train = io::read_log(dir / "header.json", dir / "train.jsonl");
  io::json test_header = header;
  test_header["no_arrival_periods"] = header.value("test_no_arrival_periods", 0L);
  std::ifstream is(dir / "test.jsonl");
  if (is) inst.test = io::read_jsonl(is, test_header);
  inst.n = inst.train.n;
  if (std::filesystem::exists(dir / "ground_truth.json")) {
    inst.truth = io::model_from_json(io::read_json_file(dir / "ground_truth.json"));
    inst.truth->validate(inst.n);
  }
  if (std::filesystem::exists(dir / "revenues.json"))
    inst.revenues = io::read_json_file(dir / "revenues.json").get<std::vector<double>>();
  if (std::filesystem::exists(dir / "probit_params.json")) {
    const auto j = io::read_json_file(dir / "probit_params.json");
    inst.probit = ProbitParams{j.at("V").get<std::vector<double>>(),
                               j.at("beta").get<std::vector<double>>(),
                               j.at("r").get<std::vector<double>>()};
  }
  return inst;
}

}  // namespace rankcg::datagen
