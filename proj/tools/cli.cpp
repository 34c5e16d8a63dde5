#include "rankcg/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rankcg/assortment.hpp"
#include "rankcg/cg.hpp"
#include "rankcg/datagen.hpp"
#include "rankcg/io.hpp"
#include "rankcg/metrics.hpp"
#include "rankcg/oracle.hpp"
#include "rankcg/pricing.hpp"

namespace rankcg::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

// Usage problems detected after parsing (bad combinations, missing inputs).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path output_dir() {
  const char* env = std::getenv("RANKCG_OUTPUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

ProductSet parse_offer(const std::string& text) {
  std::vector<Product> items;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size() || v < 1) throw std::invalid_argument(tok);
      items.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("bad product id in offer: '" + tok + "'");
    }
  }
  return make_set(std::move(items));
}

std::string join(const ProductSet& s) {
  std::string r;
  for (std::size_t i = 0; i < s.size(); ++i) r += (i ? "," : "") + std::to_string(s[i]);
  return "{" + r + "}";
}

void emit(std::ostream& out, const json& result, const std::string& summary) {
  out << result.dump() << '\n' << summary << '\n';
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int largest_bundle(const TransactionLog& log) {
  int h = 0;
  for (const auto& t : log.transactions) h = std::max(h, static_cast<int>(t.bundle.size()));
  return h;
}

// ---- generate -------------------------------------------------------------

struct GenerateArgs {
  datagen::GenSpec spec;
  std::string family = "single_random";
  std::optional<int> arrivals;
  bool relaxed = false;
  std::string out;
};

void add_generate(CLI::App& app, GenerateArgs& a) {
  auto* sub = app.add_subcommand("generate", "Generate a synthetic instance directory");
  sub->add_option("--family", a.family,
                  "single_random | single_structured | multipurchase_rankedlist | "
                  "limited_list | multipurchase_probit")
      ->capture_default_str();
  sub->add_option("--n", a.spec.n, "Number of products")->capture_default_str();
  sub->add_option("--k", a.spec.k, "Number of ground-truth types")->capture_default_str();
  sub->add_option("--p1", a.spec.p1, "Passive consumer probability")->capture_default_str();
  sub->add_option("--eta-max", a.spec.eta_max, "Largest purchase capacity")->capture_default_str();
  sub->add_option("--periods", a.spec.periods, "Offer periods")->capture_default_str();
  sub->add_option("--arrivals", a.arrivals, "Arrivals per period");
  sub->add_option("--pd", a.spec.pd, "limited_list deletion probability")->capture_default_str();
  sub->add_option("--F", a.spec.F, "limited_list swap attempts")->capture_default_str();
  sub->add_option("--transactions", a.spec.transactions, "Transactions (limited_list, probit)")
      ->capture_default_str();
  sub->add_flag("--strong-substitution", a.spec.strong_substitution,
                "limited_list: keep lists of at least 8 products");
  sub->add_option("--seed", a.spec.seed, "Random seed")->capture_default_str();
  sub->add_flag("--relaxed", a.relaxed, "Allow parameters outside the standard grids");
  sub->add_option("-o,--out", a.out, "Output directory");
}

int run_generate(GenerateArgs& a, std::ostream& out) {
  a.spec.family = datagen::family_from_string(a.family);
  a.spec.arrivals_per_period = a.arrivals;
  a.spec.strict_ranges = !a.relaxed;
  const auto inst = datagen::generate(a.spec);
  const fs::path dir = a.out.empty()
                           ? output_dir() / (a.family + "_seed" + std::to_string(a.spec.seed))
                           : fs::path(a.out);
  datagen::write_instance_dir(inst, dir, a.spec);
  json files = json::array();
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  for (const auto& f : names) files.push_back(f);
  json r{{"command", "generate"},
         {"family", a.family},
         {"dir", dir.string()},
         {"n", inst.n},
         {"train", inst.train.transactions.size()},
         {"test", inst.test.transactions.size()},
         {"types", inst.truth ? json(inst.truth->types.size()) : json(nullptr)},
         {"files", files}};
  std::ostringstream s;
  s << "generated " << a.family << " instance in " << dir.string() << ": "
    << inst.train.transactions.size() << " training and " << inst.test.transactions.size()
    << " test transactions";
  emit(out, r, s.str());
  return kOk;
}

// ---- estimate -------------------------------------------------------------

struct EstimateArgs {
  std::string input;
  std::string train, header;
  std::string master = "l1";
  int eta_max = 1;
  std::optional<int> q;
  std::string heuristic = "on";
  std::optional<double> time_limit;
  std::optional<int> max_columns;
  double alpha = 0.05;
  std::string out;
  std::string report;
  std::string dump_pricing;
};

void add_estimate(CLI::App& app, EstimateArgs& a) {
  auto* sub = app.add_subcommand("estimate", "Estimate a ranked-list model by column generation");
  sub->add_option("-i,--input", a.input, "Instance directory (header.json + train.jsonl)");
  sub->add_option("--train", a.train, "Transaction log (JSON Lines)");
  sub->add_option("--header", a.header, "Header sidecar for --train");
  sub->add_option("--master", a.master, "em | l1")->capture_default_str();
  sub->add_option("--eta-max", a.eta_max, "Purchase capacity cap")->capture_default_str();
  sub->add_option("--q", a.q, "Preference list length cap");
  sub->add_option("--heuristic", a.heuristic, "on | off")->capture_default_str();
  sub->add_option("--time-limit", a.time_limit, "Wall-clock budget in seconds");
  sub->add_option("--max-columns", a.max_columns, "Stop after this many generated columns");
  sub->add_option("--alpha", a.alpha, "Likelihood-ratio test level (em)")->capture_default_str();
  sub->add_option("-o,--out", a.out, "Model output path");
  sub->add_option("--report", a.report, "Also write the run report to this path");
  sub->add_option("--dump-pricing", a.dump_pricing,
                  "Write the last pricing problem as a pricing instance");
}

TransactionLog load_train(const std::string& input, const std::string& train,
                          const std::string& header) {
  if (!train.empty()) {
    if (header.empty()) throw UsageError("--train needs --header");
    return io::read_log(header, train);
  }
  if (input.empty()) throw UsageError("an instance directory (-i) or --train is required");
  return io::read_log(fs::path(input) / "header.json", fs::path(input) / "train.jsonl");
}

int run_estimate(const EstimateArgs& a, std::ostream& out) {
  if (a.heuristic != "on" && a.heuristic != "off") throw UsageError("--heuristic must be on or off");
  const TransactionLog log = load_train(a.input, a.train, a.header);
  cg::CgConfig cfg;
  cfg.master = cg::master_from_string(a.master);
  cfg.eta_max = a.eta_max;
  cfg.q = a.q;
  cfg.use_heuristic = a.heuristic == "on";
  cfg.use_heuristic_lb_seed = cfg.use_heuristic;
  cfg.time_limit = a.time_limit;
  cfg.max_columns = a.max_columns;
  cfg.alpha = a.alpha;
  const auto result = cg::run_estimation(log, cfg);

  const fs::path model_path = a.out.empty() ? output_dir() / "model.json" : fs::path(a.out);
  if (model_path.has_parent_path()) fs::create_directories(model_path.parent_path());
  io::write_json_file(model_path, io::to_json(result.model));
  const json report = cg::report_json(result.report);
  if (!a.report.empty()) io::write_json_file(a.report, report);
  if (!a.dump_pricing.empty()) {
    pricing::PricingInstance inst(log.n, a.eta_max, a.q, result.final_rewards);
    io::write_json_file(a.dump_pricing, io::to_json(inst));
  }

  json r{{"command", "estimate"},
         {"master", cg::to_string(cfg.master)},
         {"model", model_path.string()},
         {"types", result.model.types.size()},
         {"lambda", result.model.lambda},
         {"report", report}};
  std::ostringstream s;
  s << cg::to_string(cfg.master) << " estimation " << cg::to_string(result.report.termination)
    << " after " << result.report.iterations << " iterations: " << result.model.types.size()
    << " types, objective " << result.report.final_objective << ", model written to "
    << model_path.string();
  emit(out, r, s.str());
  return result.report.termination == cg::Termination::TimeLimit ? kTimeLimit : kOk;
}

// ---- price ----------------------------------------------------------------

struct PriceArgs {
  std::string input;
  std::string engine = "dp";
  std::optional<double> time_limit;
  bool no_bounds = false;
  bool no_unreachable = false;
  bool single_purchase = false;
};

void add_price(CLI::App& app, PriceArgs& a) {
  auto* sub = app.add_subcommand("price", "Solve one pricing problem from a JSON instance");
  sub->add_option("-i,--input", a.input, "Pricing instance JSON")->required();
  sub->add_option("--engine", a.engine, "dp | dp-heur2 | dp-heur5 | oracle")->capture_default_str();
  sub->add_option("--time-limit", a.time_limit, "Wall-clock budget in seconds (dp)");
  sub->add_flag("--no-bounds", a.no_bounds, "Disable completion-bound pruning");
  sub->add_flag("--no-unreachable", a.no_unreachable, "Disable unreachable-product tracking");
  sub->add_flag("--single-purchase", a.single_purchase, "Profit-only dominance (eta_max = 1)");
}

int run_price(const PriceArgs& a, std::ostream& out) {
  const auto inst = io::pricing_instance_from_json(io::read_json_file(a.input));
  pricing::PricingResult res;
  if (a.engine == "dp") {
    pricing::PricingOptions opts;
    opts.completion_bounds = !a.no_bounds;
    opts.unreachable = !a.no_unreachable;
    opts.time_limit = a.time_limit;
    if (a.single_purchase) {
      if (inst.eta_max() != 1) throw UsageError("--single-purchase needs eta_max = 1");
      opts.single_purchase = true;
    }
    res = pricing::solve_pricing(inst, opts);
  } else if (a.engine == "dp-heur2") {
    res = pricing::solve_pricing_heuristic(inst, 2);
  } else if (a.engine == "dp-heur5") {
    res = pricing::solve_pricing_heuristic(inst, 5);
  } else if (a.engine == "oracle") {
    try {
      res = oracle::brute_force_glop(inst);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else {
    throw UsageError("unknown engine '" + a.engine + "'");
  }
  json r{{"command", "price"},
         {"engine", a.engine},
         {"profit", res.best_profit},
         {"sigma", res.best_type.sigma},
         {"eta", res.best_type.eta},
         {"labels_generated", res.labels_generated},
         {"labels_dominated", res.labels_dominated},
         {"labels_pruned", res.labels_pruned},
         {"wall_s", res.wall_time},
         {"complete", res.complete}};
  std::ostringstream s;
  s << a.engine << ": profit " << res.best_profit << " with list (";
  for (std::size_t i = 0; i < res.best_type.sigma.size(); ++i)
    s << (i ? "," : "") << res.best_type.sigma[i];
  s << "), eta " << res.best_type.eta << (res.complete ? "" : " [time limit reached]");
  emit(out, r, s.str());
  return res.complete ? kOk : kTimeLimit;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string model;
  std::string input;
  std::string truth;
  std::optional<int> eta;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
  auto* sub = app.add_subcommand("evaluate", "Score a model against ground truth and a test log");
  sub->add_option("--model", a.model, "Model JSON")->required();
  sub->add_option("-i,--input", a.input, "Instance directory")->required();
  sub->add_option("--truth", a.truth, "Ground-truth model (default: the instance's own)");
  sub->add_option("--eta", a.eta, "Bundle size cap for SRMSE and HRMSE");
}

int run_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto model = io::model_from_json(io::read_json_file(a.model));
  const auto inst = datagen::read_instance_dir(a.input);
  model.validate(inst.n);
  std::optional<ChoiceModel> truth = inst.truth;
  if (!a.truth.empty()) truth = io::model_from_json(io::read_json_file(a.truth));
  std::optional<double> s, h, m;
  if (truth && inst.n <= 12) s = metrics::srmse(model, *truth, inst.n, {.eta = a.eta});
  if (!inst.test.transactions.empty()) {
    h = metrics::hrmse(model, inst.test, a.eta);
    m = metrics::mrmse(model, inst.test);
  }
  json r{{"command", "evaluate"}, {"srmse", nullable(s)}, {"hrmse", nullable(h)},
         {"mrmse", nullable(m)}};
  std::ostringstream sum;
  auto show = [&sum](const char* name, const std::optional<double>& v) {
    sum << name << ' ';
    if (v)
      sum << *v;
    else
      sum << "n/a";
  };
  show("SRMSE", s);
  sum << ", ";
  show("HRMSE", h);
  sum << ", ";
  show("MRMSE", m);
  emit(out, r, sum.str());
  return kOk;
}

// ---- assort / simulate ----------------------------------------------------

struct AssortArgs {
  std::string model;
  std::string input;
  std::string revenues;
  int consumers = 10000;
  std::uint64_t seed = 1;
};

void add_assort(CLI::App& app, AssortArgs& a) {
  auto* sub = app.add_subcommand("assort", "Optimal assortment of a model and its AAO ratio");
  sub->add_option("--model", a.model, "Model JSON")->required();
  sub->add_option("-i,--input", a.input, "Instance directory (revenues, ground truth)");
  sub->add_option("--revenues", a.revenues, "Revenue vector JSON");
  sub->add_option("--consumers", a.consumers, "Probit evaluation population size")
      ->capture_default_str();
  sub->add_option("--seed", a.seed, "Probit population seed")->capture_default_str();
}

assortment::RevenueVector load_revenues(const std::string& path,
                                        const std::optional<datagen::Instance>& inst) {
  if (!path.empty()) return io::read_json_file(path).get<std::vector<double>>();
  if (inst && inst->revenues) return *inst->revenues;
  if (inst && inst->probit) return inst->probit->r;
  throw UsageError("no revenues: pass --revenues or an instance with revenues.json");
}

// Enumerated optimum of the simulated revenue; offers are tried in mask order
// with the same tie-break as the model-based optimizer.
assortment::AssortmentResult simulated_optimum(const assortment::Population& pop,
                                               const assortment::RevenueVector& r, int n) {
  assortment::AssortmentResult best{{}, -1.0};
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    ProductSet s;
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1u) s.push_back(j + 1);
    const double v = assortment::simulate_revenue(pop, s, r);
    if (v > best.value + 1e-12 ||
        (std::abs(v - best.value) <= 1e-12 &&
         (s.size() < best.offer.size() || (s.size() == best.offer.size() && s < best.offer)))) {
      best = {s, v};
    }
  }
  return best;
}

int run_assort(const AssortArgs& a, std::ostream& out) {
  const auto model = io::model_from_json(io::read_json_file(a.model));
  std::optional<datagen::Instance> inst;
  if (!a.input.empty()) inst = datagen::read_instance_dir(a.input);
  const auto r = load_revenues(a.revenues, inst);
  const int n = static_cast<int>(r.size());
  if (inst && inst->n != n) throw DataError("revenue vector length differs from n");
  model.validate(n);
  const auto best = assortment::optimize_assortment(model, r, n);

  json res{{"command", "assort"}, {"offer", best.offer}, {"value", best.value}};
  std::ostringstream s;
  s << "optimal offer " << join(best.offer) << " with expected revenue " << best.value;
  if (inst && inst->truth) {
    const auto t = assortment::optimize_assortment(*inst->truth, r, n);
    const double achieved = assortment::expected_revenue(*inst->truth, best.offer, r);
    const double aao = assortment::aao_ratio(achieved, t.value);
    res["true_offer"] = t.offer;
    res["true_value"] = t.value;
    res["achieved_value"] = achieved;
    res["aao"] = aao;
    s << "; ground truth earns " << achieved << " on it versus " << t.value << " (AAO " << aao
      << ")";
  } else if (inst && inst->probit && n <= 12) {
    const auto pop = assortment::build_probit_population(*inst->probit, a.consumers, a.seed);
    const auto t = simulated_optimum(pop, r, n);
    const double achieved = assortment::simulate_revenue(pop, best.offer, r);
    const double aao = assortment::aao_ratio(achieved, t.value);
    res["true_offer"] = t.offer;
    res["true_value"] = t.value;
    res["achieved_value"] = achieved;
    res["aao"] = aao;
    s << "; simulated consumers spend " << achieved << " on it versus " << t.value << " (AAO "
      << aao << ")";
  } else {
    res["aao"] = nullptr;
  }
  emit(out, res, s.str());
  return kOk;
}

struct SimulateArgs {
  std::string input;
  std::string population;
  std::string model;
  std::optional<int> n;
  std::string offer;
  std::string optimal_for;
  std::string revenues;
  int consumers = 10000;
  std::uint64_t seed = 1;
  std::string write_population;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  auto* sub = app.add_subcommand("simulate", "Monte Carlo revenue of an offer");
  sub->add_option("-i,--input", a.input, "Instance directory (probit parameters, revenues)");
  sub->add_option("--population", a.population, "Population JSON Lines to replay");
  sub->add_option("--model", a.model, "Build the population from this ranked-list model");
  sub->add_option("--n", a.n, "Number of products for --model");
  sub->add_option("--offer", a.offer, "Offered products, e.g. 1,3,4");
  sub->add_option("--optimal-for", a.optimal_for, "Offer the optimal assortment of this model");
  sub->add_option("--revenues", a.revenues, "Revenue vector JSON");
  sub->add_option("--consumers", a.consumers, "Population size")->capture_default_str();
  sub->add_option("--seed", a.seed, "Population seed")->capture_default_str();
  sub->add_option("--write-population", a.write_population, "Persist the population here");
}

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  std::optional<datagen::Instance> inst;
  if (!a.input.empty()) inst = datagen::read_instance_dir(a.input);
  const auto r = load_revenues(a.revenues, inst);
  const int n = static_cast<int>(r.size());

  assortment::Population pop;
  std::string source;
  if (!a.population.empty()) {
    std::ifstream in(a.population);
    if (!in) throw DataError("cannot open " + a.population);
    pop = assortment::read_population(in);
    source = "file";
  } else if (!a.model.empty()) {
    const auto m = io::model_from_json(io::read_json_file(a.model));
    m.validate(a.n.value_or(n));
    pop = assortment::population_from_model(m, a.n.value_or(n), a.consumers, a.seed);
    source = "model";
  } else if (inst && inst->probit) {
    pop = assortment::build_probit_population(*inst->probit, a.consumers, a.seed);
    source = "probit";
  } else {
    throw UsageError("no population source: pass --population, --model, or a probit instance");
  }
  if (!a.write_population.empty()) {
    std::ofstream os(a.write_population);
    if (!os) throw DataError("cannot write " + a.write_population);
    assortment::write_population(os, pop);
  }

  ProductSet offer;
  if (!a.offer.empty() && !a.optimal_for.empty())
    throw UsageError("--offer and --optimal-for are exclusive");
  if (!a.offer.empty()) {
    offer = parse_offer(a.offer);
  } else if (!a.optimal_for.empty()) {
    const auto m = io::model_from_json(io::read_json_file(a.optimal_for));
    offer = assortment::optimize_assortment(m, r, n).offer;
  } else {
    throw UsageError("pass --offer or --optimal-for");
  }
  if (!offer.empty() && offer.back() > n) throw DataError("offer mentions a product beyond n");

  const double mean = assortment::simulate_revenue(pop, offer, r);
  const double var = assortment::simulate_revenue_variance(pop, offer, r);
  json res{{"command", "simulate"}, {"source", source},  {"consumers", pop.size()},
           {"offer", offer},        {"mean", mean},      {"variance", var},
           {"std_error", pop.size() ? std::sqrt(var / static_cast<double>(pop.size())) : 0.0}};
  std::ostringstream s;
  s << pop.size() << " simulated consumers spend " << mean << " on average on " << join(offer);
  emit(out, res, s.str());
  return kOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
  std::string dir;
  std::string engines = "l1,em";
  int eta_max = 0;
  std::optional<int> q;
  std::optional<double> time_limit;
  int jobs = 1;
  std::string csv;
};

void add_bench(CLI::App& app, BenchArgs& a) {
  auto* sub = app.add_subcommand("bench", "Run estimation engines over a directory of instances");
  sub->add_option("--dir", a.dir, "Directory of instance directories")->required();
  sub->add_option("--engines", a.engines, "Comma list of l1, l1-exact, em")->capture_default_str();
  sub->add_option("--eta-max", a.eta_max, "Capacity cap, 0 for the largest observed bundle")
      ->capture_default_str();
  sub->add_option("--q", a.q, "Preference list length cap");
  sub->add_option("--time-limit", a.time_limit, "Per-run wall-clock budget in seconds");
  sub->add_option("--jobs", a.jobs, "Concurrent runs")->capture_default_str()->check(
      CLI::PositiveNumber);
  sub->add_option("--csv", a.csv, "CSV output path");
}

struct BenchRow {
  std::string instance, engine;
  double wall = 0.0, objective = 0.0;
  long columns = 0;
  std::string termination;
  std::optional<double> srmse;
};

BenchRow bench_one(const fs::path& dir, const std::string& engine, const BenchArgs& a) {
  BenchRow row;
  row.instance = dir.filename().string();
  row.engine = engine;
  try {
    const auto inst = datagen::read_instance_dir(dir);
    cg::CgConfig cfg;
    cfg.master = engine == "em" ? cg::Master::Em : cg::Master::L1;
    cfg.use_heuristic = engine != "l1-exact";
    cfg.eta_max = a.eta_max > 0 ? a.eta_max : std::max(1, largest_bundle(inst.train));
    cfg.q = a.q;
    cfg.time_limit = a.time_limit;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = cg::run_estimation(inst.train, cfg);
    row.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.objective = res.report.final_objective;
    row.columns = static_cast<long>(res.model.types.size());
    row.termination = cg::to_string(res.report.termination);
    if (inst.truth && inst.n <= 12) row.srmse = metrics::srmse(res.model, *inst.truth, inst.n);
  } catch (const DataError&) {
    row.termination = "data_error";
  }
  return row;
}

int run_bench(const BenchArgs& a, std::ostream& out) {
  std::vector<std::string> engines;
  {
    std::stringstream ss(a.engines);
    std::string e;
    while (std::getline(ss, e, ','))
      if (!e.empty()) {
        if (e != "l1" && e != "l1-exact" && e != "em") throw UsageError("unknown engine '" + e + "'");
        engines.push_back(e);
      }
  }
  if (engines.empty()) throw UsageError("no engines given");
  const fs::path root(a.dir);
  if (!fs::is_directory(root)) throw DataError("not a directory: " + a.dir);
  std::vector<fs::path> instances;
  if (fs::exists(root / "header.json")) {
    instances.push_back(root);
  } else {
    for (const auto& e : fs::directory_iterator(root))
      if (e.is_directory() && fs::exists(e.path() / "header.json")) instances.push_back(e.path());
  }
  std::sort(instances.begin(), instances.end());
  if (instances.empty()) throw DataError("no instance directories under " + a.dir);

  std::vector<std::pair<fs::path, std::string>> tasks;
  for (const auto& p : instances)
    for (const auto& e : engines) tasks.emplace_back(p, e);
  std::vector<BenchRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < tasks.size();)
      rows[i] = bench_one(tasks[i].first, tasks[i].second, a);
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::min<int>(a.jobs, static_cast<int>(tasks.size())); ++j)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const fs::path csv_path = a.csv.empty() ? output_dir() / "bench.csv" : fs::path(a.csv);
  if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
  std::ofstream csv(csv_path);
  if (!csv) throw DataError("cannot write " + csv_path.string());
  csv << "instance,engine,wall_s,objective,columns,termination\n";
  csv.precision(17);
  for (const auto& r : rows)
    csv << r.instance << ',' << r.engine << ',' << r.wall << ',' << r.objective << ','
        << r.columns << ',' << r.termination << '\n';

  json summary = json::object();
  std::ostringstream s;
  s << "benchmarked " << instances.size() << " instances, CSV at " << csv_path.string();
  for (const auto& e : engines) {
    std::vector<double> times, errs;
    for (const auto& r : rows)
      if (r.engine == e && r.termination != "data_error") {
        times.push_back(r.wall);
        if (r.srmse) errs.push_back(*r.srmse);
      }
    json entry{{"runs", times.size()}};
    entry["sgm_wall_s"] = times.empty() ? json(nullptr) : json(metrics::shifted_geomean(times, 1.0));
    entry["sgm_srmse"] = errs.empty() ? json(nullptr) : json(metrics::shifted_geomean(errs, 0.01));
    summary[e] = entry;
    s << "\n  " << e << ": " << times.size() << " runs";
    if (!times.empty()) s << ", shifted geometric mean time " << entry["sgm_wall_s"].get<double>() << " s";
    if (!errs.empty()) s << ", SRMSE " << entry["sgm_srmse"].get<double>();
  }
  emit(out, {{"command", "bench"}, {"csv", csv_path.string()}, {"engines", summary}}, s.str());
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ranked-list choice model estimation by column generation", "rankcg"};
  app.require_subcommand(1);
  GenerateArgs gen;
  EstimateArgs est;
  PriceArgs price;
  EvaluateArgs eval;
  AssortArgs assort;
  SimulateArgs sim;
  BenchArgs bench;
  add_generate(app, gen);
  add_estimate(app, est);
  add_price(app, price);
  add_evaluate(app, eval);
  add_assort(app, assort);
  add_simulate(app, sim);
  add_bench(app, bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "generate") return run_generate(gen, out);
    if (cmd == "estimate") return run_estimate(est, out);
    if (cmd == "price") return run_price(price, out);
    if (cmd == "evaluate") return run_evaluate(eval, out);
    if (cmd == "assort") return run_assort(assort, out);
    if (cmd == "simulate") return run_simulate(sim, out);
    return run_bench(bench, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const io::json::exception& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace rankcg::cli
