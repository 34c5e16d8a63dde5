#include "rankcg/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace rankcg::io {

namespace {

std::vector<Product> read_ids(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw DataError(std::string("missing array field \"") + key + "\"");
  std::vector<Product> ids;
  for (const auto& v : j.at(key)) {
    if (!v.is_number_integer()) throw DataError(std::string("non-integer id in \"") + key + "\"");
    ids.push_back(v.get<Product>());
  }
  return ids;
}

void require_increasing(const std::vector<Product>& ids, const char* key) {
  for (std::size_t i = 1; i < ids.size(); ++i)
    if (ids[i] <= ids[i - 1])
      throw DataError(std::string("\"") + key + "\" must be strictly increasing");
}

}  // namespace

json to_json(const Transaction& t) { return {{"offer", t.offer}, {"bundle", t.bundle}}; }

Transaction transaction_from_json(const json& j) {
  auto offer = read_ids(j, "offer");
  auto bundle = read_ids(j, "bundle");
  require_increasing(offer, "offer");
  require_increasing(bundle, "bundle");
  return Transaction::make(std::move(offer), std::move(bundle));
}

json to_json(const ConsumerType& c) { return {{"sigma", c.sigma}, {"eta", c.eta}}; }

ConsumerType consumer_type_from_json(const json& j) {
  ConsumerType c;
  for (Product p : read_ids(j, "sigma")) {
    if (p == 0) break;
    c.sigma.push_back(p);
  }
  c.eta = j.value("eta", c.sigma.empty() ? 0 : 1);
  if (c.sigma.empty()) c.eta = 0;
  return c;
}

json to_json(const ChoiceModel& m) {
  json types = json::array();
  for (std::size_t i = 0; i < m.types.size(); ++i) {
    json t = to_json(m.types[i]);
    t["prob"] = m.probs[i];
    types.push_back(std::move(t));
  }
  return {{"lambda", m.lambda}, {"types", std::move(types)}};
}

ChoiceModel model_from_json(const json& j) {
  ChoiceModel m;
  m.lambda = j.value("lambda", 1.0);
  if (!j.contains("types") || !j.at("types").is_array()) throw DataError("model lacks \"types\"");
  for (const auto& t : j.at("types")) {
    m.types.push_back(consumer_type_from_json(t));
    m.probs.push_back(t.at("prob").get<double>());
  }
  return m;
}

json to_json(const pricing::PricingInstance& inst) {
  json txns = json::array();
  for (const auto& t : inst.transactions())
    txns.push_back({{"offer", t.offer}, {"bundle", t.bundle}, {"mu", t.mu}});
  json q = inst.q() ? json(*inst.q()) : json(nullptr);
  return {{"n", inst.n()}, {"eta_max", inst.eta_max()}, {"q", q}, {"transactions", txns}};
}

pricing::PricingInstance pricing_instance_from_json(const json& j) {
  try {
    std::vector<pricing::RewardedTransaction> txns;
    for (const auto& t : j.at("transactions")) {
      const Transaction tx = transaction_from_json(t);
      txns.push_back({tx.offer, tx.bundle, t.at("mu").get<double>()});
    }
    std::optional<int> q;
    if (j.contains("q") && !j.at("q").is_null()) q = j.at("q").get<int>();
    return pricing::PricingInstance(j.at("n").get<int>(), j.value("eta_max", 1), q,
                                    std::move(txns));
  } catch (const json::exception& e) {
    throw DataError(std::string("pricing instance: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("pricing instance: ") + e.what());
  }
}

json header_json(const TransactionLog& log) {
  return {{"n", log.n}, {"no_arrival_periods", log.no_arrival_periods}};
}

void write_jsonl(std::ostream& os, const TransactionLog& log) {
  for (const auto& t : log.transactions) os << to_json(t).dump() << '\n';
}

TransactionLog read_jsonl(std::istream& is, const json& header) {
  TransactionLog log;
  log.n = header.at("n").get<int>();
  log.no_arrival_periods = header.value("no_arrival_periods", 0L);
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      log.transactions.push_back(transaction_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  log.validate();
  return log;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_log(const std::filesystem::path& header_path, const std::filesystem::path& jsonl_path,
               const TransactionLog& log) {
  write_json_file(header_path, header_json(log));
  std::ofstream out(jsonl_path);
  if (!out) throw std::runtime_error("cannot write " + jsonl_path.string());
  write_jsonl(out, log);
}

TransactionLog read_log(const std::filesystem::path& header_path,
                        const std::filesystem::path& jsonl_path) {
  const json header = read_json_file(header_path);
  std::ifstream in(jsonl_path);
  if (!in) throw DataError("cannot open " + jsonl_path.string());
  return read_jsonl(in, header);
}

}  // namespace rankcg::io
