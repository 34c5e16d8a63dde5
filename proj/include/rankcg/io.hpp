#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "rankcg/core.hpp"
#include "rankcg/pricing.hpp"

namespace rankcg::io {

using nlohmann::json;

// Product-id arrays are strictly increasing except "sigma", which is ordered.
// A 0 inside a serialized sigma marks the no-purchase cutoff and everything
// from it onward is dropped on load.

json to_json(const Transaction& t);
Transaction transaction_from_json(const json& j);

json to_json(const ConsumerType& c);
ConsumerType consumer_type_from_json(const json& j);

json to_json(const ChoiceModel& m);
ChoiceModel model_from_json(const json& j);

/// Header sidecar: {"n":10,"no_arrival_periods":0}.
json header_json(const TransactionLog& log);

void write_jsonl(std::ostream& os, const TransactionLog& log);
/// Reads JSON Lines transactions; n and no_arrival_periods come from `header`.
TransactionLog read_jsonl(std::istream& is, const json& header);

void write_log(const std::filesystem::path& header_path, const std::filesystem::path& jsonl_path,
               const TransactionLog& log);
TransactionLog read_log(const std::filesystem::path& header_path,
                        const std::filesystem::path& jsonl_path);

/// {"n":…,"eta_max":…,"q":null,"transactions":[{"offer":[…],"bundle":[…],"mu":…}]}
json to_json(const pricing::PricingInstance& inst);
/// Throws DataError on malformed input.
pricing::PricingInstance pricing_instance_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace rankcg::io
