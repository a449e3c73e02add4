#include "betacut/json_io.hpp"

#include <json.hpp>

#include <stdexcept>

namespace betacut {

using nlohmann::json;

std::string to_json(const RewardSpec& spec) {
  json j = json::object();
  if (spec.constant_total() > 0.0) j["constant"] = spec.constant_total();
  if (spec.linear_rate() > 0.0) j["linear"] = spec.linear_rate();
  const auto& berns = spec.bernoulli_terms();
  if (berns.size() == 1) {
    j["bernoulli"] = {{"p", berns[0].p}, {"e", berns[0].e}};
  } else if (berns.size() > 1) {
    json arr = json::array();
    for (const BernoulliTerm& b : berns) arr.push_back({{"p", b.p}, {"e", b.e}});
    j["bernoulli"] = arr;
  }
  return j.dump();
}

RewardSpec reward_spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid reward spec JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("reward spec JSON must be an object");
  std::vector<RewardSpec> parts;
  if (j.contains("constant")) parts.push_back(RewardSpec::constant(j["constant"].get<double>()));
  if (j.contains("linear")) parts.push_back(RewardSpec::linear(j["linear"].get<double>()));
  if (j.contains("bernoulli")) {
    const json& b = j["bernoulli"];
    const auto parse_one = [&parts](const json& o) {
      if (!o.is_object() || !o.contains("p") || !o.contains("e")) {
        throw std::invalid_argument("bernoulli entry needs \"p\" and \"e\"");
      }
      parts.push_back(RewardSpec::bernoulli(o["p"].get<double>(), o["e"].get<double>()));
    };
    if (b.is_array()) {
      for (const json& o : b) parse_one(o);
    } else {
      parse_one(b);
    }
  }
  if (parts.empty()) throw std::invalid_argument("reward spec JSON has no components");
  return RewardSpec::composite(parts);
}

}  // namespace betacut
