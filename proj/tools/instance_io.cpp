#include "instance_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dispersal::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ValidationError(path + ": " + message);
}

std::vector<double> number_array(const json& node, const std::string& path) {
  if (!node.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string here = path + "[" + std::to_string(i) + "]";
    if (!node[i].is_number()) fail(here, "expected a number");
    const double v = node[i].get<double>();
    if (!std::isfinite(v)) fail(here, "must be finite");
    out.push_back(v);
  }
  return out;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace

GameInstance InstanceFile::game() const {
  if (players < 2) fail("players", "this command needs at least 2 players");
  return GameInstance(profile, players, policy);
}

InstanceFile parse_instance(const json& doc) {
  if (!doc.is_object()) fail("$", "expected a JSON object");

  if (!doc.contains("values")) fail("values", "missing field");
  const auto values = number_array(doc.at("values"), "values");
  if (values.empty()) fail("values", "must contain at least one site");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] <= 0.0)
      fail("values[" + std::to_string(i) + "]", "must be strictly positive");

  if (!doc.contains("players")) fail("players", "missing field");
  const auto& players_node = doc.at("players");
  if (!players_node.is_number_integer() || players_node.get<long long>() < 1)
    fail("players", "expected an integer >= 1");
  const auto players = static_cast<std::size_t>(players_node.get<long long>());

  if (!doc.contains("policy")) fail("policy", "missing field");
  const auto& policy_node = doc.at("policy");
  if (!policy_node.is_object()) fail("policy", "expected an object");
  if (!policy_node.contains("type") || !policy_node.at("type").is_string())
    fail("policy.type", "expected one of \"exclusive\", \"sharing\", \"table\"");
  const auto type = policy_node.at("type").get<std::string>();

  std::optional<CongestionPolicy> policy;
  if (type == "exclusive") {
    policy = CongestionPolicy::exclusive();
  } else if (type == "sharing") {
    policy = CongestionPolicy::sharing();
  } else if (type == "table") {
    if (!policy_node.contains("table")) fail("policy.table", "missing field");
    auto table = number_array(policy_node.at("table"), "policy.table");
    if (table.empty() || table[0] != 1.0) fail("policy.table[0]", "C(1) must equal 1");
    for (std::size_t i = 1; i < table.size(); ++i)
      if (table[i] > table[i - 1])
        fail("policy.table[" + std::to_string(i) + "]",
             "congestion table must be non-increasing");
    if (table.size() < players)
      fail("policy.table", "needs at least one entry per player (" +
                               std::to_string(players) + ")");
    policy = CongestionPolicy::table(std::move(table));
  } else {
    fail("policy.type", "unknown policy \"" + type + "\"");
  }

  return InstanceFile{ValueProfile(values), players, *policy};
}

InstanceFile load_instance(const std::filesystem::path& path) {
  const auto doc = read_json(path);
  try {
    return parse_instance(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

Strategy load_strategy(const std::filesystem::path& path,
                       const ValueProfile& profile) {
  const auto doc = read_json(path);
  const json& node = doc.is_object() && doc.contains("strategy") ? doc.at("strategy") : doc;
  const auto probs = number_array(node, "strategy");
  if (probs.size() != profile.size())
    fail("strategy", "expected " + std::to_string(profile.size()) + " entries");
  std::vector<double> sorted(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i)
    sorted[i] = probs[profile.original_index()[i]];
  try {
    return Strategy(std::move(sorted));
  } catch (const std::invalid_argument& e) {
    fail("strategy", e.what());
  }
}

}  // namespace dispersal::cli
