#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dispersal/game.hpp"

namespace dispersal::cli {

/// Input rejected before any computation; maps to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed instance file:
///   {"values": [...], "players": k, "policy": {"type": "...", "table": [...]}}
/// players may be 1 here; only GameInstance requires k >= 2.
struct InstanceFile {
  ValueProfile profile;
  std::size_t players;
  CongestionPolicy policy;

  /// Throws ValidationError when players < 2.
  GameInstance game() const;
};

InstanceFile parse_instance(const nlohmann::json& doc);
InstanceFile load_instance(const std::filesystem::path& path);

/// Strategy file: either a bare JSON array or {"strategy": [...]}, listed in
/// the instance's input site order.
Strategy load_strategy(const std::filesystem::path& path,
                       const ValueProfile& profile);

}  // namespace dispersal::cli
