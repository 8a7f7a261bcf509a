#pragma once

// Seeded simulation of the one-shot dispersal game.
//
// Draws come from counter_uniform(seed, player, round): player i's choice in
// round r does not depend on any other player or round, so results are
// bit-identical for a given seed regardless of evaluation order. Rounds are
// aggregated in fixed blocks whose moments are merged pairwise.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dispersal/game.hpp"

namespace dispersal {

struct SimConfig {
  GameInstance instance;
  /// One strategy per player.
  std::vector<Strategy> strategies;
  std::uint64_t rounds = 100000;
  std::uint64_t seed = 0;
};

struct SimReport {
  std::vector<double> mean_payoff;
  std::vector<double> std_error_payoff;
  double mean_coverage = 0.0;
  double std_error_coverage = 0.0;
  std::uint64_t rounds = 0;
  std::uint64_t seed = 0;
  /// Fewer than two rounds: standard errors are reported as zero.
  bool degenerate = false;
};

struct SiteValueEstimate {
  std::vector<double> mean;
  std::vector<double> std_error;
};

/// Inverse-CDF site sampler with left-to-right tie order.
class SiteSampler {
 public:
  explicit SiteSampler(const Strategy& strategy);
  /// u in [0, 1). Never returns a zero-probability site.
  std::size_t operator()(double u) const;

 private:
  std::vector<double> cumulative_;
  std::size_t last_supported_ = 0;
};

/// Plays `rounds` independent rounds and reports per-player mean payoff and
/// mean realized coverage with standard errors.
SimReport simulate(const SimConfig& config);

/// Estimates every site value by forcing a focal player onto each site in
/// turn against the opponents strategies[1..k-1]. All sites share the same
/// opponent draws within a round.
SiteValueEstimate empirical_site_values(const SimConfig& config);

}  // namespace dispersal
