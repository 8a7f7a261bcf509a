#pragma once

// Evolutionary stability checks for symmetric strategies in the k-player
// dispersal game, with an infinite population matched in random k-tuples.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dispersal/game.hpp"

namespace dispersal {

/// Differences within this band count as equal payoffs.
inline constexpr double kEssEqualityBand = 1e-10;
/// A payoff difference must exceed this to count as strictly positive.
inline constexpr double kEssStrictMargin = 1e-12;
/// Mutants closer than this (max-norm) to the candidate are rejected.
inline constexpr double kMutantDistanceFloor = 1e-9;

/// Payoff of `focal` against `residents` copies of `resident` and the
/// remaining players-1-residents copies of `mutant`.
double mixed_profile_payoff(const GameInstance& game, const Strategy& focal,
                            const Strategy& resident, std::size_t residents,
                            const Strategy& mutant);

/// Average payoff of `focal` when its k-1 opponents are drawn from a
/// population that is (1 - epsilon) resident and epsilon mutant.
double mixture_payoff(const GameInstance& game, const Strategy& focal,
                      const Strategy& resident, const Strategy& mutant,
                      double epsilon);

struct EssVerdict {
  Strategy mutant;
  bool passed = false;
  /// Number of mutant opponents at which the candidate first does strictly
  /// better; empty when the check failed.
  std::optional<std::size_t> witness_m = std::nullopt;
  /// margins[m] = E(candidate; ...) - E(mutant; ...) with m mutant opponents,
  /// for m = 0 up to the deciding index.
  std::vector<double> margins = {};
};

/// Two-condition characterization: the smallest m such that the candidate
/// beats the mutant with m mutant opponents, after tying for every smaller m.
EssVerdict ess_characterization(const GameInstance& game,
                                const Strategy& candidate,
                                const Strategy& mutant);

/// Closed-form expansion of E(sigma*; sigma^l, sigma*^(k-l-1)) under the
/// exclusive policy, for sigma supported on the first W sites.
double claim2_lhs(const ValueProfile& profile, std::size_t players,
                  std::size_t support, double alpha, const Strategy& sigma,
                  std::size_t ell);

/// Closed-form expansion of E(sigma; sigma^l, sigma*^(k-l-1)).
double claim2_rhs(const ValueProfile& profile, std::size_t players,
                  std::size_t support, double alpha, const Strategy& sigma,
                  std::size_t ell);

struct InvasionPoint {
  double epsilon;
  double resident_payoff;
  double mutant_payoff;
};

inline const std::vector<double> kDefaultInvasionEpsilons = {1e-4, 1e-3, 1e-2,
                                                             0.1, 0.3};

std::vector<InvasionPoint> invasion_sweep(
    const GameInstance& game, const Strategy& resident, const Strategy& mutant,
    const std::vector<double>& epsilons = kDefaultInvasionEpsilons);

/// Deterministic mutant batch: every point mass first, then alternating
/// uniform simplex draws and small perturbations of `center` projected back
/// onto the simplex. Mutants within kMutantDistanceFloor of `center` are
/// skipped.
std::vector<Strategy> generate_mutants(const Strategy& center,
                                       std::uint64_t seed, std::size_t count,
                                       double perturbation = 1e-2);

}  // namespace dispersal
