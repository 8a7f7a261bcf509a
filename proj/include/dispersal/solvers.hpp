#pragma once

// Equilibrium and optimum computations for the dispersal game.
//
//  * sigma_star      closed-form equilibrium of the exclusive policy, which
//                    is also the coverage-maximizing symmetric strategy
//  * ifd_solve       numerical symmetric equilibrium for any congestion policy
//  * welfare_opt     symmetric strategy maximizing each player's payoff
//  * coverage_opt_oracle  brute-force grid maximizer of coverage (small M)
//  * spoa            coverage(sigma_star) / coverage(equilibrium)

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dispersal/game.hpp"

namespace dispersal {

/// Probabilities below this are treated as exactly zero when deciding
/// support.
inline constexpr double kSupportThreshold = 1e-9;

/// Raised when an iterative solver fails to reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::string diagnostics)
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  std::string diagnostics_;
};

struct SigmaStarResult {
  Strategy strategy;
  std::size_t support_size;  // W: sites 0..W-1 carry positive probability
  double normalizer;         // alpha
  double common_value;       // alpha^(k-1), the value of every supported site
};

/// Closed-form equilibrium of the exclusive policy:
///   p(x) = 1 - alpha * f(x)^(-1/(k-1)) on the first W sites, 0 elsewhere.
SigmaStarResult sigma_star(const ValueProfile& profile, std::size_t players);

struct EquilibriumReport {
  Strategy strategy;
  std::size_t support_size = 0;
  double common_value = 0.0;
  /// Largest violation of the equilibrium conditions, in payoff units.
  double residual = 0.0;
  /// Some unsupported site is worth the common value within tolerance.
  bool boundary_flag = false;
  bool support_is_prefix = true;
  bool passed = false;
  std::vector<double> site_values = {};
  std::size_t iterations = 0;
};

/// Checks the equilibrium conditions for `strategy`: every supported site
/// earns the same value and no unsupported site earns more. Violations are
/// reported in the result, never thrown.
EquilibriumReport verify_ifd(const GameInstance& game, const Strategy& strategy,
                             double tolerance);

struct IfdOptions {
  double probability_tolerance = 1e-12;
  double mass_tolerance = 1e-12;
  std::size_t max_iterations = 200;
  double residual_tolerance = 1e-8;
};

/// Unique symmetric Nash equilibrium by nested bisection: outer search on the
/// common value, inner per-site search for the probability that attains it.
/// Constant policies (C = 1 on 1..k) return the point mass on site 0.
EquilibriumReport ifd_solve(const GameInstance& game,
                            const IfdOptions& options = {});

struct WelfareOptions {
  double grid_step = 1e-3;
  double refine_tolerance = 1e-7;
  std::size_t restarts = 32;
  std::uint64_t seed = 0x5eed;
  /// Site counts up to this use the exhaustive grid.
  std::size_t exhaustive_max_sites = 3;
};

struct WelfareResult {
  Strategy strategy;
  double payoff;
  /// True when the exhaustive grid was used (small M).
  bool exhaustive;
};

/// Symmetric strategy maximizing the expected payoff of each player when
/// everyone plays it.
WelfareResult welfare_opt(const GameInstance& game,
                          const WelfareOptions& options = {});

struct GridOptimum {
  Strategy strategy;
  double coverage;
  std::size_t points_evaluated;
};

/// Exhaustive search over the simplex grid with spacing `grid_step`,
/// maximizing coverage. Only for M <= 4.
GridOptimum coverage_opt_oracle(const ValueProfile& profile,
                                std::size_t players, double grid_step);

/// Symmetric price of anarchy of this instance.
double spoa(const GameInstance& game, const IfdOptions& options = {});

}  // namespace dispersal
