#include "dispersal/ess.hpp"

#include <cmath>
#include <stdexcept>

#include "dispersal/random.hpp"
#include "dispersal/simplex.hpp"
#include "dispersal/solvers.hpp"

namespace dispersal {

double mixed_profile_payoff(const GameInstance& game, const Strategy& focal,
                            const Strategy& resident, std::size_t residents,
                            const Strategy& mutant) {
  const std::size_t opponents = game.players() - 1;
  if (residents > opponents)
    throw std::invalid_argument("more residents than opponents");
  std::vector<Strategy> profile;
  profile.reserve(opponents);
  for (std::size_t i = 0; i < residents; ++i) profile.push_back(resident);
  for (std::size_t i = residents; i < opponents; ++i) profile.push_back(mutant);
  return expected_payoff_profile(game, focal, profile);
}

double mixture_payoff(const GameInstance& game, const Strategy& focal,
                      const Strategy& resident, const Strategy& mutant,
                      double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  const std::size_t opponents = game.players() - 1;
  const auto weights = binomial_pmf(opponents, 1.0 - epsilon);
  double total = 0.0;
  for (std::size_t residents = 0; residents <= opponents; ++residents) {
    if (weights[residents] == 0.0) continue;
    total += weights[residents] *
             mixed_profile_payoff(game, focal, resident, residents, mutant);
  }
  return total;
}

EssVerdict ess_characterization(const GameInstance& game,
                                const Strategy& candidate,
                                const Strategy& mutant) {
  if (candidate.distance(mutant) <= kMutantDistanceFloor)
    throw std::invalid_argument("mutant coincides with the candidate");
  EssVerdict verdict{.mutant = mutant};
  const std::size_t opponents = game.players() - 1;
  for (std::size_t m = 0; m <= opponents; ++m) {
    const std::size_t residents = opponents - m;
    const double margin =
        mixed_profile_payoff(game, candidate, candidate, residents, mutant) -
        mixed_profile_payoff(game, mutant, candidate, residents, mutant);
    verdict.margins.push_back(margin);
    if (margin > kEssStrictMargin) {
      verdict.passed = true;
      verdict.witness_m = m;
      return verdict;
    }
    if (margin < -kEssEqualityBand) return verdict;
  }
  return verdict;
}

namespace {

void check_claim_arguments(const ValueProfile& profile, std::size_t players,
                           std::size_t support, const Strategy& sigma,
                           std::size_t ell) {
  if (players < 3 || ell < 1 || ell > players - 2)
    throw std::invalid_argument("ell must lie in [1, players - 2]");
  if (support < 1 || support > profile.size())
    throw std::invalid_argument("support size out of range");
  if (sigma.size() != profile.size())
    throw std::invalid_argument("strategy length does not match site count");
  for (std::size_t x = support; x < sigma.size(); ++x)
    if (sigma[x] > kSupportThreshold)
      throw std::invalid_argument("strategy is not supported on the first W sites");
}

}  // namespace

double claim2_lhs(const ValueProfile& profile, std::size_t players,
                  std::size_t support, double alpha, const Strategy& sigma,
                  std::size_t ell) {
  check_claim_arguments(profile, players, support, sigma, ell);
  const double k1 = static_cast<double>(players - 1);
  const double l = static_cast<double>(ell);
  double first = 0.0;
  double second = 0.0;
  for (std::size_t x = 0; x < support; ++x) {
    const double miss = std::pow(1.0 - sigma[x], l);
    first += std::pow(profile[x], l / k1) * miss;
    second += std::pow(profile[x], (l - 1.0) / k1) * miss;
  }
  return std::pow(alpha, k1 - l) * (first - alpha * second);
}

double claim2_rhs(const ValueProfile& profile, std::size_t players,
                  std::size_t support, double alpha, const Strategy& sigma,
                  std::size_t ell) {
  check_claim_arguments(profile, players, support, sigma, ell);
  const double k1 = static_cast<double>(players - 1);
  const double l = static_cast<double>(ell);
  double first = 0.0;
  double second = 0.0;
  for (std::size_t x = 0; x < support; ++x) {
    const double weight = std::pow(profile[x], l / k1);
    first += weight * std::pow(1.0 - sigma[x], l);
    second += weight * std::pow(1.0 - sigma[x], l + 1.0);
  }
  return std::pow(alpha, k1 - l) * (first - second);
}

std::vector<InvasionPoint> invasion_sweep(const GameInstance& game,
                                          const Strategy& resident,
                                          const Strategy& mutant,
                                          const std::vector<double>& epsilons) {
  std::vector<InvasionPoint> out;
  out.reserve(epsilons.size());
  for (double eps : epsilons) {
    if (!(eps > 0.0 && eps < 1.0))
      throw std::invalid_argument("invasion epsilon must lie in (0, 1)");
    out.push_back({eps, mixture_payoff(game, resident, resident, mutant, eps),
                   mixture_payoff(game, mutant, resident, mutant, eps)});
  }
  return out;
}

std::vector<Strategy> generate_mutants(const Strategy& center,
                                       std::uint64_t seed, std::size_t count,
                                       double perturbation) {
  if (count == 0) throw std::invalid_argument("mutant count must be positive");
  const std::size_t sites = center.size();
  if (sites < 2)
    throw std::invalid_argument("a single-site game has no distinct mutants");
  std::vector<Strategy> out;
  out.reserve(count);
  auto accept = [&](Strategy s) {
    if (out.size() < count && s.distance(center) > kMutantDistanceFloor)
      out.push_back(std::move(s));
  };

  for (std::size_t x = 0; x < sites; ++x) accept(Strategy::point_mass(sites, x));

  Rng rng(seed);
  std::vector<double> shifted(sites);
  for (std::size_t draw = 0; out.size() < count; ++draw) {
    if (draw % 2 == 0) {
      accept(Strategy(rng.simplex(sites)));
    } else {
      for (std::size_t x = 0; x < sites; ++x)
        shifted[x] = center[x] + rng.uniform(-perturbation, perturbation);
      accept(Strategy(project_to_simplex(shifted)));
    }
  }
  return out;
}

}  // namespace dispersal
