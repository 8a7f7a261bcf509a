#pragma once

// Core model of the one-shot dispersal game: k identical players each pick
// one of M sites; a player alone at site x earns f(x), and a player sharing
// x with l-1 others earns f(x) * C(l).
//
// Site indices are 0-based throughout the library. Site 0 always holds the
// largest value once a ValueProfile has been canonicalized.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dispersal {

/// Site values f(0..M-1), stored sorted non-increasing.
///
/// Input may arrive in any order; the constructor sorts descending (stable)
/// and remembers where each sorted site came from so results can be mapped
/// back to the caller's ordering.
class ValueProfile {
 public:
  explicit ValueProfile(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t site) const { return values_[site]; }
  double at(std::size_t site) const;
  std::span<const double> values() const { return values_; }
  double total() const;

  /// original_index()[i] is the caller's index of sorted site i.
  std::span<const std::size_t> original_index() const { return original_index_; }
  bool was_reordered() const;

  /// Maps a vector in sorted-site order back to the caller's site order.
  std::vector<double> to_input_order(std::span<const double> sorted) const;

 private:
  std::vector<double> values_;
  std::vector<std::size_t> original_index_;
};

enum class PolicyKind { kExclusive, kSharing, kTable };

/// Congestion function C(l), l >= 1: C(1) = 1, non-increasing, may go negative.
class CongestionPolicy {
 public:
  static CongestionPolicy exclusive();
  static CongestionPolicy sharing();
  /// table[0] is C(1) and must equal 1 exactly.
  static CongestionPolicy table(std::vector<double> table);

  PolicyKind kind() const { return kind_; }
  /// Largest occupancy this policy is defined for (unbounded for the
  /// built-in kinds).
  std::size_t max_occupancy() const;
  double operator()(std::size_t occupancy) const;

  /// True when C(l) = 1 for every l in 1..players.
  bool is_constant_up_to(std::size_t players) const;
  /// True when C(l) = 0 for every l in 2..players.
  bool is_exclusive_up_to(std::size_t players) const;

  std::string name() const;
  std::span<const double> table_entries() const { return table_; }

 private:
  CongestionPolicy(PolicyKind kind, std::vector<double> table)
      : kind_(kind), table_(std::move(table)) {}

  PolicyKind kind_;
  std::vector<double> table_;
};

/// Mixed strategy: one probability per site, summing to 1 within 1e-9.
class Strategy {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit Strategy(std::vector<double> probs);
  static Strategy point_mass(std::size_t sites, std::size_t site);
  static Strategy uniform(std::size_t sites);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t site) const { return probs_[site]; }
  std::span<const double> probs() const { return probs_; }

  /// Max absolute coordinate difference.
  double distance(const Strategy& other) const;

 private:
  std::vector<double> probs_;
};

/// A fully specified game: values, number of players (>= 2), and policy.
class GameInstance {
 public:
  GameInstance(ValueProfile profile, std::size_t players,
               CongestionPolicy policy);

  const ValueProfile& profile() const { return profile_; }
  std::size_t players() const { return players_; }
  const CongestionPolicy& policy() const { return policy_; }
  std::size_t sites() const { return profile_.size(); }

  /// Same values and player count under another policy.
  GameInstance with_policy(CongestionPolicy policy) const;

 private:
  ValueProfile profile_;
  std::size_t players_;
  CongestionPolicy policy_;
};

/// Probability that exactly j opponents co-select a site, j = 0..n.
struct CollisionDistribution {
  std::vector<double> probs_by_count;
};

/// I(x, l) = f(x) * C(l).
double payoff_single(const GameInstance& game, std::size_t site,
                     std::size_t occupancy);

/// Poisson-binomial law of the number of successes among independent
/// Bernoulli trials with the given probabilities. O(n^2) dynamic program.
CollisionDistribution collision_distribution(std::span<const double> probs);

/// Binomial(n, p) probability mass function, evaluated term by term.
std::vector<double> binomial_pmf(std::size_t n, double p);

/// Expected C(1 + #opponents at the site) when each of players-1 opponents
/// lands on the site with probability p. Multiply by f(x) for the site value.
double congestion_factor(const CongestionPolicy& policy, std::size_t players,
                         double p);

/// nu_p(x): expected payoff of visiting `site` when every opponent plays p.
double site_value(const GameInstance& game, const Strategy& strategy,
                  std::size_t site);

/// All site values at once.
std::vector<double> site_values(const GameInstance& game,
                                const Strategy& strategy);

/// Expected payoff of the focal player against an arbitrary list of
/// players-1 opponent strategies.
double expected_payoff_profile(const GameInstance& game, const Strategy& focal,
                               std::span<const Strategy> opponents);

/// Expected payoff of each player when all k players play `strategy`.
double symmetric_payoff(const GameInstance& game, const Strategy& strategy);

/// Sum_x f(x) (1 - (1 - p(x))^k).
double coverage(const ValueProfile& profile, std::size_t players,
                const Strategy& strategy);

/// Sum_x f(x) (1 - p(x))^k, the expected value left unvisited.
double miss_weight(const ValueProfile& profile, std::size_t players,
                   const Strategy& strategy);

}  // namespace dispersal
