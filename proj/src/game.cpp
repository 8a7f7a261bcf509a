#include "dispersal/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dispersal {

namespace {

std::string site_message(const char* what, std::size_t index) {
  std::ostringstream os;
  os << what << " at index " << index;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// ValueProfile

ValueProfile::ValueProfile(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("value profile is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw std::invalid_argument(site_message("site value is not finite", i));
    if (values[i] <= 0.0)
      throw std::invalid_argument(
          site_message("site value must be strictly positive", i));
  }
  original_index_.resize(values.size());
  std::iota(original_index_.begin(), original_index_.end(), std::size_t{0});
  std::stable_sort(original_index_.begin(), original_index_.end(),
                   [&](std::size_t a, std::size_t b) {
                     return values[a] > values[b];
                   });
  values_.reserve(values.size());
  for (std::size_t i : original_index_) values_.push_back(values[i]);
}

double ValueProfile::at(std::size_t site) const {
  if (site >= values_.size())
    throw std::invalid_argument(site_message("site out of range", site));
  return values_[site];
}

double ValueProfile::total() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

bool ValueProfile::was_reordered() const {
  for (std::size_t i = 0; i < original_index_.size(); ++i)
    if (original_index_[i] != i) return true;
  return false;
}

std::vector<double> ValueProfile::to_input_order(
    std::span<const double> sorted) const {
  if (sorted.size() != values_.size())
    throw std::invalid_argument("vector length does not match site count");
  std::vector<double> out(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    out[original_index_[i]] = sorted[i];
  return out;
}

// ---------------------------------------------------------------------------
// CongestionPolicy

CongestionPolicy CongestionPolicy::exclusive() {
  return CongestionPolicy(PolicyKind::kExclusive, {});
}

CongestionPolicy CongestionPolicy::sharing() {
  return CongestionPolicy(PolicyKind::kSharing, {});
}

CongestionPolicy CongestionPolicy::table(std::vector<double> table) {
  if (table.empty())
    throw std::invalid_argument("congestion table is empty");
  if (table.front() != 1.0)
    throw std::invalid_argument("congestion table must start with C(1) = 1");
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!std::isfinite(table[i]))
      throw std::invalid_argument(
          site_message("congestion entry is not finite", i));
    if (i > 0 && table[i] > table[i - 1])
      throw std::invalid_argument(
          site_message("congestion table must be non-increasing", i));
  }
  return CongestionPolicy(PolicyKind::kTable, std::move(table));
}

std::size_t CongestionPolicy::max_occupancy() const {
  if (kind_ == PolicyKind::kTable) return table_.size();
  return static_cast<std::size_t>(-1);
}

double CongestionPolicy::operator()(std::size_t occupancy) const {
  if (occupancy == 0 || occupancy > max_occupancy())
    throw std::invalid_argument(
        site_message("occupancy outside policy domain", occupancy));
  switch (kind_) {
    case PolicyKind::kExclusive:
      return occupancy == 1 ? 1.0 : 0.0;
    case PolicyKind::kSharing:
      return 1.0 / static_cast<double>(occupancy);
    case PolicyKind::kTable:
      break;
  }
  return table_[occupancy - 1];
}

bool CongestionPolicy::is_constant_up_to(std::size_t players) const {
  for (std::size_t l = 2; l <= players; ++l)
    if ((*this)(l) != 1.0) return false;
  return true;
}

bool CongestionPolicy::is_exclusive_up_to(std::size_t players) const {
  for (std::size_t l = 2; l <= players; ++l)
    if ((*this)(l) != 0.0) return false;
  return true;
}

std::string CongestionPolicy::name() const {
  switch (kind_) {
    case PolicyKind::kExclusive:
      return "exclusive";
    case PolicyKind::kSharing:
      return "sharing";
    case PolicyKind::kTable:
      break;
  }
  return "table";
}

// ---------------------------------------------------------------------------
// Strategy

Strategy::Strategy(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("strategy is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument(
          site_message("probability outside [0, 1]", i));
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os << "probabilities sum to " << sum << ", expected 1";
    throw std::invalid_argument(os.str());
  }
}

Strategy Strategy::point_mass(std::size_t sites, std::size_t site) {
  if (site >= sites) throw std::invalid_argument("point mass site out of range");
  std::vector<double> p(sites, 0.0);
  p[site] = 1.0;
  return Strategy(std::move(p));
}

Strategy Strategy::uniform(std::size_t sites) {
  return Strategy(std::vector<double>(sites, 1.0 / static_cast<double>(sites)));
}

double Strategy::distance(const Strategy& other) const {
  if (other.size() != size())
    throw std::invalid_argument("strategies have different lengths");
  double d = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    d = std::max(d, std::abs(probs_[i] - other.probs_[i]));
  return d;
}

// ---------------------------------------------------------------------------
// GameInstance

GameInstance::GameInstance(ValueProfile profile, std::size_t players,
                           CongestionPolicy policy)
    : profile_(std::move(profile)),
      players_(players),
      policy_(std::move(policy)) {
  if (players_ < 2)
    throw std::invalid_argument("a game needs at least 2 players");
  if (policy_.max_occupancy() < players_)
    throw std::invalid_argument(
        "congestion table is shorter than the number of players");
}

GameInstance GameInstance::with_policy(CongestionPolicy policy) const {
  return GameInstance(profile_, players_, std::move(policy));
}

// ---------------------------------------------------------------------------
// Payoffs

namespace {

void check_strategy_size(const GameInstance& game, const Strategy& s) {
  if (s.size() != game.sites())
    throw std::invalid_argument("strategy length does not match site count");
}

}  // namespace

double payoff_single(const GameInstance& game, std::size_t site,
                     std::size_t occupancy) {
  if (occupancy == 0 || occupancy > game.players())
    throw std::invalid_argument(site_message("occupancy out of range", occupancy));
  return game.profile().at(site) * game.policy()(occupancy);
}

CollisionDistribution collision_distribution(std::span<const double> probs) {
  std::vector<double> dist(probs.size() + 1, 0.0);
  dist[0] = 1.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double q = probs[i];
    if (!(q >= 0.0 && q <= 1.0))
      throw std::invalid_argument(site_message("probability outside [0, 1]", i));
    for (std::size_t j = i + 1; j > 0; --j)
      dist[j] = dist[j] * (1.0 - q) + dist[j - 1] * q;
    dist[0] *= 1.0 - q;
  }
  return {std::move(dist)};
}

std::vector<double> binomial_pmf(std::size_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("probability outside [0, 1]");
  std::vector<double> pmf(n + 1);
  double coeff = 1.0;
  for (std::size_t j = 0; j <= n; ++j) {
    if (j > 0)
      coeff = coeff * static_cast<double>(n - j + 1) / static_cast<double>(j);
    pmf[j] = coeff * std::pow(p, static_cast<double>(j)) *
             std::pow(1.0 - p, static_cast<double>(n - j));
  }
  return pmf;
}

double congestion_factor(const CongestionPolicy& policy, std::size_t players,
                         double p) {
  const auto pmf = binomial_pmf(players - 1, p);
  double acc = 0.0;
  for (std::size_t others = 0; others < pmf.size(); ++others)
    acc += policy(others + 1) * pmf[others];
  return acc;
}

double site_value(const GameInstance& game, const Strategy& strategy,
                  std::size_t site) {
  check_strategy_size(game, strategy);
  return game.profile().at(site) *
         congestion_factor(game.policy(), game.players(), strategy[site]);
}

std::vector<double> site_values(const GameInstance& game,
                                const Strategy& strategy) {
  check_strategy_size(game, strategy);
  std::vector<double> out(game.sites());
  for (std::size_t x = 0; x < out.size(); ++x)
    out[x] = game.profile()[x] *
             congestion_factor(game.policy(), game.players(), strategy[x]);
  return out;
}

double expected_payoff_profile(const GameInstance& game, const Strategy& focal,
                               std::span<const Strategy> opponents) {
  if (opponents.size() + 1 != game.players())
    throw std::invalid_argument("expected exactly players-1 opponent strategies");
  check_strategy_size(game, focal);
  for (const auto& s : opponents) check_strategy_size(game, s);

  std::vector<double> at_site(opponents.size());
  double total = 0.0;
  for (std::size_t x = 0; x < game.sites(); ++x) {
    if (focal[x] == 0.0) continue;
    for (std::size_t j = 0; j < opponents.size(); ++j)
      at_site[j] = opponents[j][x];
    const auto dist = collision_distribution(at_site);
    double factor = 0.0;
    for (std::size_t others = 0; others < dist.probs_by_count.size(); ++others)
      factor += game.policy()(others + 1) * dist.probs_by_count[others];
    total += focal[x] * game.profile()[x] * factor;
  }
  return total;
}

double symmetric_payoff(const GameInstance& game, const Strategy& strategy) {
  const auto values = site_values(game, strategy);
  double total = 0.0;
  for (std::size_t x = 0; x < values.size(); ++x)
    total += strategy[x] * values[x];
  return total;
}

double coverage(const ValueProfile& profile, std::size_t players,
                const Strategy& strategy) {
  if (strategy.size() != profile.size())
    throw std::invalid_argument("strategy length does not match site count");
  const double k = static_cast<double>(players);
  double total = 0.0;
  for (std::size_t x = 0; x < profile.size(); ++x)
    total += profile[x] * (1.0 - std::pow(1.0 - strategy[x], k));
  return total;
}

double miss_weight(const ValueProfile& profile, std::size_t players,
                   const Strategy& strategy) {
  if (strategy.size() != profile.size())
    throw std::invalid_argument("strategy length does not match site count");
  const double k = static_cast<double>(players);
  double total = 0.0;
  for (std::size_t x = 0; x < profile.size(); ++x)
    total += profile[x] * std::pow(1.0 - strategy[x], k);
  return total;
}

}  // namespace dispersal
