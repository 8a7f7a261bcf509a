#include "dispersal/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dispersal/random.hpp"

namespace dispersal {

namespace {

constexpr std::uint64_t kBlockRounds = 4096;

// Count / mean / sum of squared deviations, merged with Chan's update.
struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    count += 1.0;
    const double delta = v - mean;
    mean += delta / count;
    m2 += delta * (v - mean);
  }

  static Moments merge(const Moments& a, const Moments& b) {
    if (a.count == 0.0) return b;
    if (b.count == 0.0) return a;
    Moments out;
    out.count = a.count + b.count;
    const double delta = b.mean - a.mean;
    out.mean = a.mean + delta * (b.count / out.count);
    out.m2 = a.m2 + b.m2 + delta * delta * (a.count * b.count / out.count);
    return out;
  }

  double std_error() const {
    if (count < 2.0) return 0.0;
    return std::sqrt(m2 / (count - 1.0) / count);
  }
};

Moments merge_pairwise(std::vector<Moments>& blocks, std::size_t lo,
                       std::size_t hi) {
  if (hi - lo == 1) return blocks[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return Moments::merge(merge_pairwise(blocks, lo, mid),
                        merge_pairwise(blocks, mid, hi));
}

// blocks[b][s] holds the moments of series s over block b.
std::vector<Moments> reduce_blocks(std::vector<std::vector<Moments>>& blocks,
                                   std::size_t series) {
  std::vector<Moments> out(series);
  std::vector<Moments> column(blocks.size());
  for (std::size_t s = 0; s < series; ++s) {
    for (std::size_t b = 0; b < blocks.size(); ++b) column[b] = blocks[b][s];
    out[s] = merge_pairwise(column, 0, column.size());
  }
  return out;
}

void validate(const SimConfig& config) {
  if (config.rounds < 1) throw std::invalid_argument("rounds must be at least 1");
  if (config.strategies.size() != config.instance.players())
    throw std::invalid_argument("need exactly one strategy per player");
  for (const auto& s : config.strategies)
    if (s.size() != config.instance.sites())
      throw std::invalid_argument("strategy length does not match site count");
}

}  // namespace

SiteSampler::SiteSampler(const Strategy& strategy) {
  cumulative_.resize(strategy.size());
  double acc = 0.0;
  for (std::size_t x = 0; x < strategy.size(); ++x) {
    acc += strategy[x];
    cumulative_[x] = acc;
    if (strategy[x] > 0.0) last_supported_ = x;
  }
}

std::size_t SiteSampler::operator()(double u) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return last_supported_;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

SimReport simulate(const SimConfig& config) {
  validate(config);
  const auto& game = config.instance;
  const std::size_t players = game.players();
  const std::size_t sites = game.sites();

  std::vector<SiteSampler> samplers;
  samplers.reserve(players);
  for (const auto& s : config.strategies) samplers.emplace_back(s);

  // Series 0..k-1 are player payoffs, series k is coverage.
  const std::size_t series = players + 1;
  const std::uint64_t block_count = (config.rounds + kBlockRounds - 1) / kBlockRounds;
  std::vector<std::vector<Moments>> blocks(block_count, std::vector<Moments>(series));

  std::vector<std::size_t> choice(players);
  std::vector<std::size_t> occupancy(sites, 0);
  for (std::uint64_t b = 0; b < block_count; ++b) {
    const std::uint64_t begin = b * kBlockRounds;
    const std::uint64_t end = std::min(config.rounds, begin + kBlockRounds);
    auto& moments = blocks[b];
    for (std::uint64_t round = begin; round < end; ++round) {
      for (std::size_t i = 0; i < players; ++i) {
        choice[i] = samplers[i](counter_uniform(config.seed, i, round));
        ++occupancy[choice[i]];
      }
      double covered = 0.0;
      for (std::size_t i = 0; i < players; ++i) {
        const std::size_t x = choice[i];
        moments[i].add(game.profile()[x] * game.policy()(occupancy[x]));
      }
      for (std::size_t i = 0; i < players; ++i) {
        const std::size_t x = choice[i];
        if (occupancy[x] != 0) {
          covered += game.profile()[x];
          occupancy[x] = 0;
        }
      }
      moments[players].add(covered);
    }
  }

  const auto totals = reduce_blocks(blocks, series);
  SimReport report;
  report.rounds = config.rounds;
  report.seed = config.seed;
  report.degenerate = config.rounds < 2;
  for (std::size_t i = 0; i < players; ++i) {
    report.mean_payoff.push_back(totals[i].mean);
    report.std_error_payoff.push_back(totals[i].std_error());
  }
  report.mean_coverage = totals[players].mean;
  report.std_error_coverage = totals[players].std_error();
  return report;
}

SiteValueEstimate empirical_site_values(const SimConfig& config) {
  validate(config);
  const auto& game = config.instance;
  const std::size_t players = game.players();
  const std::size_t sites = game.sites();

  std::vector<SiteSampler> opponents;
  for (std::size_t i = 1; i < players; ++i) opponents.emplace_back(config.strategies[i]);

  const std::uint64_t block_count = (config.rounds + kBlockRounds - 1) / kBlockRounds;
  std::vector<std::vector<Moments>> blocks(block_count, std::vector<Moments>(sites));
  std::vector<std::size_t> occupancy(sites, 0);
  for (std::uint64_t b = 0; b < block_count; ++b) {
    const std::uint64_t begin = b * kBlockRounds;
    const std::uint64_t end = std::min(config.rounds, begin + kBlockRounds);
    for (std::uint64_t round = begin; round < end; ++round) {
      std::fill(occupancy.begin(), occupancy.end(), 0);
      for (std::size_t j = 0; j < opponents.size(); ++j)
        ++occupancy[opponents[j](counter_uniform(config.seed, j + 1, round))];
      for (std::size_t x = 0; x < sites; ++x)
        blocks[b][x].add(game.profile()[x] * game.policy()(occupancy[x] + 1));
    }
  }

  const auto totals = reduce_blocks(blocks, sites);
  SiteValueEstimate out;
  for (const auto& m : totals) {
    out.mean.push_back(m.mean);
    out.std_error.push_back(m.std_error());
  }
  return out;
}

}  // namespace dispersal
