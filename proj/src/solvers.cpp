#include "dispersal/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "dispersal/random.hpp"
#include "dispersal/simplex.hpp"

namespace dispersal {

namespace {

// g(p) = E[C(1 + B)], B ~ Binomial(k-1, p), written in the Bernstein basis.
// A site's value is f(x) * g(p(x)).
class FactorCurve {
 public:
  FactorCurve(const CongestionPolicy& policy, std::size_t players)
      : degree_(players - 1), coeffs_(players), q_powers_(players) {
    double binom = 1.0;
    for (std::size_t j = 0; j <= degree_; ++j) {
      if (j > 0)
        binom = binom * static_cast<double>(degree_ - j + 1) /
                static_cast<double>(j);
      coeffs_[j] = policy(j + 1) * binom;
    }
  }

  double operator()(double p) {
    const double q = 1.0 - p;
    q_powers_[0] = 1.0;
    for (std::size_t j = 1; j <= degree_; ++j) q_powers_[j] = q_powers_[j - 1] * q;
    double acc = 0.0;
    double p_power = 1.0;
    for (std::size_t j = 0; j <= degree_; ++j) {
      if (coeffs_[j] != 0.0) acc += coeffs_[j] * p_power * q_powers_[degree_ - j];
      p_power *= p;
    }
    return acc;
  }

  double at_one() const { return coeffs_[degree_]; }

 private:
  std::size_t degree_;
  std::vector<double> coeffs_;
  std::vector<double> q_powers_;
};

// Probability p in [0, 1] with g(p) = target, g strictly decreasing from
// g(0) = 1 to g(1) = C(k).
double invert_factor(FactorCurve& curve, double target, double tolerance,
                     std::size_t max_iterations) {
  if (target >= 1.0) return 0.0;
  if (target <= curve.at_one()) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (std::size_t it = 0; it < max_iterations && hi - lo > tolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (curve(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Strategy clean_strategy(std::vector<double> probs) {
  return Strategy(normalize_probabilities(std::move(probs), kSupportThreshold));
}

}  // namespace

// ---------------------------------------------------------------------------

SigmaStarResult sigma_star(const ValueProfile& profile, std::size_t players) {
  if (players < 2)
    throw std::invalid_argument("sigma_star needs at least 2 players");
  const std::size_t sites = profile.size();
  const double exponent = 1.0 / static_cast<double>(players - 1);

  // The scanned sum is non-decreasing in y, so the feasible set is a prefix.
  std::size_t support = 1;
  for (std::size_t y = 0; y < sites; ++y) {
    double sum = 0.0;
    for (std::size_t x = 0; x <= y; ++x)
      sum += 1.0 - std::pow(profile[y] / profile[x], exponent);
    if (sum <= 1.0) support = y + 1;
  }

  auto normalizer_for = [&](std::size_t w) {
    double inv_sum = 0.0;
    for (std::size_t x = 0; x < w; ++x) inv_sum += std::pow(profile[x], -exponent);
    return static_cast<double>(w - 1) / inv_sum;
  };
  auto prob_at = [&](std::size_t x, double alpha) {
    return 1.0 - alpha * std::pow(profile[x], -exponent);
  };

  double alpha = normalizer_for(support);
  // When the scan inequality is tight the last site gets zero mass; dropping
  // it leaves alpha unchanged.
  while (support > 1 && prob_at(support - 1, alpha) < kSupportThreshold) {
    --support;
    alpha = normalizer_for(support);
  }

  std::vector<double> probs(sites, 0.0);
  for (std::size_t x = 0; x < support; ++x)
    probs[x] = std::clamp(prob_at(x, alpha), 0.0, 1.0);
  if (support == 1) probs[0] = 1.0;

  return SigmaStarResult{Strategy(std::move(probs)), support, alpha,
                         std::pow(alpha, static_cast<double>(players - 1))};
}

// ---------------------------------------------------------------------------

EquilibriumReport verify_ifd(const GameInstance& game, const Strategy& strategy,
                             double tolerance) {
  EquilibriumReport report{.strategy = strategy};
  report.site_values = site_values(game, strategy);
  const auto& values = report.site_values;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  bool gap_seen = false;
  for (std::size_t x = 0; x < game.sites(); ++x) {
    if (strategy[x] > kSupportThreshold) {
      if (gap_seen) report.support_is_prefix = false;
      ++report.support_size;
      lo = std::min(lo, values[x]);
      hi = std::max(hi, values[x]);
      sum += values[x];
    } else {
      gap_seen = true;
    }
  }
  if (report.support_size == 0) {
    // Unreachable for a valid Strategy with threshold 1e-9 and M < 1e9.
    report.residual = std::numeric_limits<double>::infinity();
    return report;
  }
  report.common_value = sum / static_cast<double>(report.support_size);
  report.residual = hi - lo;

  for (std::size_t x = 0; x < game.sites(); ++x) {
    if (strategy[x] > kSupportThreshold) continue;
    report.residual = std::max(report.residual, values[x] - lo);
    if (std::abs(values[x] - report.common_value) <= tolerance)
      report.boundary_flag = true;
  }
  report.residual = std::max(report.residual, 0.0);
  report.passed = report.support_is_prefix && report.residual <= tolerance;
  return report;
}

// ---------------------------------------------------------------------------

EquilibriumReport ifd_solve(const GameInstance& game, const IfdOptions& options) {
  const auto& profile = game.profile();
  const std::size_t sites = game.sites();
  const std::size_t players = game.players();

  if (sites == 1 || game.policy().is_constant_up_to(players)) {
    // Site values do not depend on p when C is constant; everybody goes to
    // the most valuable site.
    auto report = verify_ifd(game, Strategy::point_mass(sites, 0),
                             options.residual_tolerance);
    report.common_value = report.site_values[0];
    return report;
  }

  FactorCurve curve(game.policy(), players);
  std::vector<double> probs(sites);
  auto mass_at = [&](double value) {
    double mass = 0.0;
    for (std::size_t x = 0; x < sites; ++x) {
      probs[x] = invert_factor(curve, value / profile[x],
                               options.probability_tolerance,
                               options.max_iterations);
      mass += probs[x];
    }
    return mass;
  };

  // Total mass is non-increasing in the common value: it is >= 1 at
  // f(0) * C(k) (site 0 alone absorbs everything) and 0 at f(0).
  double lo = profile[0] * curve.at_one();
  double hi = profile[0];
  double best_value = lo;
  double best_gap = std::abs(mass_at(lo) - 1.0);
  std::size_t iterations = 0;
  while (iterations < options.max_iterations && best_gap > options.mass_tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++iterations;
    const double mass = mass_at(mid);
    if (std::abs(mass - 1.0) < best_gap) {
      best_gap = std::abs(mass - 1.0);
      best_value = mid;
    }
    if (mass > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  mass_at(best_value);

  auto report = verify_ifd(game, clean_strategy(probs), options.residual_tolerance);
  report.iterations = iterations;
  if (!report.passed) {
    std::ostringstream diag;
    diag << "iterations=" << iterations << " value_bracket=[" << lo << ", " << hi
         << "] mass_gap=" << best_gap << " residual=" << report.residual
         << " prefix=" << (report.support_is_prefix ? "yes" : "no");
    throw SolverError("equilibrium bisection did not converge", diag.str());
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

// Symmetric payoff is separable: sum_x h_x(p_x) with h_x(p) = f(x) p g(p).
struct SeparablePayoff {
  const ValueProfile& profile;
  FactorCurve curve;

  double term(std::size_t x, double p) { return profile[x] * p * curve(p); }
};

// Pattern search over pairwise mass transfers. Every move keeps the point on
// the simplex; the step halves whenever no transfer improves.
double refine_by_transfers(SeparablePayoff& payoff, std::vector<double>& p,
                           double step, double tolerance) {
  const std::size_t n = p.size();
  std::vector<double> terms(n);
  for (std::size_t x = 0; x < n; ++x) terms[x] = payoff.term(x, p[x]);
  while (step >= tolerance) {
    bool improved = false;
    for (std::size_t to = 0; to < n; ++to) {
      for (std::size_t from = 0; from < n; ++from) {
        if (to == from) continue;
        const double d = std::min(step, p[from]);
        if (d <= 0.0) continue;
        const double new_to = payoff.term(to, p[to] + d);
        const double new_from = payoff.term(from, p[from] - d);
        if (new_to + new_from > terms[to] + terms[from]) {
          p[to] += d;
          p[from] -= d;
          terms[to] = new_to;
          terms[from] = new_from;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

}  // namespace

WelfareResult welfare_opt(const GameInstance& game, const WelfareOptions& options) {
  const std::size_t sites = game.sites();
  if (sites == 1) {
    Strategy only = Strategy::point_mass(1, 0);
    return {only, symmetric_payoff(game, only), true};
  }
  SeparablePayoff payoff{game.profile(), FactorCurve(game.policy(), game.players())};

  std::vector<double> best;
  double best_value = -std::numeric_limits<double>::infinity();
  bool exhaustive = sites <= options.exhaustive_max_sites;

  if (exhaustive) {
    const auto grid = static_cast<std::size_t>(std::llround(1.0 / options.grid_step));
    std::vector<std::vector<double>> table(sites, std::vector<double>(grid + 1));
    for (std::size_t x = 0; x < sites; ++x)
      for (std::size_t i = 0; i <= grid; ++i)
        table[x][i] = payoff.term(x, static_cast<double>(i) / static_cast<double>(grid));

    std::vector<std::size_t> idx(sites, 0);
    std::vector<std::size_t> best_idx;
    std::function<void(std::size_t, std::size_t, double)> walk =
        [&](std::size_t x, std::size_t remaining, double partial) {
          if (x + 1 == sites) {
            idx[x] = remaining;
            const double v = partial + table[x][remaining];
            if (v > best_value) {
              best_value = v;
              best_idx = idx;
            }
            return;
          }
          for (std::size_t i = 0; i <= remaining; ++i) {
            idx[x] = i;
            walk(x + 1, remaining - i, partial + table[x][i]);
          }
        };
    walk(0, grid, 0.0);
    best.resize(sites);
    for (std::size_t x = 0; x < sites; ++x)
      best[x] = static_cast<double>(best_idx[x]) / static_cast<double>(grid);
    best_value = refine_by_transfers(payoff, best, options.grid_step,
                                     options.refine_tolerance);
  } else {
    Rng rng(options.seed);
    for (std::size_t r = 0; r < std::max<std::size_t>(options.restarts, 1); ++r) {
      std::vector<double> start =
          r == 0 ? std::vector<double>(sites, 1.0 / static_cast<double>(sites))
                 : rng.simplex(sites);
      const double v =
          refine_by_transfers(payoff, start, 0.25, options.refine_tolerance);
      if (v > best_value) {
        best_value = v;
        best = start;
      }
    }
  }

  Strategy strategy(normalize_probabilities(std::move(best)));
  return {strategy, symmetric_payoff(game, strategy), exhaustive};
}

// ---------------------------------------------------------------------------

GridOptimum coverage_opt_oracle(const ValueProfile& profile, std::size_t players,
                                double grid_step) {
  const std::size_t sites = profile.size();
  if (sites > 4)
    throw std::invalid_argument("coverage grid oracle supports at most 4 sites");
  if (!(grid_step > 0.0 && grid_step <= 1.0))
    throw std::invalid_argument("grid step must lie in (0, 1]");
  const auto grid = static_cast<std::size_t>(std::llround(1.0 / grid_step));

  // miss[i] = (1 - i/grid)^k
  std::vector<double> miss(grid + 1);
  for (std::size_t i = 0; i <= grid; ++i)
    miss[i] = std::pow(1.0 - static_cast<double>(i) / static_cast<double>(grid),
                       static_cast<double>(players));

  std::vector<std::size_t> idx(sites, 0);
  std::vector<std::size_t> best_idx(sites, 0);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t evaluated = 0;
  std::function<void(std::size_t, std::size_t, double)> walk =
      [&](std::size_t x, std::size_t remaining, double partial) {
        if (x + 1 == sites) {
          idx[x] = remaining;
          ++evaluated;
          const double v = partial + profile[x] * (1.0 - miss[remaining]);
          if (v > best) {
            best = v;
            best_idx = idx;
          }
          return;
        }
        for (std::size_t i = 0; i <= remaining; ++i) {
          idx[x] = i;
          walk(x + 1, remaining - i, partial + profile[x] * (1.0 - miss[i]));
        }
      };
  walk(0, grid, 0.0);

  std::vector<double> probs(sites);
  for (std::size_t x = 0; x < sites; ++x)
    probs[x] = static_cast<double>(best_idx[x]) / static_cast<double>(grid);
  return {Strategy(std::move(probs)), best, evaluated};
}

// ---------------------------------------------------------------------------

double spoa(const GameInstance& game, const IfdOptions& options) {
  const auto optimum = sigma_star(game.profile(), game.players());
  const auto equilibrium = ifd_solve(game, options);
  return coverage(game.profile(), game.players(), optimum.strategy) /
         coverage(game.profile(), game.players(), equilibrium.strategy);
}

}  // namespace dispersal
