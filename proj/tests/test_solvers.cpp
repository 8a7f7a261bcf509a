#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dispersal/simplex.hpp"
#include "dispersal/solvers.hpp"
#include "oracles.hpp"

using namespace dispersal;
using doctest::Approx;

namespace {

GameInstance make_game(std::vector<double> f, std::size_t k, CongestionPolicy c) {
  return GameInstance(ValueProfile(std::move(f)), k, std::move(c));
}

// Equilibrium for k = 2 and C(2) = c < 1: site values are linear,
// nu(x) = f(x) (1 - (1 - c) p(x)), so on a support of size W
//   nu = (W - 1 + c) / sum_{x<W} 1/f(x),  p(x) = (1 - nu/f(x)) / (1 - c).
std::vector<double> two_player_equilibrium(const ValueProfile& f, double c) {
  std::vector<double> best;
  for (std::size_t w = 1; w <= f.size(); ++w) {
    double inv = 0.0;
    for (std::size_t x = 0; x < w; ++x) inv += 1.0 / f[x];
    const double nu = (static_cast<double>(w) - 1.0 + c) / inv;
    std::vector<double> p(f.size(), 0.0);
    bool ok = true;
    for (std::size_t x = 0; x < w; ++x) {
      p[x] = (1.0 - nu / f[x]) / (1.0 - c);
      if (p[x] < -1e-12 || p[x] > 1.0 + 1e-12) ok = false;
      p[x] = std::clamp(p[x], 0.0, 1.0);
    }
    if (w < f.size() && f[w] > nu) ok = false;
    if (ok) best = p;
  }
  return best;
}

}  // namespace

TEST_CASE("sigma_star closed form") {
  SUBCASE("two sites, two players") {
    const auto r = sigma_star(ValueProfile({1.0, 0.5}), 2);
    CHECK(r.support_size == 2);
    CHECK(r.normalizer == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(r.common_value == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(r.strategy[0] == Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(r.strategy[1] == Approx(1.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("constant values give the uniform strategy") {
    for (std::size_t k : {2, 3, 7}) {
      const auto r = sigma_star(ValueProfile(std::vector<double>(5, 0.8)), k);
      CHECK(r.support_size == 5);
      for (std::size_t x = 0; x < 5; ++x) CHECK(r.strategy[x] == Approx(0.2));
    }
  }
  SUBCASE("a negligible site is left out") {
    const auto r = sigma_star(ValueProfile({1.0, 0.5, 0.01}), 2);
    CHECK(r.support_size == 2);
    CHECK(r.strategy[2] == 0.0);
    CHECK(r.strategy[0] == Approx(2.0 / 3.0));
    CHECK(0.01 < r.common_value);
  }
  SUBCASE("single site") {
    const auto r = sigma_star(ValueProfile({3.0}), 4);
    CHECK(r.support_size == 1);
    CHECK(r.strategy[0] == 1.0);
    CHECK(r.common_value == 0.0);
  }
  CHECK_THROWS_AS(sigma_star(ValueProfile({1.0}), 1), std::invalid_argument);
}

TEST_CASE("sigma_star invariants on random profiles") {
  Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t sites = 1 + static_cast<std::size_t>(rng.uniform() * 20);
    const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 7);
    const ValueProfile f(oracle::log_uniform_values(rng, sites, 1e-3));
    const auto r = sigma_star(f, k);
    const double e = 1.0 / static_cast<double>(k - 1);
    for (std::size_t x = 0; x < sites; ++x) {
      if (x < r.support_size) {
        CHECK(r.strategy[x] > 0.0);
        CHECK(std::abs(r.strategy[x] - (1.0 - r.normalizer * std::pow(f[x], -e))) <= 1e-10);
      } else {
        CHECK(r.strategy[x] == 0.0);
      }
    }
    if (r.support_size < sites) CHECK(f[r.support_size] < r.common_value);
    const auto check = verify_ifd(GameInstance(f, k, CongestionPolicy::exclusive()),
                                  r.strategy, 1e-10);
    CHECK(check.passed);
  }
}

TEST_CASE("verify_ifd") {
  const auto exc = make_game({1.0, 0.5}, 2, CongestionPolicy::exclusive());
  SUBCASE("equilibrium passes") {
    const auto r = verify_ifd(exc, Strategy({2.0 / 3.0, 1.0 / 3.0}), 1e-10);
    CHECK(r.passed);
    CHECK(r.residual <= 1e-15);
    CHECK(r.common_value == Approx(1.0 / 3.0));
    CHECK(r.support_size == 2);
    CHECK_FALSE(r.boundary_flag);
  }
  SUBCASE("uniform is off by the value spread") {
    const auto r = verify_ifd(exc, Strategy({0.5, 0.5}), 1e-10);
    CHECK_FALSE(r.passed);
    CHECK(r.residual == Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("sharing boundary case") {
    const auto share = make_game({1.0, 0.5}, 2, CongestionPolicy::sharing());
    const auto r = verify_ifd(share, Strategy({1.0, 0.0}), 1e-9);
    CHECK(r.passed);
    CHECK(r.boundary_flag);
    CHECK(r.common_value == 0.5);
    CHECK(r.support_size == 1);
  }
  SUBCASE("unsupported site worth more is a violation") {
    const auto r = verify_ifd(exc, Strategy({0.0, 1.0}), 1e-9);
    CHECK_FALSE(r.passed);
    CHECK(r.residual == Approx(1.0));
  }
  SUBCASE("gaps in the support are reported") {
    const auto g = make_game({1.0, 1.0, 1.0}, 2, CongestionPolicy::exclusive());
    const auto r = verify_ifd(g, Strategy({0.5, 0.0, 0.5}), 1e-9);
    CHECK_FALSE(r.support_is_prefix);
    CHECK_FALSE(r.passed);
  }
}

TEST_CASE("ifd_solve agrees with sigma_star under the exclusive policy") {
  Rng rng(202);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t sites = 1 + static_cast<std::size_t>(rng.uniform() * 20);
    const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 7);
    const ValueProfile f(oracle::log_uniform_values(rng, sites, 1e-3));
    const GameInstance game(f, k, CongestionPolicy::exclusive());
    const auto ifd = ifd_solve(game);
    const auto star = sigma_star(f, k);
    CHECK(ifd.strategy.distance(star.strategy) <= 1e-8);
    CHECK(ifd.residual <= 1e-8);
  }
}

TEST_CASE("ifd_solve special and boundary cases") {
  SUBCASE("sharing with f = (1, 0.5), k = 2 sits on the boundary") {
    const auto r = ifd_solve(make_game({1.0, 0.5}, 2, CongestionPolicy::sharing()));
    CHECK(r.strategy[0] == Approx(1.0).epsilon(1e-12));
    CHECK(r.strategy[1] == 0.0);
    CHECK(r.common_value == Approx(0.5).epsilon(1e-12));
    CHECK(r.boundary_flag);
  }
  SUBCASE("one site") {
    for (const auto& policy : {CongestionPolicy::sharing(), CongestionPolicy::exclusive()}) {
      const auto r = ifd_solve(make_game({2.0}, 4, policy));
      CHECK(r.strategy[0] == 1.0);
    }
  }
  SUBCASE("constant policy goes to the best site") {
    const auto r = ifd_solve(make_game({0.9, 1.0, 0.3}, 3,
                                       CongestionPolicy::table({1.0, 1.0, 1.0, 0.2})));
    CHECK(r.strategy[0] == 1.0);
    CHECK(r.common_value == 1.0);
  }
  SUBCASE("negative congestion") {
    const auto r = ifd_solve(make_game({1.0, 0.5}, 2, CongestionPolicy::table({1.0, -0.5})));
    CHECK(r.strategy[0] == Approx(5.0 / 9.0).epsilon(1e-10));
    CHECK(r.strategy[1] == Approx(4.0 / 9.0).epsilon(1e-10));
  }
}

TEST_CASE("ifd_solve matches the two-player linear closed form") {
  Rng rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t sites = 1 + static_cast<std::size_t>(rng.uniform() * 10);
    const double c = rng.uniform(-2.0, 0.95);
    const ValueProfile f(oracle::log_uniform_values(rng, sites, 1e-2));
    const auto r = ifd_solve(GameInstance(f, 2, CongestionPolicy::table({1.0, c})));
    const auto expected = two_player_equilibrium(f, c);
    REQUIRE(expected.size() == sites);
    for (std::size_t x = 0; x < sites; ++x)
      CHECK(std::abs(r.strategy[x] - expected[x]) <= 1e-8);
  }
}

TEST_CASE("ifd_solve residuals stay small for arbitrary policies") {
  Rng rng(404);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t sites = 1 + static_cast<std::size_t>(rng.uniform() * 12);
    const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 6);
    const ValueProfile f(oracle::log_uniform_values(rng, sites, 1e-2));
    const auto policy = trial % 2 ? CongestionPolicy::sharing()
                                  : CongestionPolicy::table(oracle::random_table(rng, k));
    const auto r = ifd_solve(GameInstance(f, k, policy));
    CHECK(r.passed);
    CHECK(r.residual <= 1e-8);
  }
}

TEST_CASE("welfare_opt") {
  SUBCASE("equal sites") {
    const auto r = welfare_opt(make_game({1.0, 1.0}, 2, CongestionPolicy::exclusive()));
    CHECK(r.strategy[0] == Approx(0.5).epsilon(1e-6));
    CHECK(r.payoff == Approx(0.5).epsilon(1e-12));
    CHECK(r.exhaustive);
  }
  SUBCASE("f = (1, 0.5) under exclusive") {
    const ValueProfile f({1.0, 0.5});
    const auto r = welfare_opt(GameInstance(f, 2, CongestionPolicy::exclusive()));
    CHECK(r.strategy[0] == Approx(0.5).epsilon(1e-6));
    CHECK(r.payoff == Approx(0.375).epsilon(1e-12));
    CHECK(coverage(f, 2, r.strategy) == Approx(1.125).epsilon(1e-6));
    CHECK(coverage(f, 2, r.strategy) < 7.0 / 6.0);
  }
  SUBCASE("single site pays f(1) C(k)") {
    const auto r = welfare_opt(make_game({2.0}, 3, CongestionPolicy::sharing()));
    CHECK(r.strategy[0] == 1.0);
    CHECK(r.payoff == Approx(2.0 / 3.0));
  }
  SUBCASE("beats a fine one-dimensional grid for two sites") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
      const double f2 = rng.uniform(0.05, 1.0);
      const double c = rng.uniform(-1.0, 0.9);
      const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 3);
      std::vector<double> table(k, c);
      table[0] = 1.0;
      const GameInstance game(ValueProfile({1.0, f2}), k, CongestionPolicy::table(table));
      const auto r = welfare_opt(game);
      double grid_best = -1e300;
      for (int i = 0; i <= 100000; ++i) {
        const double p = i / 100000.0;
        grid_best = std::max(grid_best, symmetric_payoff(game, Strategy({p, 1.0 - p})));
      }
      CHECK(r.payoff >= grid_best - 1e-12);
    }
  }
  SUBCASE("multi-start search for larger M") {
    Rng rng(17);
    const ValueProfile f(oracle::log_uniform_values(rng, 6, 0.1));
    const GameInstance game(f, 3, CongestionPolicy::sharing());
    const auto r = welfare_opt(game);
    CHECK_FALSE(r.exhaustive);
    for (int trial = 0; trial < 200; ++trial)
      CHECK(r.payoff >= symmetric_payoff(game, Strategy(rng.simplex(6))) - 1e-12);
    const auto again = welfare_opt(game);
    CHECK(again.payoff == r.payoff);
  }
}

TEST_CASE("coverage grid oracle") {
  SUBCASE("f = (1, 0.5)") {
    const auto r = coverage_opt_oracle(ValueProfile({1.0, 0.5}), 2, 1e-3);
    CHECK(r.strategy.distance(Strategy({2.0 / 3.0, 1.0 / 3.0})) <= 2e-3);
    CHECK(std::abs(r.coverage - 7.0 / 6.0) <= 1e-5);
  }
  SUBCASE("symmetric values") {
    const auto r = coverage_opt_oracle(ValueProfile({0.7, 0.7}), 2, 1e-3);
    CHECK(r.strategy[0] == Approx(0.5));
  }
  SUBCASE("f = (1, 0.3)") {
    const double expected = 1.0 * (1.0 - std::pow(3.0 / 13.0, 2)) +
                            0.3 * (1.0 - std::pow(10.0 / 13.0, 2));
    const auto r = coverage_opt_oracle(ValueProfile({1.0, 0.3}), 2, 1e-3);
    CHECK(std::abs(r.coverage - expected) <= 1e-5);
    CHECK(expected == Approx(1.0692308).epsilon(1e-7));
    const auto star = sigma_star(ValueProfile({1.0, 0.3}), 2);
    CHECK(star.strategy[0] == Approx(10.0 / 13.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(coverage_opt_oracle(ValueProfile({1, 1, 1, 1, 1}), 2, 1e-2),
                  std::invalid_argument);
}

TEST_CASE("sigma_star maximizes coverage") {
  Rng rng(505);
  SUBCASE("no grid point beats it") {
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t sites = 2 + static_cast<std::size_t>(rng.uniform() * 3);
      const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 4);
      const ValueProfile f(oracle::log_uniform_values(rng, sites, 0.05));
      const auto star = sigma_star(f, k);
      const auto grid = coverage_opt_oracle(f, k, 1e-2);
      CHECK(grid.coverage <= coverage(f, k, star.strategy) + 1e-12);
      CHECK(grid.strategy.distance(star.strategy) <= 2e-2);
    }
  }
  SUBCASE("strict loss away from the optimum") {
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t sites = 2 + static_cast<std::size_t>(rng.uniform() * 10);
      const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 6);
      const ValueProfile f(oracle::log_uniform_values(rng, sites, 1e-2));
      const auto star = sigma_star(f, k);
      std::vector<double> moved(sites);
      for (std::size_t x = 0; x < sites; ++x)
        moved[x] = star.strategy[x] + rng.uniform(-0.05, 0.05);
      const Strategy other(project_to_simplex(moved));
      if (other.distance(star.strategy) < 0.01) continue;
      CHECK(coverage(f, k, other) < coverage(f, k, star.strategy));
    }
  }
  SUBCASE("beats the uniform-on-k bound") {
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t sites = 1 + static_cast<std::size_t>(rng.uniform() * 20);
      const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 7);
      const ValueProfile f(oracle::log_uniform_values(rng, sites, 1e-3));
      double top = 0.0;
      for (std::size_t x = 0; x < std::min(sites, k); ++x) top += f[x];
      CHECK(coverage(f, k, sigma_star(f, k).strategy) > (1.0 - std::exp(-1.0)) * top);
    }
  }
}

TEST_CASE("spoa") {
  CHECK(spoa(make_game({1.0, 0.5}, 2, CongestionPolicy::exclusive())) ==
        Approx(1.0).epsilon(1e-12));
  CHECK(spoa(make_game({1.0, 0.5}, 2, CongestionPolicy::sharing())) ==
        Approx(7.0 / 6.0).epsilon(1e-10));

  Rng rng(606);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t sites = 1 + static_cast<std::size_t>(rng.uniform() * 15);
    const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 6);
    const ValueProfile f(oracle::log_uniform_values(rng, sites, 1e-3));
    const double share = spoa(GameInstance(f, k, CongestionPolicy::sharing()));
    CHECK(share >= 1.0 - 1e-9);
    CHECK(share <= 2.0 + 1e-9);
    CHECK(spoa(GameInstance(f, k, CongestionPolicy::exclusive())) ==
          Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("non-exclusive policies fall short of the optimum on slowly decreasing values") {
  Rng rng(707);
  for (std::size_t k : {2, 3, 5}) {
    const std::size_t sites = 2 * k;
    std::vector<double> values(sites);
    for (std::size_t x = 0; x < sites; ++x)
      values[x] = 1.0 - static_cast<double>(x + 1) / static_cast<double>(4 * k * sites);
    const ValueProfile f(values);
    const double best = coverage(f, k, sigma_star(f, k).strategy);
    for (int trial = 0; trial < 4; ++trial) {
      const auto policy = trial == 0 ? CongestionPolicy::sharing()
                                     : CongestionPolicy::table(oracle::random_table(rng, k));
      const auto ifd = ifd_solve(GameInstance(f, k, policy));
      const double gap = best - coverage(f, k, ifd.strategy);
      if (trial == 0) CHECK(gap > 1e-6);
      CHECK(gap > 1e-10);
    }
  }
}
