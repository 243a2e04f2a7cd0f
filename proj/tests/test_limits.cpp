#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "permlab/limits.hpp"
#include "permlab/rng.hpp"
#include "test_support.hpp"

using namespace permlab;

TEST_CASE("mu_rho_along") {
  const auto id = Permutation::identity(100);
  CHECK(mu_rho_along(Density::uniform(), id) == Catch::Approx(1.0).epsilon(1e-14));

  const Density frank20 = Density::frank(20.0);
  const double diag = testsupport::adaptive_simpson(
      [](double x) { return frank_eval(20.0, x, x); }, 0.0, 1.0);
  CHECK(mu_rho_along(frank20, Permutation::identity(2000)) ==
        Catch::Approx(diag).margin(1e-3));

  const double anti = testsupport::adaptive_simpson(
      [](double x) { return frank_eval(20.0, x, 1.0 - x); }, 0.0, 1.0);
  CHECK(mu_rho_along(frank20, Permutation::reversal(2000)) ==
        Catch::Approx(anti).margin(1e-3));
}

TEST_CASE("c_rho is exactly 1/l for the uniform density") {
  for (int l = 1; l <= 10; ++l)
    REQUIRE(c_rho(Density::uniform(), l, 512) == Catch::Approx(1.0 / l).margin(1e-12));
}

TEST_CASE("c_rho(1) agrees with the diagonal integral") {
  const Density d = Density::frank(2.0);
  const double diag = testsupport::adaptive_simpson(
      [](double x) { return frank_eval(2.0, x, x); }, 0.0, 1.0);
  CHECK(c_rho(d, 1, 512) == Catch::Approx(diag).margin(1e-4));
  // and with the discrete mu_rho along the identity at large n
  CHECK(c_rho(d, 1, 512) == Catch::Approx(mu_rho_along(d, Permutation::identity(4096))).margin(1e-3));
}

TEST_CASE("c_rho matches a Monte Carlo cyclic integral (Frank beta=2, l=3)") {
  const Density d = Density::frank(2.0);
  const double trace = c_rho(d, 3, 512);
  RandomStream rs(55);
  const std::int64_t points = 2000000;
  double acc = 0.0, acc2 = 0.0;
  for (std::int64_t i = 0; i < points; ++i) {
    const double x1 = rs.next_unit(), x2 = rs.next_unit(), x3 = rs.next_unit();
    const double v = d(x1, x2) * d(x2, x3) * d(x3, x1);
    acc += v;
    acc2 += v * v;
  }
  const double mc = acc / static_cast<double>(points) / 3.0;
  const double se = std::sqrt((acc2 / points - (acc / points) * (acc / points)) / points) / 3.0;
  CHECK(std::abs(mc - trace) < std::max(5.0 * se, 1e-3));
}

TEST_CASE("c_rho is grid-stable") {
  for (double beta : {2.0, 20.0})
    for (int l : {2, 5}) {
      const Density d = Density::frank(beta);
      REQUIRE(std::abs(c_rho(d, l, 256) - c_rho(d, l, 512)) < 1e-4);
    }
}

TEST_CASE("lambda_n_overlap") {
  CHECK(lambda_n_overlap(Density::uniform(), Permutation::reversal(37)) ==
        Catch::Approx(1.0).epsilon(1e-13));

  // n=2 hand case on a 2x2 grid [[a,b],[c,d]]
  const double a = 2.0, b = 0.5, c = 1.0, d = 0.5;
  const Density grid = Density::from_grid(2, {a, b, c, d});
  const auto& v = grid.grid_values();  // normalized by a constant factor
  const double expect = v[0] / (v[0] + v[1]) + v[3] / (v[2] + v[3]);
  CHECK(lambda_n_overlap(grid, Permutation::identity(2)) ==
        Catch::Approx(expect).epsilon(1e-13));
  CHECK(expect == Catch::Approx(a / (a + b) + d / (c + d)).epsilon(1e-13));

  // convergence to the diagonal integral along identity
  const Density frank3 = Density::frank(3.0);
  const double diag = testsupport::adaptive_simpson(
      [](double x) { return frank_eval(3.0, x, x); }, 0.0, 1.0);
  double prev_err = std::numeric_limits<double>::infinity();
  for (int n : {100, 400, 1600}) {
    const double err = std::abs(lambda_n_overlap(frank3, Permutation::identity(n)) - diag);
    REQUIRE(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("lambda_n_overlap stays within the row-ratio band [m/M, M/m]") {
  RandomStream rs(71);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 4;
    std::vector<double> vals(16);
    for (auto& x : vals) x = 0.2 + rs.next_unit();
    const Density d = Density::from_grid(k, vals);
    const auto [m, M] = d.bounds();
    const int n = 10 + static_cast<int>(rs.next_below(30));
    std::vector<std::int32_t> t(static_cast<std::size_t>(n));
    std::iota(t.begin(), t.end(), 1);
    for (int i = n - 1; i >= 1; --i) {
      const auto j = rs.next_below(static_cast<std::uint64_t>(i) + 1);
      std::swap(t[static_cast<std::size_t>(i)], t[j]);
    }
    const double lam = lambda_n_overlap(d, Permutation(std::move(t), Permutation::Unchecked{}));
    REQUIRE(lam >= m / M - 1e-12);
    REQUIRE(lam <= M / m + 1e-12);
  }
}

TEST_CASE("stein bounds") {
  const auto uniform_overlap =
      stein_tv_bound_overlap(Density::uniform(), Permutation::identity(100));
  CHECK(uniform_overlap.tv_bound == Catch::Approx(0.01).epsilon(1e-13));
  CHECK(uniform_overlap.lambda_n == Catch::Approx(1.0).epsilon(1e-13));

  const auto cyc = stein_tv_bound_cycle(Density::uniform(), 50, 2, 0.49);
  CHECK(cyc.tv_bound == Catch::Approx(0.02).epsilon(1e-13));

  const Density frank2 = Density::frank(2.0);
  const auto [m, M] = frank2.bounds();
  const auto fb = stein_tv_bound_overlap(frank2, Permutation::identity(200));
  CHECK(fb.tv_bound == Catch::Approx((M / m) * (M / m) / 200.0).epsilon(1e-13));

  // monotone decreasing in n
  CHECK(stein_tv_bound_overlap(frank2, Permutation::identity(400)).tv_bound < fb.tv_bound);

  // invariant under scaling the density values by a constant
  const Density g1 = Density::from_grid(2, {1.0, 2.0, 2.0, 1.0});
  const Density g2 = Density::from_grid(2, {10.0, 20.0, 20.0, 10.0});
  CHECK(stein_tv_bound_overlap(g1, Permutation::identity(10)).tv_bound ==
        Catch::Approx(stein_tv_bound_overlap(g2, Permutation::identity(10)).tv_bound)
            .epsilon(1e-13));
}

TEST_CASE("poisson moments (Touchard)") {
  CHECK(poisson_moment(3.7, 1) == Catch::Approx(3.7).epsilon(1e-14));
  CHECK(poisson_moment(1.0, 3) == Catch::Approx(5.0).epsilon(1e-14));  // Bell(3)
  CHECK(poisson_moment(2.0, 2) == Catch::Approx(6.0).epsilon(1e-14));
  CHECK_THROWS_AS(poisson_moment(1.0, 21), std::invalid_argument);
  CHECK_THROWS_AS(poisson_moment(0.0, 2), std::invalid_argument);
  for (double lambda : {0.5, 1.0, std::exp(1.0)})
    for (int k = 1; k <= 10; ++k)
      REQUIRE(poisson_moment(lambda, k) >= std::pow(lambda, k) - 1e-9);  // Jensen
}

TEST_CASE("stirling table spot values") {
  const auto& S = stirling2_table();
  CHECK(S[3][2] == 3);
  CHECK(S[4][2] == 7);
  CHECK(S[5][3] == 25);
  CHECK(S[20][1] == 1);
}

TEST_CASE("poisson pmf") {
  CHECK(poisson_pmf(1.0, 0) == Catch::Approx(std::exp(-1.0)).epsilon(1e-14));
  double total = 0.0;
  for (int j = 0; j <= 60; ++j) total += poisson_pmf(5.0, j);
  CHECK(total == Catch::Approx(1.0).margin(1e-12));

  const double lambda = std::exp(0.5);
  const double direct = std::exp(-lambda) * lambda * lambda / 2.0;
  CHECK(poisson_pmf(lambda, 2) == Catch::Approx(direct).epsilon(1e-14));

  const auto vec = poisson_pmf_vector(1.0);
  double mass = 0.0;
  for (double p : vec) mass += p;
  CHECK(mass >= 1.0 - 1e-12);
}
