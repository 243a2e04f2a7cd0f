#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "permlab/experiment.hpp"
#include "permlab/io.hpp"

using namespace permlab;

TEST_CASE("tv_distance") {
  const std::vector<double> p{0.25, 0.75};
  CHECK(tv_distance(p, p) == 0.0);

  std::map<int, std::int64_t> point_mass{{0, 1000}};
  CHECK(tv_distance(point_mass, 1000, 1.0) ==
        Catch::Approx(1.0 - std::exp(-1.0)).margin(1e-9));

  // truncating Poi(1) at j=60 leaves less than 1e-12 of distance
  const auto full = poisson_pmf_vector(1.0, 1e-16);
  std::vector<double> trunc(full.begin(), full.begin() + std::min<std::size_t>(full.size(), 61));
  CHECK(tv_distance(full, trunc) < 1e-12);
}

TEST_CASE("chi-square pooling keeps expected counts above 5") {
  std::map<int, std::int64_t> counts;
  RandomStream rs(3);
  const std::int64_t n = 20000;
  for (std::int64_t i = 0; i < n; ++i) {
    // exact Poisson(2) draws via inversion on the cdf
    double u = rs.next_unit(), cum = 0.0;
    int j = 0;
    while (true) {
      cum += poisson_pmf(2.0, j);
      if (u < cum || j > 50) break;
      ++j;
    }
    ++counts[j];
  }
  const Chi2Result r = chi_square_poisson(counts, n, 2.0);
  CHECK(r.bins >= 3);
  CHECK(r.df == r.bins - 2);
  CHECK(r.p_value > 1e-3);  // the data is exactly Poisson
}

TEST_CASE("experiment reports are identical for any worker count") {
  ExperimentConfig cfg;
  cfg.model = UniformModel{200};
  cfg.statistic.kind = StatisticKind::cycle_counts;
  cfg.statistic.l_max = 3;
  cfg.replicates = 20000;
  cfg.seed = 99;

  cfg.threads = 1;
  const auto r1 = run_experiment(cfg);
  cfg.threads = 4;
  const auto r4 = run_experiment(cfg);
  json j1 = report_to_json(r1, false), j4 = report_to_json(r4, false);
  j1.erase("threads");  // the worker-count echo is the one legitimate difference
  j4.erase("threads");
  CHECK(j1 == j4);
}

TEST_CASE("uniform fixed points behave like Poi(1)") {
  ExperimentConfig cfg;
  cfg.model = UniformModel{300};
  cfg.replicates = 20000;
  cfg.seed = 7;
  cfg.threads = 2;
  const auto rep = run_experiment(cfg);
  CHECK(std::abs(rep.mean - 1.0) < 4.0 * rep.moment_se[0]);
  CHECK(rep.tv_to_reference < 0.02);
  CHECK(rep.lambda_reference == Catch::Approx(1.0).margin(1e-10));
  CHECK(rep.lambda_finite_n == Catch::Approx(1.0).margin(1e-10));
  CHECK(rep.assertions_pass);
}

TEST_CASE("uniform cycle counts: marginal means and the joint moment") {
  ExperimentConfig cfg;
  cfg.model = UniformModel{200};
  cfg.statistic.kind = StatisticKind::cycle_counts;
  cfg.statistic.l_max = 3;
  cfg.replicates = 30000;
  cfg.seed = 11;
  cfg.threads = 2;
  const auto rep = run_experiment(cfg);
  REQUIRE(rep.cycle_mean.size() == 3);
  for (int l = 1; l <= 3; ++l) {
    const double se = std::sqrt(1.0 / l / static_cast<double>(cfg.replicates));
    REQUIRE(std::abs(rep.cycle_mean[static_cast<std::size_t>(l - 1)] - 1.0 / l) < 5.0 * se);
    REQUIRE(rep.cycle_reference[static_cast<std::size_t>(l - 1)] ==
            Catch::Approx(1.0 / l).margin(1e-10));
  }
  CHECK(std::abs(rep.joint_c1c2 - 0.5) < 4.0 * rep.joint_c1c2_se);
}

TEST_CASE("joint cycle moments statistic") {
  ExperimentConfig cfg;
  cfg.model = UniformModel{100};
  cfg.statistic.kind = StatisticKind::joint_cycle_moments;
  cfg.statistic.joint_orders = {1, 1};
  cfg.statistic.l_max = 2;
  cfg.replicates = 20000;
  cfg.seed = 13;
  const auto rep = run_experiment(cfg);
  CHECK(std::abs(rep.joint_moment - 0.5) < 4.0 * rep.joint_moment_se);
}

TEST_CASE("overlap with the reversal keeps lambda_n = 1 under uniformity") {
  ExperimentConfig cfg;
  cfg.model = UniformModel{100};
  cfg.statistic.kind = StatisticKind::overlap;
  cfg.statistic.sigma = Permutation::reversal(100);
  cfg.replicates = 10000;
  cfg.seed = 17;
  const auto rep = run_experiment(cfg);
  CHECK(rep.lambda_finite_n == Catch::Approx(1.0).margin(1e-10));
  CHECK(std::abs(rep.mean - 1.0) < 4.0 * rep.moment_se[0]);
}

TEST_CASE("mallows experiment attaches Frank references") {
  ExperimentConfig cfg;
  cfg.model = MallowsModel{60, std::exp(-2.0 / 60.0)};
  cfg.replicates = 5000;
  cfg.seed = 19;
  const auto rep = run_experiment(cfg);
  REQUIRE(rep.references.size() >= 2);
  CHECK(rep.references[0].provenance == "mu_rho");
  // beta = 2 diagonal integral = 1.391226
  CHECK(rep.lambda_reference == Catch::Approx(1.3912257758759399).margin(1e-6));
  CHECK(std::isfinite(rep.lambda_finite_n));
}

TEST_CASE("independent-Z experiment embeds the Stein assertion") {
  ExperimentConfig cfg;
  cfg.model = IndependentZModel{100, Density::uniform()};
  cfg.replicates = 50000;
  cfg.seed = 23;
  cfg.threads = 2;
  const auto rep = run_experiment(cfg);
  CHECK(rep.assertions_pass);
  CHECK(rep.lambda_finite_n == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("exp-family experiment runs a sequential chain and reports autocorrelation") {
  ExperimentConfig cfg;
  cfg.model = ExpFamilyModel{12, ScoreFunction::footrule(), 0.8};
  cfg.replicates = 4000;
  cfg.seed = 29;
  cfg.threads = 8;  // ignored: the chain is sequential
  const auto rep = run_experiment(cfg);
  CHECK(rep.threads == 1);
  CHECK(std::isfinite(rep.mcmc_stat_autocorr));
  CHECK(rep.mcmc_stat_autocorr < 1.0);
  CHECK(rep.replicates == 4000);
}

TEST_CASE("stein check: uniform density overlap at n=100") {
  const auto r = stein_check_overlap(Density::uniform(), Permutation::identity(100), 100000,
                                     424242, 2);
  CHECK(r.lambda_n == Catch::Approx(1.0).margin(1e-12));
  CHECK(r.tv_bound == Catch::Approx(0.01).margin(1e-12));
  CHECK(r.pass);
}

TEST_CASE("stein check: Frank density 2-cycles at n=80") {
  const auto r = stein_check_cycle(Density::frank(2.0), 80, 2, 100000, 31, 2);
  CHECK(r.cycle_len == 2);
  CHECK(r.lambda_n > 0.0);
  CHECK(r.pass);
}

TEST_CASE("moments_from_counts matches direct computation") {
  std::map<int, std::int64_t> counts{{0, 2}, {1, 5}, {3, 3}};
  const auto m = moments_from_counts(counts, 10, 3);
  CHECK(m.raw[0] == Catch::Approx(1.4));          // (0*2 + 1*5 + 3*3)/10
  CHECK(m.raw[1] == Catch::Approx(3.2));          // (0 + 5 + 27)/10
  CHECK(m.raw[2] == Catch::Approx(8.6));          // (0 + 5 + 81)/10
  CHECK(m.se[0] == Catch::Approx(std::sqrt((3.2 - 1.4 * 1.4) / 10.0)));
}

TEST_CASE("experiment config validation") {
  ExperimentConfig cfg;
  cfg.model = UniformModel{10};
  cfg.replicates = 0;
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
  cfg.replicates = 10;
  cfg.moment_order = 11;
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
  cfg.moment_order = 4;
  cfg.statistic.kind = StatisticKind::overlap;
  cfg.statistic.sigma = Permutation::identity(9);
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}
