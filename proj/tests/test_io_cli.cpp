#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "permlab/io.hpp"

using namespace permlab;
namespace fs = std::filesystem;

TEST_CASE("permutation JSON round trip") {
  const auto p = Permutation::from_targets({3, 1, 4, 2});
  const json j = permutation_to_json(p);
  CHECK(j.dump() == "[3,1,4,2]");
  CHECK(permutation_from_json(j) == p);
  CHECK_THROWS_AS(permutation_from_json(json::parse("[1,1,2]")), std::invalid_argument);
  CHECK_THROWS_AS(permutation_from_json(json::parse("{\"a\":1}")), std::invalid_argument);
}

TEST_CASE("cycle census serializes sparsely") {
  const auto c = cycle_census(Permutation::from_targets({2, 1, 3, 5, 4, 6}));
  const json j = census_to_json(c);
  CHECK(j == json({{"1", 2}, {"2", 2}}));
  const auto back = census_from_json(j, 6);
  CHECK(back.count_of(1) == 2);
  CHECK(back.count_of(2) == 2);
  CHECK(back.count_of(3) == 0);
}

TEST_CASE("model JSON: the beta convention resolves q = exp(-beta/n)") {
  const auto spec = model_from_json(json::parse(R"({"model":"mallows","n":100,"beta":20})"));
  const auto* m = std::get_if<MallowsModel>(&spec);
  REQUIRE(m != nullptr);
  CHECK(m->q == Catch::Approx(std::exp(-0.2)).epsilon(1e-15));

  const auto direct = model_from_json(json::parse(R"({"model":"mallows","n":100,"q":0.81873075})"));
  CHECK(std::get<MallowsModel>(direct).q == Catch::Approx(0.81873075));
}

TEST_CASE("model JSON round trips") {
  for (const char* text : {
           R"({"model":"uniform","n":5})",
           R"({"model":"mallows","n":10,"q":0.5})",
           R"({"model":"exp_family","n":6,"f":"footrule","theta":1.0})",
           R"({"model":"fixed_point_tilt","n":8,"theta":0.5})",
           R"({"model":"mu_random","n":4,"density":{"kind":"frank","beta":2.0}})",
           R"({"model":"independent_z","n":9,"density":{"kind":"uniform"}})",
       }) {
    const auto spec = model_from_json(json::parse(text));
    const auto spec2 = model_from_json(model_to_json(spec));
    CHECK(model_to_json(spec) == model_to_json(spec2));
  }
  CHECK_THROWS_AS(model_from_json(json::parse(R"({"model":"nope","n":3})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(model_from_json(json::parse(R"({"model":"mallows","n":3})")),
                  std::invalid_argument);
}

TEST_CASE("density JSON round trips") {
  const auto frank = density_from_json(json::parse(R"({"kind":"frank","beta":-3.5})"));
  CHECK(frank.kind() == DensityKind::frank);
  CHECK(frank.frank_beta() == -3.5);

  const auto grid = density_from_json(
      json::parse(R"({"kind":"grid","k":2,"values":[1.0,2.0,2.0,1.0]})"));
  const auto grid2 = density_from_json(density_to_json(grid));
  CHECK(grid.grid_values() == grid2.grid_values());

  // exp-family fits are deterministic in (f, theta, k)
  const auto e1 = density_from_json(
      json::parse(R"({"kind":"exp_family","f":"footrule","theta":1.5,"k":16})"));
  const auto e2 = density_from_json(density_to_json(e1));
  CHECK(e1.grid_values() == e2.grid_values());
}

TEST_CASE("grid density CSV round trip is exact") {
  const auto d = fit_exp_family(ScoreFunction::spearman_rank(), 1.3, 8);
  std::stringstream ss;
  density_grid_to_csv(d, ss);
  const auto back = density_grid_from_csv(ss);
  REQUIRE(back.grid_k() == 8);
  for (std::size_t i = 0; i < d.grid_values().size(); ++i)
    REQUIRE(back.grid_values()[i] == d.grid_values()[i]);
}

TEST_CASE("pmf CSV round trip is exact") {
  ExperimentConfig cfg;
  cfg.model = UniformModel{60};
  cfg.replicates = 3000;
  cfg.seed = 5;
  const auto rep = run_experiment(cfg);
  std::stringstream ss;
  pmf_to_csv(rep, ss);
  const auto rows = pmf_from_csv(ss);
  REQUIRE(!rows.empty());
  for (const auto& row : rows) {
    const auto it = rep.counts.find(row.value);
    const double emp = it == rep.counts.end()
                           ? 0.0
                           : static_cast<double>(it->second) / static_cast<double>(rep.replicates);
    REQUIRE(row.empirical_prob == emp);  // bitwise: 17 digits round-trip
  }
}

TEST_CASE("experiment config document parsing") {
  const auto cfg = experiment_config_from_json(json::parse(R"({
    "model": {"model": "mallows", "n": 50, "beta": 4.0},
    "statistic": {"kind": "cycle_counts", "l_max": 2},
    "replicates": 500,
    "seed": 77,
    "threads": 3
  })"));
  CHECK(model_size(cfg.model) == 50);
  CHECK(cfg.statistic.kind == StatisticKind::cycle_counts);
  CHECK(cfg.statistic.l_max == 2);
  CHECK(cfg.replicates == 500);
  CHECK(cfg.seed == 77);
  CHECK(cfg.threads == 3);
  CHECK_THROWS_AS(experiment_config_from_json(json::parse("[1,2]")), std::invalid_argument);
}

TEST_CASE("report JSON carries the pmf and references") {
  ExperimentConfig cfg;
  cfg.model = UniformModel{80};
  cfg.replicates = 2000;
  cfg.seed = 3;
  const auto rep = run_experiment(cfg);
  const json j = report_to_json(rep);
  CHECK(j.at("statistic") == "fixed_points");
  CHECK(j.contains("pmf_counts"));
  CHECK(j.contains("references"));
  CHECK(j.at("replicates") == 2000);
}

// -- CLI black-box tests ----------------------------------------------------

namespace {

struct CliResult {
  int exit_code;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const fs::path tmp = fs::temp_directory_path() / "permlab_cli_out.txt";
  const std::string cmd = std::string(PERMLAB_CLI_PATH) + " " + args + " > " +
                          tmp.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(tmp);
  std::stringstream ss;
  ss << in.rdbuf();
  int code = -1;
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, ss.str()};
}

}  // namespace

TEST_CASE("cli: --help matches the golden file") {
  const auto r = run_cli("--help");
  REQUIRE(r.exit_code == 0);
  std::ifstream golden(std::string(PERMLAB_TEST_DATA) + "/help_golden.txt");
  REQUIRE(golden.good());
  std::stringstream gs;
  gs << golden.rdbuf();
  CHECK(r.out == gs.str());
}

TEST_CASE("cli: sample emits one permutation JSON per line, deterministically") {
  const std::string args =
      R"(sample --model '{"model":"uniform","n":5}' --count 3 --seed 7)";
  const auto first = run_cli(args);
  REQUIRE(first.exit_code == 0);
  std::istringstream lines(first.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto p = permutation_from_json(json::parse(line));
    REQUIRE(p.size() == 5);
    ++count;
  }
  CHECK(count == 3);

  const auto second = run_cli(args);
  CHECK(second.out == first.out);  // byte-identical
}

TEST_CASE("cli: mallows beta form is accepted") {
  const auto r = run_cli(
      R"(sample --model '{"model":"mallows","n":100,"beta":20}' --count 1 --seed 1)");
  REQUIRE(r.exit_code == 0);
  const auto p = permutation_from_json(json::parse(r.out));
  CHECK(p.size() == 100);
}

TEST_CASE("cli: limits reports the classical cycle constants") {
  const auto r = run_cli(
      R"(limits --density '{"kind":"uniform"}' --n 50 --lmax 4)");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j.at("c_rho").size() == 4);
  for (int l = 1; l <= 4; ++l)
    CHECK(j.at("c_rho")[static_cast<std::size_t>(l - 1)].get<double>() ==
          Catch::Approx(1.0 / l).margin(1e-10));
  CHECK(j.at("stein_overlap").at("tv_bound").get<double>() == Catch::Approx(0.02).margin(1e-12));
  CHECK(j.at("lambda_n").get<double>() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("cli: experiment writes report JSON and pmf CSV") {
  const fs::path base = fs::temp_directory_path() / "permlab_exp_report";
  const auto r = run_cli(
      R"(experiment --model '{"model":"uniform","n":120}' --count 3000 --seed 5 --threads 2 --out )" +
      base.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream jf(base.string() + ".json");
  REQUIRE(jf.good());
  const json j = json::parse(jf);
  CHECK(j.at("replicates") == 3000);
  std::ifstream cf(base.string() + ".csv");
  REQUIRE(cf.good());
  const auto rows = pmf_from_csv(cf);
  CHECK(!rows.empty());
}

TEST_CASE("cli: invalid model JSON exits with code 1 and a message") {
  const auto r = run_cli(R"(sample --model '{"model":"mallows"}' --count 1)");
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("error:") != std::string::npos);
}

TEST_CASE("cli: fig1 preset emits the poisson_prob CSV header") {
  const fs::path base = fs::temp_directory_path() / "permlab_fig1_smoke";
  const auto r = run_cli("fig1 --count 400 --seed 7 --out " + base.string());
  // small replicate counts skip the shape assertions; exit must be 0
  REQUIRE(r.exit_code == 0);
  std::ifstream cf(base.string() + ".csv");
  REQUIRE(cf.good());
  std::string header;
  std::getline(cf, header);
  CHECK(header == "value,empirical_prob,poisson_prob");
}
