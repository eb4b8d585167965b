#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "fdpc/cli.hpp"

using namespace fdpc;
using namespace fdpc::cli;

namespace {

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("quantity parsing with unit suffixes", "[cli]") {
  REQUIRE(parse_quantity("1e-6", "k") == 1e-6);
  REQUIRE(parse_quantity("-100 dB", "beta") == Catch::Approx(1e-10).epsilon(1e-12));
  REQUIRE(parse_quantity("-100dB", "beta") == Catch::Approx(1e-10).epsilon(1e-12));
  REQUIRE(parse_quantity("23 dBm", "p_ue") == Catch::Approx(0.199526231).epsilon(1e-8));
  REQUIRE(parse_quantity("33.0102999566 dBm", "p_max") == Catch::Approx(2.0).epsilon(1e-9));
  REQUIRE_THROWS_WITH(parse_quantity("10 furlongs", "x"),
                      Catch::Matchers::ContainsSubstring("unknown unit"));
  REQUIRE_THROWS_WITH(parse_quantity("abc", "alpha"),
                      Catch::Matchers::ContainsSubstring("alpha"));
}

TEST_CASE("config file parsing", "[cli]") {
  std::istringstream file(
      "# deployment\n"
      "lambda_bs = 1e-6\n"
      "beta = -80 dB   # residual self-interference\n"
      "p_max = 2\n"
      "scheme = cpc, fpc\n"
      "kind = lower,upper\n"
      "\n"
      "seed = 7\n");
  const auto rc = build_run_config(parse_config_file(file));
  REQUIRE(rc.net.lambda_bs == 1e-6);
  REQUIRE(rc.net.beta == Catch::Approx(1e-8).epsilon(1e-12));
  REQUIRE(rc.net.p_max == 2.0);
  REQUIRE(rc.schemes == std::vector<std::string>{"cpc", "fpc"});
  REQUIRE(rc.kinds == std::vector<std::string>{"lower", "upper"});
  REQUIRE(rc.sim.seed == 7);
}

TEST_CASE("unknown keys are rejected", "[cli]") {
  std::istringstream file("lambda_typo = 1e-6\n");
  REQUIRE_THROWS_WITH(build_run_config(parse_config_file(file)),
                      Catch::Matchers::ContainsSubstring("lambda_typo"));
  std::istringstream missing_eq("lambda_bs 1e-6\n");
  REQUIRE_THROWS_AS(parse_config_file(missing_eq), std::invalid_argument);
}

TEST_CASE("later assignments override earlier ones", "[cli]") {
  Assignments a = {{"beta", "-100 dB"}, {"beta", "-80 dB"}};
  const auto rc = build_run_config(a);
  REQUIRE(rc.net.beta == Catch::Approx(1e-8).epsilon(1e-12));
}

TEST_CASE("invalid scheme parameters name the parameter", "[cli]") {
  RunConfig rc;
  rc.schemes = {"apc"};
  rc.xi = 1.5;
  std::ostringstream out, csv;
  REQUIRE_THROWS_WITH(run_analyze(rc, out, csv), Catch::Matchers::ContainsSubstring("xi"));
  rc = RunConfig{};
  rc.schemes = {"fpc"};
  rc.p_bar = -0.5;
  REQUIRE_THROWS_WITH(run_analyze(rc, out, csv), Catch::Matchers::ContainsSubstring("p_bar"));
  rc = RunConfig{};
  rc.net.alpha = 1.9;
  REQUIRE_THROWS_WITH(run_analyze(rc, out, csv), Catch::Matchers::ContainsSubstring("alpha"));
}

TEST_CASE("analyze: hd baseline and bound ordering", "[cli]") {
  RunConfig rc;
  rc.schemes = {"hd", "cpc"};
  rc.kinds = {"lower", "upper"};
  std::ostringstream out, csv;
  REQUIRE(run_analyze(rc, out, csv) == 0);
  const auto lines = split_lines(csv.str());
  REQUIRE(lines.at(0).rfind("# fdpc", 0) == 0);  // metadata preamble
  const auto header = fields_of(lines.at(1));
  REQUIRE(header.at(0) == "scheme");
  // rows: hd.lower, hd.upper, cpc.lower, cpc.upper
  const auto hd_row = fields_of(lines.at(2));
  REQUIRE(hd_row.at(0) == "hd");
  REQUIRE(std::stod(hd_row.at(4)) == Catch::Approx(1955524.59).epsilon(1e-6));
  const auto cpc_lower = fields_of(lines.at(4));
  const auto cpc_upper = fields_of(lines.at(5));
  REQUIRE(cpc_lower.at(1) == "lower");
  REQUIRE(std::stod(cpc_lower.at(3)) < std::stod(cpc_upper.at(3)));  // p_dl bracket
}

TEST_CASE("sweep: single point, log scale, fixed distance", "[cli]") {
  RunConfig rc;
  rc.schemes = {"cpc"};
  rc.kinds = {"lower"};
  rc.metrics = {"rate_sum", "rate_hd"};
  rc.sweep = SweepAxis{"link_distance", 10.0, 1000.0, 50, SweepScale::log};
  std::ostringstream csv;
  REQUIRE(run_sweep(rc, csv) == 0);
  const auto lines = split_lines(csv.str());
  REQUIRE(lines.size() == 2 + 50);  // metadata + header + rows
  REQUIRE(fields_of(lines.at(1)) ==
          std::vector<std::string>{"link_distance", "rate_sum.cpc.lower", "rate_hd.hd.lower"});
  const auto first = fields_of(lines.at(2));
  REQUIRE(std::stod(first.at(0)) == Catch::Approx(10.0));
  REQUIRE(std::stod(first.at(1)) ==
          Catch::Approx(rate_given_distance(10.0, rc.net, ConstantPower{}, BoundKind::lower,
                                            DuplexMode::fd))
              .epsilon(1e-8));
  // FD ahead of HD at 10 m
  REQUIRE(std::stod(first.at(1)) > std::stod(first.at(2)));

  rc.sweep = SweepAxis{"beta", 1e-12, 1e-12, 1, SweepScale::linear};
  rc.metrics = {"p_dl"};
  std::ostringstream single;
  REQUIRE(run_sweep(rc, single) == 0);
  REQUIRE(split_lines(single.str()).size() == 3);  // metadata + header + one row
}

TEST_CASE("sweep rejects unknown axes and metrics", "[cli]") {
  RunConfig rc;
  rc.sweep = SweepAxis{"bogus", 0.0, 1.0, 3, SweepScale::linear};
  std::ostringstream csv;
  REQUIRE_THROWS_WITH(run_sweep(rc, csv), Catch::Matchers::ContainsSubstring("bogus"));
  rc.sweep = SweepAxis{"beta", 1e-12, 1e-8, 3, SweepScale::linear};
  rc.metrics = {"nope"};
  REQUIRE_THROWS_WITH(run_sweep(rc, csv), Catch::Matchers::ContainsSubstring("nope"));
  rc.metrics = {"p_dl"};
  rc.sweep->scale = SweepScale::log;
  rc.sweep->lo = 0.0;
  REQUIRE_THROWS_AS(run_sweep(rc, csv), std::invalid_argument);
}

TEST_CASE("monte-carlo sweeps are byte-identical across runs", "[cli]") {
  RunConfig rc;
  rc.schemes = {"cpc"};
  rc.kinds = {"mc"};
  rc.metrics = {"p_dl", "ee"};
  rc.sim.n_trials = 500;
  rc.sim.seed = 99;
  rc.sweep = SweepAxis{"beta", 1e-12, 1e-8, 3, SweepScale::log};
  std::ostringstream a, b;
  REQUIRE(run_sweep(rc, a) == 0);
  REQUIRE(run_sweep(rc, b) == 0);
  REQUIRE(a.str() == b.str());
  // different thread counts do not change the bytes either
  rc.sim.n_threads = 3;
  std::ostringstream c;
  REQUIRE(run_sweep(rc, c) == 0);
  REQUIRE(a.str() == c.str());
}

TEST_CASE("csv quoting is rfc-4180 style", "[cli]") {
  REQUIRE(csv_field("plain") == "plain");
  REQUIRE(csv_field("with,comma") == "\"with,comma\"");
  REQUIRE(csv_field("with\"quote") == "\"with\"\"quote\"");
  REQUIRE(format_g9(0.3333333333333) == "0.333333333");
  REQUIRE(format_g9(1955524.59096) == "1955524.59");
}

TEST_CASE("config hash is stable and sensitive", "[cli]") {
  RunConfig a, b;
  REQUIRE(config_hash(a) == config_hash(b));
  b.net.beta = 2e-10;
  REQUIRE(config_hash(a) != config_hash(b));
  REQUIRE(metadata_line(a).rfind("# fdpc", 0) == 0);
}

TEST_CASE("optimize driver emits the trace", "[cli]") {
  RunConfig rc;
  rc.schemes = {"cpc"};
  std::ostringstream out, csv;
  REQUIRE(run_optimize(rc, out, csv) == 0);
  const auto lines = split_lines(csv.str());
  REQUIRE(lines.size() > 34);  // metadata + header + grid evaluations
  REQUIRE(fields_of(lines.at(1)) == std::vector<std::string>{"p", "objective"});
  REQUIRE(out.str().find("objective") != std::string::npos);
}

TEST_CASE("validate passes at defaults with reduced budgets", "[cli]") {
  RunConfig rc;
  rc.sim.n_trials = 20000;
  rc.sim.seed = 42;
  rc.exact_points = 3;
  std::ostringstream out;
  REQUIRE(run_validate(rc, out) == 0);
  REQUIRE(out.str().find("all checks passed") != std::string::npos);
}

TEST_CASE("validate near the singular path-loss exponent", "[cli]") {
  RunConfig rc;
  rc.net.alpha = 2.05;
  rc.sim.n_trials = 8000;
  rc.sim.seed = 42;
  rc.exact_points = 2;
  std::ostringstream out;
  REQUIRE(run_validate(rc, out) == 0);
}
