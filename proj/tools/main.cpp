#include <fstream>
#include <sstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdpc/cli.hpp"
#include "fdpc/quadrature.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> sets;
};

fdpc::cli::RunConfig build(const CommonArgs& args) {
  fdpc::cli::Assignments assignments;
  if (!args.config_path.empty()) {
    auto file = fdpc::cli::parse_config_path(args.config_path);
    assignments.insert(assignments.end(), file.begin(), file.end());
  }
  for (const auto& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got: " + kv);
    assignments.emplace_back(fdpc::cli::trim(kv.substr(0, eq)),
                             fdpc::cli::trim(kv.substr(eq + 1)));
  }
  return fdpc::cli::build_run_config(assignments);
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "config file (key = value lines, # comments)");
  cmd->add_option("--set", args.sets,
                  "override a config key, e.g. --set \"beta=-100 dB\" (repeatable)")
      ->take_all();
}

// run with the output CSV going to --set output=<path>, or stdout when unset
template <class Fn>
int with_csv_sink(const fdpc::cli::RunConfig& rc, Fn&& fn) {
  if (rc.output_path.empty()) return fn(std::cout);
  std::ofstream out(rc.output_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + rc.output_path);
  return fn(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"full-duplex cellular network power-control analysis"};
  app.require_subcommand(1);

  CommonArgs analyze_args, sweep_args, optimize_args, validate_args;
  auto* analyze = app.add_subcommand("analyze", "evaluate coverage, rates, ASE and EE");
  add_common(analyze, analyze_args);
  auto* sweep = app.add_subcommand("sweep", "sweep one parameter and emit CSV");
  add_common(sweep, sweep_args);
  auto* optimize = app.add_subcommand("optimize", "search scheme parameters for an objective");
  add_common(optimize, optimize_args);
  auto* validate = app.add_subcommand("validate", "run the internal consistency suites");
  add_common(validate, validate_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) {
      const auto rc = build(analyze_args);
      if (rc.output_path.empty()) {  // table only; CSV when a path is given
        std::ostringstream discard;
        return fdpc::cli::run_analyze(rc, std::cout, discard);
      }
      return with_csv_sink(rc, [&](std::ostream& csv) {
        return fdpc::cli::run_analyze(rc, std::cout, csv);
      });
    }
    if (sweep->parsed()) {
      const auto rc = build(sweep_args);
      return with_csv_sink(rc, [&](std::ostream& csv) { return fdpc::cli::run_sweep(rc, csv); });
    }
    if (optimize->parsed()) {
      const auto rc = build(optimize_args);
      return with_csv_sink(rc, [&](std::ostream& csv) {
        return fdpc::cli::run_optimize(rc, std::cout, csv);
      });
    }
    const auto rc = build(validate_args);
    return fdpc::cli::run_validate(rc, std::cout);
  } catch (const fdpc::QuadratureError& e) {
    std::cerr << "numerical convergence failure: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
