// dirac-lab: vacuum Schwinger-term checks on a truncated 1+1D Dirac field.
//
// Exit codes: 0 all checks passed (SKIPPED allowed), 1 a check failed,
// 2 configuration or usage error.

#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "dirac_lab/commands.hpp"

namespace {

using dirac_lab::RunConfig;
using dirac_lab::RunContext;
using Command = std::function<dirac_lab::Report(const RunConfig&, const RunContext&)>;

struct Options {
  std::string config;
  std::string out;
  std::string format = "json";
  unsigned workers = 1;
  std::uint64_t seed = RunContext{}.seed;
};

int run(const Command& command, const Options& opt) {
  try {
    const RunConfig cfg = opt.config.empty() ? dirac_lab::parse_config(nullptr)
                                             : dirac_lab::load_config(opt.config);
    const RunContext ctx{opt.workers, opt.seed};
    const auto start = std::chrono::steady_clock::now();
    auto report = command(cfg, ctx);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    report.set_timing(elapsed.count(), opt.workers);
    report.config()["seed"] = opt.seed;

    dirac_lab::OutputFormat format = dirac_lab::OutputFormat::kJson;
    if (opt.format == "csv") format = dirac_lab::OutputFormat::kCsv;
    else if (opt.format == "both") format = dirac_lab::OutputFormat::kBoth;
    dirac_lab::emit(report, opt.out, format);

    std::cerr << report.command() << ": " << report.count(dirac_lab::CheckStatus::kPass) << " passed, "
              << report.count(dirac_lab::CheckStatus::kFail) << " failed, "
              << report.count(dirac_lab::CheckStatus::kSkipped) << " skipped\n";
    for (const auto& c : report.checks()) {
      if (c.status == dirac_lab::CheckStatus::kFail) {
        std::cerr << "  FAIL " << c.name << ": " << c.reason << '\n';
      }
    }
    return report.exit_code();
  } catch (const dirac_lab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vacuum Schwinger-term checks for a truncated 1+1D Dirac field"};
  app.require_subcommand(1);

  Options opt;
  const std::map<std::string, std::pair<std::string, Command>> commands = {
      {"modes", {"Mode table and single-particle invariants", dirac_lab::cmd_modes}},
      {"fock-check", {"Exact Fock-space checks on a small truncation", dirac_lab::cmd_fock_check}},
      {"spectral", {"Mode-sum evaluation for both vacua", dirac_lab::cmd_spectral}},
      {"schwinger", {"Discrete and continuum Schwinger coefficients", dirac_lab::cmd_schwinger}},
      {"continuum", {"Continuum closed forms and quadrature cross-checks", dirac_lab::cmd_continuum}},
      {"scan", {"Parameter sweeps with CSV tables and decay fits", dirac_lab::cmd_scan}},
  };

  int exit_code = 0;
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", opt.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory (default: print to stdout)");
    sub->add_option("--format", opt.format, "Report format")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    sub->add_option("--workers", opt.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "Seed for randomized property checks");
    const Command command = entry.second;
    sub->callback([&exit_code, &opt, command] { exit_code = run(command, opt); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return exit_code;
}
