// dfrc: command-line front end for the IRS-aided DFRC joint design.
//
//   dfrc <command> --config <path> --out <dir> [--set key=value ...]
//
// Exit codes: 0 success, 1 validation failure, 2 config error, 3 runtime error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dfrc/config.hpp"
#include "dfrc/driver.hpp"
#include "dfrc/results.hpp"
#include "dfrc/validation.hpp"

namespace {

enum ExitCode { kOk = 0, kValidationFailed = 1, kConfigError = 2, kRuntimeError = 3 };

struct Options {
  std::string config_path;
  std::string preset_name;
  std::string out_dir = "results";
  std::vector<std::string> overrides;
  bool inject_gradient_fault = false;
};

dfrc::ExperimentConfig load_config(const Options& opts) {
  if (!opts.config_path.empty()) return dfrc::parse_config(opts.config_path, opts.overrides);
  if (!opts.preset_name.empty())
    return dfrc::parse_config_text("preset = " + opts.preset_name + "\n", opts.overrides);
  throw dfrc::ConfigError(dfrc::ConfigError::Kind::MissingKey, "", 0,
                          "no configuration given; pass --config <path> or --preset table1");
}

int report_checks(const std::string& suite, const std::vector<dfrc::Check>& checks) {
  std::printf("%-34s %12s %14s  %s\n", "check", "tolerance", "measured", "result");
  const dfrc::Check* first_failure = nullptr;
  for (const auto& c : checks) {
    std::printf("%-34s %12.3g %14.6g  %s\n", c.name.c_str(), c.tolerance, c.measured, c.pass ? "PASS" : "FAIL");
    if (!c.pass && !first_failure) first_failure = &c;
  }
  if (first_failure) {
    std::printf("\n%s: FAILED at '%s' (%s)\n", suite.c_str(), first_failure->name.c_str(),
                first_failure->detail.c_str());
    return kValidationFailed;
  }
  std::printf("\n%s: all %zu checks passed\n", suite.c_str(), checks.size());
  return kOk;
}

void print_summary(const dfrc::ExperimentResult& result) {
  for (const auto& curve : result.curves) {
    if (!curve.traces.empty()) {
      int converged = 0;
      std::vector<int> iterations;
      for (const auto& t : curve.traces) {
        converged += t.termination == dfrc::Termination::Converged ? 1 : 0;
        iterations.push_back(t.iterations());
      }
      std::sort(iterations.begin(), iterations.end());
      const auto& last = curve.points.back();
      std::printf("%-14s runs=%zu converged=%d median_iterations=%d final_mean=%.6g final_std=%.6g\n",
                  curve.label.c_str(), curve.traces.size(), converged, iterations[iterations.size() / 2],
                  last.mean, last.stddev);
    } else {
      for (const auto& p : curve.points)
        std::printf("%-14s %s=%-8.4g mean=%.6g std=%.6g\n", curve.label.c_str(), curve.param_name.c_str(),
                    p.param, p.mean, p.stddev);
    }
  }
}

int run_experiment(const std::string& command, const Options& opts) {
  const dfrc::ExperimentConfig cfg = load_config(opts);
  const auto start = std::chrono::steady_clock::now();
  dfrc::ExperimentResult result;
  if (command == "converge") {
    result = dfrc::run_convergence_experiment(cfg.run, cfg.alphas, cfg.realizations);
  } else {
    result = dfrc::run_power_sweep(cfg.run, cfg.sweep_powers, cfg.sweep_radar_antennas, cfg.sweep_irs,
                                   cfg.realizations);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  print_summary(result);
  const auto files = dfrc::emit_results(result, opts.out_dir, {command, cfg, seconds});
  for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint radar precoder and IRS phase design for DFRC systems"};
  app.require_subcommand(1);
  Options opts;

  const auto add_config_options = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "flat key = value configuration file");
    sub->add_option("--preset", opts.preset_name, "built-in preset (table1) used when --config is absent");
    sub->add_option("--set", opts.overrides, "override, key=value (repeatable)");
  };

  CLI::App* converge = app.add_subcommand("converge", "convergence traces over the configured alpha list");
  CLI::App* sweep = app.add_subcommand("sweep", "converged weighted SNR over power, M and N");
  CLI::App* print = app.add_subcommand("print-config", "print the fully resolved configuration");
  CLI::App* vgrad = app.add_subcommand("validate-gradient", "finite-difference and pipeline oracle checks");
  CLI::App* vsolver = app.add_subcommand("validate-solver", "covariance solver oracle checks");
  for (CLI::App* sub : {converge, sweep, print}) add_config_options(sub);
  for (CLI::App* sub : {converge, sweep}) sub->add_option("--out", opts.out_dir, "output directory");
  vgrad->add_flag("--inject-gradient-fault", opts.inject_gradient_fault,
                  "conjugate the analytic gradient (mutation sanity check)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (converge->parsed()) return run_experiment("converge", opts);
    if (sweep->parsed()) return run_experiment("sweep", opts);
    if (print->parsed()) {
      std::cout << dfrc::print_config(load_config(opts));
      return kOk;
    }
    if (vgrad->parsed()) {
      dfrc::ValidationOptions vopts;
      if (opts.inject_gradient_fault)
        vopts.gradient = [](const dfrc::CVector& theta, const dfrc::ObjectiveBundle& b) {
          return dfrc::CVector(dfrc::euclidean_gradient(theta, b).conjugate());
        };
      return report_checks("validate-gradient", dfrc::validate_gradient(vopts));
    }
    if (vsolver->parsed()) return report_checks("validate-solver", dfrc::validate_solver());
  } catch (const dfrc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return kRuntimeError;
}
