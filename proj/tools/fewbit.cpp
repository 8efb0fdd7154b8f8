// Command-line front end: run experiment configs, run built-in sweeps, and
// run the verification suites.
//
//   fewbit run <config.json> <out-dir>
//   fewbit sweep-builtin <preset> <out-dir> [--trials N] [--snr ...] [...]
//   fewbit verify <suite>          suites: moments theorem1 elbo oracle trends
//
// Exit codes: 0 ok, 1 verification failure, 2 config error, 3 trial failure
// rate above 1%.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fewbit/fewbit.hpp"

namespace {

int run_config(fewbit::ExperimentConfig cfg, const std::string& out_dir) {
  auto t0 = std::chrono::steady_clock::now();
  fewbit::MetricsTable table = fewbit::run_sweep(cfg);
  auto t1 = std::chrono::steady_clock::now();
  fewbit::write_run_outputs(table, cfg, out_dir);
  double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  std::cerr << "swept " << table.rows.size() << " grid rows in " << ms / 1000.0 << " s ("
            << fewbit::worker_count() << " workers)\n";
  long failures = 0, trials = 0;
  for (const auto& row : table.rows) {
    failures += row.failures;
    trials += row.trials;
  }
  if (trials > 0 && double(failures) / double(trials) > 0.01) {
    std::cerr << "error: trial failure rate " << double(failures) / double(trials)
              << " exceeds 1%\n";
    return 3;
  }
  return 0;
}

void apply_overrides(fewbit::ExperimentConfig& cfg, const std::vector<double>& snr,
                     const std::vector<int>& bits, const std::vector<int>& td, int trials,
                     int t_p, uint64_t seed, double step) {
  if (!snr.empty()) cfg.snr_db = snr;
  if (!bits.empty()) cfg.bits = bits;
  if (!td.empty()) cfg.t_d = td;
  if (trials > 0) cfg.trials = trials;
  if (t_p > 0) cfg.t_p = t_p;
  if (seed != 0) cfg.base_seed = seed;
  if (step > 0.0) cfg.step_size = step;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"few-bit massive MIMO detection and JED simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, preset, suite;
  std::vector<double> ov_snr;
  std::vector<int> ov_bits, ov_td;
  int ov_trials = 0, ov_tp = 0;
  uint64_t ov_seed = 0;
  double ov_step = 0.0;

  CLI::App* run = app.add_subcommand("run", "run a JSON experiment config");
  run->add_option("config", config_path, "path to config JSON")->required();
  run->add_option("out", out_dir, "output directory")->required();

  CLI::App* sweep = app.add_subcommand("sweep-builtin", "run a built-in experiment preset");
  sweep->add_option("preset", preset,
                    "fig-detect-iid | fig-detect-corr | fig-jed-iid | fig-jed-corr | "
                    "fig-ser-vs-td | fig-ser-vs-bits")
      ->required();
  sweep->add_option("out", out_dir, "output directory")->required();
  sweep->add_option("--trials", ov_trials, "trials per grid point");
  sweep->add_option("--snr", ov_snr, "SNR grid override (dB)");
  sweep->add_option("--bits", ov_bits, "ADC resolution grid override");
  sweep->add_option("--t-d", ov_td, "data block length grid override");
  sweep->add_option("--t-p", ov_tp, "pilot length override");
  sweep->add_option("--seed", ov_seed, "base seed override");
  sweep->add_option("--step-size", ov_step, "quantizer step override (skips calibration)");

  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "moments | theorem1 | elbo | oracle | trends")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      std::ifstream f(config_path);
      if (!f) {
        std::cerr << "error: cannot open config file " << config_path << "\n";
        return 2;
      }
      std::stringstream ss;
      ss << f.rdbuf();
      fewbit::ExperimentConfig cfg;
      try {
        cfg = fewbit::parse_config_json(ss.str());
      } catch (const fewbit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
      }
      return run_config(cfg, out_dir);
    }

    if (sweep->parsed()) {
      fewbit::ExperimentConfig cfg;
      try {
        cfg = fewbit::preset_config(preset);
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
      }
      apply_overrides(cfg, ov_snr, ov_bits, ov_td, ov_trials, ov_tp, ov_seed, ov_step);
      try {
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
      }
      return run_config(cfg, out_dir);
    }

    // verify
    auto print = [](const std::string& line) { std::cout << line << "\n"; };
    fewbit::verify::Report rep;
    if (suite == "moments") {
      rep = fewbit::verify::moments_suite(10000, 1e-6, 20260808, print);
    } else if (suite == "theorem1") {
      rep = fewbit::verify::theorem1_suite(100, 1000000, 0.01, 20260808, print);
    } else if (suite == "elbo") {
      rep = fewbit::verify::elbo_suite(100, 1e-9, 20260808, print);
    } else if (suite == "oracle") {
      rep = fewbit::verify::oracle_suite(1000, 20260808, print);
    } else if (suite == "trends") {
      rep = fewbit::verify::trends_suite(2000, 20260808, print);
    } else {
      std::cerr << "error: unknown suite '" << suite << "'\n";
      return 2;
    }
    std::cout << rep.checks << " checks, " << rep.failures << " failures\n";
    return rep.ok() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
