#include "adequacy/experiment.hpp"
#include "adequacy/network.hpp"
#include "adequacy/report.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace adequacy;

namespace {

// Exit codes: 0 ok, 1 runtime failure, 2 bad configuration or input.
int run_command(const fs::path& config_path, std::optional<std::uint64_t> seed, std::optional<std::size_t> workers,
                std::optional<fs::path> out_dir, std::optional<fs::path> data_dir, bool quiet) {
  ExperimentConfig cfg = load_config(config_path, resolve_data_dir(data_dir));
  if (seed) cfg.seed = *seed;
  if (workers) {
    if (*workers == 0) throw ConfigError("--workers must be at least 1");
    cfg.workers = *workers;
  }
  const fs::path dir = out_dir ? *out_dir : cfg.output_directory;

  ControllerOptions hooks;
  if (!quiet) {
    hooks.on_run = [](const RunReport& r) {
      std::string line = fmt::format("run {:>2}:", r.run);
      for (const auto& e : r.estimates) {
        line += fmt::format("  {}={:.6g}", e.measure_id, e.q_hat);
        if (e.var_q_hat) line += fmt::format(" (se {:.2g})", std::sqrt(*e.var_q_hat));
      }
      std::cerr << line << '\n';
    };
  }
  const ResultsRecord rec = run_experiment(cfg, &hooks);
  const fs::path results = write_run_outputs(dir, rec);
  if (!quiet) {
    std::ifstream in(dir / "report.txt");
    std::cout << in.rdbuf();
  }
  std::cout << "wrote " << results.string() << '\n';
  return 0;
}

int compare_command(const std::vector<fs::path>& files, std::size_t baseline, bool sweep) {
  std::vector<nlohmann::json> records;
  for (const auto& f : files) records.push_back(read_results(f));
  if (sweep) {
    std::vector<std::string> measures;
    const auto rows = rating_sweep(records, measures);
    std::cout << render_sweep(rows, measures);
  } else {
    std::cout << render_comparison(compare_runs(records, baseline));
  }
  return 0;
}

int validate_command(const std::optional<fs::path>& config, const std::optional<fs::path>& results,
                     std::optional<fs::path> data_dir) {
  if (config) {
    const ExperimentConfig cfg = load_config(*config, resolve_data_dir(data_dir));
    std::cout << config->string() << ": ok (" << to_string(cfg.study) << ", " << to_string(cfg.estimator) << ")\n";
  }
  if (results) {
    const auto problems = check_results(read_results(*results));
    for (const auto& p : problems) std::cout << results->string() << ": " << p << '\n';
    if (!problems.empty()) return 2;
    std::cout << results->string() << ": ok\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel Monte Carlo adequacy assessment"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ADEQUACY_CLI_VERSION));

  fs::path config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<fs::path> out_dir, data_dir;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run one experiment and write results.json, levels.csv and report.txt");
  run->add_option("-c,--config", config_path, "Experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the configured seed");
  run->add_option("--workers", workers, "Override the configured worker count");
  run->add_option("-o,--out", out_dir, "Output directory");
  run->add_option("--data-dir", data_dir, "Directory that relative data paths refer to");
  run->add_flag("-q,--quiet", quiet, "Only print the results path");

  std::vector<fs::path> files;
  std::size_t baseline = 0;
  bool sweep = false;
  auto* cmp = app.add_subcommand("compare", "Tabulate estimates, speeds and speedups of several results files");
  cmp->add_option("files", files, "results.json files")->required()->check(CLI::ExistingFile);
  cmp->add_option("--baseline", baseline, "Index of the baseline record");
  cmp->add_flag("--sweep", sweep, "Pair MC and multilevel records by line rating scale");

  std::optional<fs::path> vconfig, vresults;
  auto* val = app.add_subcommand("validate", "Check a configuration or a results file");
  val->add_option("--config", vconfig)->check(CLI::ExistingFile);
  val->add_option("--results", vresults)->check(CLI::ExistingFile);
  val->add_option("--data-dir", data_dir);

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return run_command(config_path, seed, workers, out_dir, data_dir, quiet);
    if (cmp->parsed()) return compare_command(files, baseline, sweep);
    if (val->parsed()) {
      if (!vconfig && !vresults) {
        std::cerr << "validate: give --config and/or --results\n";
        return 2;
      }
      return validate_command(vconfig, vresults, data_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
