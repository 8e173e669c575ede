#pragma once

#include "adequacy/controller.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adequacy {

/// Raised for invalid configurations; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Study { composite, storage };
enum class EstimatorKind { mc, mlmc, mlmc_expectation };

std::string_view to_string(Study s) noexcept;
std::string_view to_string(EstimatorKind e) noexcept;

struct ExperimentConfig {
  Study study = Study::composite;
  std::vector<std::string> models;  // canonical ids, coarsest first
  EstimatorKind estimator = EstimatorKind::mc;
  std::size_t n0 = 100;
  std::size_t runs = 10;
  double t_star = 60.0;
  std::uint64_t seed = 1;
  double alpha = 0.1;
  std::string target_measure;
  std::size_t workers = 1;

  // composite study
  std::filesystem::path network;
  double rating_scale = 1.0;
  double copt_step_mw = 1.0;
  bool lp_shortcut = true;

  // storage study
  std::filesystem::path demand;
  std::filesystem::path wind;
  std::filesystem::path portfolio;
  std::filesystem::path fleet;

  CostModel cost_model = CostModel::measured;
  std::vector<double> nominal_tau;  // per sampled level, seconds
  double nominal_analytic_seconds = 0.0;

  std::filesystem::path output_directory;
  std::string label;

  nlohmann::json source;  // the configuration as given, echoed into results
};

/// Data directory: explicit argument, else $ADEQUACY_DATA_DIR, else the
/// directory bundled with the build.
std::filesystem::path resolve_data_dir(const std::optional<std::filesystem::path>& explicit_dir = std::nullopt);

/// Relative data paths are resolved against `data_dir`.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& data_dir);
ExperimentConfig load_config(const std::filesystem::path& path, const std::filesystem::path& data_dir);

/// Model ids accepted in configurations, by study. Aliases M0/M1/M2/M0'
/// follow the numbering of each study.
std::string canonical_model(Study study, const std::string& id);

struct PreparedExperiment {
  ModelStack stack;
  std::vector<std::pair<std::string, std::uint64_t>> data_files;  // path, fingerprint
};

/// Loads data and builds the model stack (including any analytic level-0
/// term, whose computation time is recorded in the stack).
PreparedExperiment prepare_experiment(const ExperimentConfig& config);

struct ResultsRecord {
  nlohmann::json json;  // results.json content, deterministic under the nominal cost model
  ControllerResult result;
  double wall_seconds = 0.0;
};

ResultsRecord run_experiment(const ExperimentConfig& config, const ControllerOptions* overrides = nullptr);

/// Builds the machine-readable record from a controller result.
nlohmann::json results_json(const ExperimentConfig& config, const PreparedExperiment& prep,
                            const ControllerResult& result);

/// Checks that every headline estimate equals the analytic term plus the
/// level means to 1e-12 relative and that sampled quantities carry errors.
/// Returns a list of problems (empty when consistent).
std::vector<std::string> check_results(const nlohmann::json& results);

struct ComparisonRow {
  std::string label;
  std::string estimator;
  std::vector<std::string> models;
  double elapsed = 0.0;
  std::optional<double> rating_scale;
  std::vector<double> estimate;
  std::vector<std::optional<double>> std_error;
  std::vector<std::optional<double>> speed;
  std::vector<std::optional<double>> speedup;  // against the baseline row
};

struct ComparisonTable {
  std::vector<std::string> measures;
  std::size_t baseline = 0;
  std::vector<ComparisonRow> rows;
};

/// Throws ConfigError when the records do not share their measures.
ComparisonTable compare_runs(const std::vector<nlohmann::json>& records, std::size_t baseline = 0);

struct SweepRow {
  double rating_scale = 0.0;
  std::vector<std::optional<double>> z_mc;
  std::vector<std::optional<double>> z_ml;
  std::vector<std::optional<double>> speedup;
};

/// Pairs MC and multilevel records by rating scale.
std::vector<SweepRow> rating_sweep(const std::vector<nlohmann::json>& records, std::vector<std::string>& measures);

}  // namespace adequacy
