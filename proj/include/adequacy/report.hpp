#pragma once

#include "adequacy/experiment.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace adequacy {

/// One row per sampled level and measure.
std::string levels_csv(const nlohmann::json& results);

/// Human-readable summary. Wall time and the timestamp live here, never in
/// results.json.
std::string render_report(const nlohmann::json& results, double wall_seconds, const std::string& timestamp);

std::string render_comparison(const ComparisonTable& table);
std::string render_sweep(const std::vector<SweepRow>& rows, const std::vector<std::string>& measures);

/// Writes results.json, levels.csv and report.txt into `directory`
/// (created if missing). Returns the results.json path.
std::filesystem::path write_run_outputs(const std::filesystem::path& directory, const ResultsRecord& record);

nlohmann::json read_results(const std::filesystem::path& path);

}  // namespace adequacy
