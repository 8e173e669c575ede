#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace adequacy {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Generator {
  std::size_t node = 0;  // index into Network::node_ids
  double capacity_mw = 0.0;
  double availability = 1.0;
};

struct Line {
  std::size_t from = 0;
  std::size_t to = 0;
  double reactance_pu = 1.0;
  double rating_mw = 0.0;
  double availability = 1.0;
};

/// Transmission system with an hourly system demand trace. Nodal demand is
/// the system demand times the node weight.
struct Network {
  std::string name;
  std::vector<int> node_ids;
  std::vector<double> node_weight;
  std::vector<Generator> generators;
  std::vector<Line> lines;
  std::vector<double> demand_trace;
  double rating_scale = 1.0;  // applied to line ratings only

  std::size_t num_nodes() const noexcept { return node_ids.size(); }
  double scaled_rating(std::size_t line) const { return rating_scale * lines.at(line).rating_mw; }
  double installed_capacity() const noexcept;

  /// Throws DataError naming the offending entry.
  void validate() const;
};

/// Sectioned text format, version 1:
///
///   schema_version,1
///   name,<text>
///   demand_trace,<csv path relative to the network file>
///   [nodes]        id,weight
///   [generators]   node,capacity_mw,availability
///   [lines]        from,to,reactance_pu,rating_mw,availability
///
/// Each section starts with its header row. '#' starts a comment. Weights
/// are renormalised if they sum to 1 within 1e-6.
Network parse_network(std::istream& in, const std::filesystem::path& base_dir);
Network load_network(const std::filesystem::path& path);

/// Single numeric column with a one-line header.
std::vector<double> load_trace_column(const std::filesystem::path& path);

/// FNV-1a of a file's bytes, for recording data versions in results.
std::uint64_t file_fingerprint(const std::filesystem::path& path);

}  // namespace adequacy
