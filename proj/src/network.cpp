#include "adequacy/network.hpp"

#include "detail/text.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

namespace adequacy {

using detail::parse_double;
using detail::parse_int;
using detail::split_csv;
using detail::trim;

double Network::installed_capacity() const noexcept {
  double s = 0.0;
  for (const auto& g : generators) s += g.capacity_mw;
  return s;
}

void Network::validate() const {
  const std::size_t n = num_nodes();
  if (n == 0) throw DataError("network: no nodes");
  if (node_weight.size() != n) throw DataError("network: node weight count does not match node count");
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(node_weight[i] >= 0.0)) throw DataError("network: negative weight at node " + std::to_string(node_ids[i]));
    wsum += node_weight[i];
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw DataError("network: node weights do not sum to 1");
  for (std::size_t j = 0; j < generators.size(); ++j) {
    const auto& g = generators[j];
    const std::string where = "network: generator " + std::to_string(j);
    if (g.node >= n) throw DataError(where + " refers to an unknown node");
    if (!(g.capacity_mw >= 0.0)) throw DataError(where + " has negative capacity");
    if (!(g.availability >= 0.0 && g.availability <= 1.0)) throw DataError(where + " availability outside [0,1]");
  }
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto& l = lines[k];
    const std::string where = "network: line " + std::to_string(k);
    if (l.from >= n || l.to >= n) throw DataError(where + " refers to an unknown node");
    if (l.from == l.to) throw DataError(where + " is a self-loop");
    if (!(l.reactance_pu > 0.0)) throw DataError(where + " reactance must be positive");
    if (!(l.rating_mw > 0.0)) throw DataError(where + " rating must be positive");
    if (!(l.availability >= 0.0 && l.availability <= 1.0)) throw DataError(where + " availability outside [0,1]");
  }
  if (!(rating_scale > 0.0)) throw DataError("network: rating_scale must be positive");
  if (demand_trace.empty()) throw DataError("network: empty demand trace");
  for (double d : demand_trace) {
    if (!(d >= 0.0)) throw DataError("network: negative or missing demand in trace");
  }
  // connectivity with every line in service
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& l : lines) parent[find(l.from)] = find(l.to);
  for (std::size_t i = 1; i < n; ++i) {
    if (find(i) != find(0)) throw DataError("network: graph is not connected with all lines in service");
  }
}

std::vector<double> load_trace_column(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trace file " + path.string());
  std::string line;
  std::vector<double> out;
  bool header = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    out.push_back(parse_double(t, path.string() + ":" + std::to_string(lineno)));
  }
  if (out.empty()) throw DataError("trace file " + path.string() + " has no data rows");
  return out;
}

Network parse_network(std::istream& in, const std::filesystem::path& base_dir) {
  Network net;
  std::string section;
  bool expect_header = false;
  std::string line;
  std::size_t lineno = 0;
  std::string trace_ref;
  long schema = -1;
  std::map<long, std::size_t> node_index;
  struct PendingGen {
    long node;
    double cap;
    double avail;
  };
  struct PendingLine {
    long from;
    long to;
    double x;
    double rating;
    double avail;
  };
  std::vector<PendingGen> gens;
  std::vector<PendingLine> lines;

  const std::set<std::string> known{"nodes", "generators", "lines"};
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (const auto hash = t.find('#'); hash != std::string_view::npos) t = trim(t.substr(0, hash));
    if (t.empty()) continue;
    const std::string where = "network line " + std::to_string(lineno);
    if (t.front() == '[') {
      if (t.back() != ']') throw DataError(where + ": malformed section header");
      section = std::string(t.substr(1, t.size() - 2));
      if (!known.count(section)) throw DataError(where + ": unknown section [" + section + "]");
      expect_header = true;
      continue;
    }
    const auto f = split_csv(t);
    if (section.empty()) {
      if (f.size() != 2) throw DataError(where + ": expected key,value");
      if (f[0] == "schema_version") {
        schema = parse_int(f[1], where);
      } else if (f[0] == "name") {
        net.name = std::string(f[1]);
      } else if (f[0] == "demand_trace") {
        trace_ref = std::string(f[1]);
      } else {
        throw DataError(where + ": unknown key '" + std::string(f[0]) + "'");
      }
      continue;
    }
    if (expect_header) {
      expect_header = false;
      continue;
    }
    if (section == "nodes") {
      if (f.size() != 2) throw DataError(where + ": expected id,weight");
      const long id = parse_int(f[0], where);
      if (node_index.count(id)) throw DataError(where + ": duplicate node id " + std::to_string(id));
      node_index[id] = net.node_ids.size();
      net.node_ids.push_back(static_cast<int>(id));
      net.node_weight.push_back(parse_double(f[1], where));
    } else if (section == "generators") {
      if (f.size() != 3) throw DataError(where + ": expected node,capacity_mw,availability");
      gens.push_back({parse_int(f[0], where), parse_double(f[1], where), parse_double(f[2], where)});
    } else {
      if (f.size() != 5) throw DataError(where + ": expected from,to,reactance_pu,rating_mw,availability");
      lines.push_back({parse_int(f[0], where), parse_int(f[1], where), parse_double(f[2], where),
                       parse_double(f[3], where), parse_double(f[4], where)});
    }
  }
  if (schema != 1) throw DataError("network: missing or unsupported schema_version (expected 1)");
  if (trace_ref.empty()) throw DataError("network: missing demand_trace");

  auto node_of = [&](long id, const std::string& what) {
    const auto it = node_index.find(id);
    if (it == node_index.end()) throw DataError("network: " + what + " refers to unknown node " + std::to_string(id));
    return it->second;
  };
  for (std::size_t j = 0; j < gens.size(); ++j) {
    net.generators.push_back({node_of(gens[j].node, "generator " + std::to_string(j)), gens[j].cap, gens[j].avail});
  }
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto& l = lines[k];
    const std::string what = "line " + std::to_string(k);
    net.lines.push_back({node_of(l.from, what), node_of(l.to, what), l.x, l.rating, l.avail});
  }

  const double wsum = std::accumulate(net.node_weight.begin(), net.node_weight.end(), 0.0);
  if (std::abs(wsum - 1.0) > 1e-6) throw DataError("network: node weights sum to " + std::to_string(wsum));
  for (auto& w : net.node_weight) w /= wsum;

  net.demand_trace = load_trace_column(base_dir / trace_ref);
  net.validate();
  return net;
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open network file " + path.string());
  return parse_network(in, path.parent_path());
}

std::uint64_t file_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof buf);
    const auto got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

}  // namespace adequacy
