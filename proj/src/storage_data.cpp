#include "adequacy/storage_data.hpp"

#include "detail/text.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace adequacy {

using detail::parse_double;
using detail::split_csv;
using detail::trim;

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lineno;
};

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  Table t;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    std::vector<std::string> fields;
    for (auto f : split_csv(s)) fields.emplace_back(f);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw DataError(path.string() + ":" + std::to_string(n) + ": expected " + std::to_string(t.header.size()) +
                      " fields");
    }
    t.rows.push_back(std::move(fields));
    t.lineno.push_back(n);
  }
  if (t.header.empty()) throw DataError(path.string() + ": empty file");
  return t;
}

void expect_header(const Table& t, const std::vector<std::string>& want, const std::filesystem::path& path) {
  if (t.header != want) {
    std::string w;
    for (const auto& s : want) w += (w.empty() ? "" : ",") + s;
    throw DataError(path.string() + ": header must be " + w);
  }
}

double hourly_probability(double mean_hours) {
  if (std::isinf(mean_hours)) return 0.0;
  return -std::expm1(-1.0 / mean_hours);
}

}  // namespace

TraceLibrary load_trace_library(const std::filesystem::path& path, std::size_t hours) {
  const Table t = read_table(path);
  TraceLibrary lib;
  lib.names = t.header;
  lib.years.assign(t.header.size(), std::vector<double>());
  if (t.rows.size() != hours) {
    throw DataError(path.string() + ": expected " + std::to_string(hours) + " rows, found " +
                    std::to_string(t.rows.size()));
  }
  for (auto& y : lib.years) y.reserve(hours);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = path.string() + ":" + std::to_string(t.lineno[r]);
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      const double v = parse_double(t.rows[r][c], where);
      if (!(v >= 0.0)) throw DataError(where + ": negative value in column " + t.header[c]);
      lib.years[c].push_back(v);
    }
  }
  return lib;
}

double ConventionalUnit::fail_probability() const { return hourly_probability(mttf_h); }
double ConventionalUnit::repair_probability() const { return hourly_probability(mttr_h); }

double ConventionalUnit::availability() const {
  const double pf = fail_probability();
  const double pr = repair_probability();
  if (pf == 0.0) return 1.0;
  return pr / (pf + pr);
}

std::vector<ConventionalUnit> load_portfolio(const std::filesystem::path& path) {
  const Table t = read_table(path);
  expect_header(t, {"name", "capacity_mw", "mttf_h", "mttr_h"}, path);
  std::vector<ConventionalUnit> units;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = path.string() + ":" + std::to_string(t.lineno[r]);
    ConventionalUnit u;
    u.name = t.rows[r][0];
    u.capacity_mw = parse_double(t.rows[r][1], where);
    u.mttf_h = parse_double(t.rows[r][2], where);
    u.mttr_h = parse_double(t.rows[r][3], where);
    if (!(u.capacity_mw >= 0.0) || !(u.mttf_h > 0.0) || !(u.mttr_h > 0.0)) {
      throw DataError(where + ": capacity must be >= 0 and MTTF, MTTR > 0");
    }
    units.push_back(std::move(u));
  }
  if (units.empty()) throw DataError(path.string() + ": empty portfolio");
  return units;
}

std::vector<StorageUnit> load_fleet(const std::filesystem::path& path) {
  const Table t = read_table(path);
  expect_header(t, {"name", "power_mw", "energy_mwh"}, path);
  std::vector<StorageUnit> fleet;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = path.string() + ":" + std::to_string(t.lineno[r]);
    StorageUnit u;
    u.name = t.rows[r][0];
    u.p_bar = parse_double(t.rows[r][1], where);
    u.e_bar = parse_double(t.rows[r][2], where);
    u.initial_soc = u.e_bar;
    fleet.push_back(std::move(u));
  }
  validate_fleet(fleet);
  return fleet;
}

void validate_fleet(const std::vector<StorageUnit>& fleet) {
  if (fleet.empty()) throw DataError("storage fleet is empty");
  for (const auto& u : fleet) {
    if (!(u.p_bar > 0.0)) throw DataError("storage unit " + u.name + ": power rating must be positive");
    if (!(u.e_bar >= 0.0)) throw DataError("storage unit " + u.name + ": energy rating must be non-negative");
    if (!(u.initial_soc >= 0.0 && u.initial_soc <= u.e_bar)) {
      throw DataError("storage unit " + u.name + ": initial state of charge outside [0, e_bar]");
    }
  }
}

void StorageSystem::validate() const {
  if (demand.size() == 0) throw DataError("storage study: no demand years");
  if (wind.size() == 0) throw DataError("storage study: no wind years");
  if (portfolio.empty()) throw DataError("storage study: empty conventional portfolio");
  const std::size_t hours = demand.years.front().size();
  for (const auto& y : demand.years) {
    if (y.size() != hours) throw DataError("storage study: demand years differ in length");
  }
  for (const auto& y : wind.years) {
    if (y.size() != hours) throw DataError("storage study: wind and demand traces differ in length");
  }
  validate_fleet(fleet);
}

}  // namespace adequacy
