#include "adequacy/report.hpp"

#include "adequacy/format.hpp"

#include <fmt/format.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

namespace adequacy {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(const json& v) {
  if (v.is_null()) return "";
  return fmt::format("{:.17g}", v.get<double>());
}

std::string opt_num(const std::optional<double>& v, const char* spec = "{:.3g}") {
  return v ? fmt::format(fmt::runtime(spec), *v) : std::string("n/a");
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

}  // namespace

std::string levels_csv(const json& res) {
  std::ostringstream out;
  out << "level,label,measure,n,tau_seconds,seconds,mean_y,var_y,mean_x_upper,mean_x_lower,var_x_upper,var_x_lower,"
         "cov_pair\n";
  for (const auto& l : res.at("levels")) {
    for (const auto& m : res.at("measures")) {
      const std::string id = m.at("id").get<std::string>();
      const json& s = l.at("measures").at(id);
      out << l.at("level").get<int>() << ',' << l.at("label").get<std::string>() << ',' << id << ','
          << l.at("n").get<std::size_t>() << ',' << num(l.at("tau_seconds")) << ',' << num(l.at("seconds")) << ','
          << num(s.at("mean_y")) << ',' << num(s.at("var_y")) << ',' << num(s.at("mean_x_upper")) << ','
          << num(s.at("mean_x_lower")) << ',' << num(s.at("var_x_upper")) << ',' << num(s.at("var_x_lower")) << ','
          << num(s.at("cov_pair")) << '\n';
    }
  }
  return out.str();
}

std::string render_report(const json& res, double wall_seconds, const std::string& timestamp) {
  std::string out;
  out += fmt::format("{}  ({} on {}, models: ", res.value("label", std::string()), res.at("estimator").get<std::string>(),
                     res.at("study").get<std::string>());
  const auto models = res.at("models").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < models.size(); ++i) out += (i ? ", " : "") + models[i];
  out += ")\n";
  out += fmt::format("finished {}  wall {:.2f} s  cost-model time {:.2f} s ({})\n\n", timestamp, wall_seconds,
                     res.at("elapsed_seconds").get<double>(), res.at("cost_model").get<std::string>());

  out += fmt::format("{:<8} {:>22} {:>14} {:>12}\n", "measure", "estimate", "std error", "speed");
  for (const auto& m : res.at("measures")) {
    const std::string f = m.at("formatted").is_null() ? fmt::format("{:.6g}", m.at("estimate").get<double>())
                                                      : m.at("formatted").get<std::string>();
    const std::string se = m.at("std_error").is_null() ? "n/a" : fmt::format("{:.3g}", m["std_error"].get<double>());
    const std::string z = m.at("speed").is_null() ? "n/a" : fmt::format("{:.4g}", m["speed"].get<double>());
    out += fmt::format("{:<8} {:>22} {:>14} {:>12}\n", m.at("id").get<std::string>(), f, se, z);
  }

  out += "\nbreakdown\n";
  const json& a = res.at("analytic_level0");
  if (!a.is_null()) {
    out += fmt::format("  r0 ({}, exact, {:.3g} s):", a.at("model").get<std::string>(), a.at("seconds").get<double>());
    for (const auto& [id, v] : a.at("values").items()) out += fmt::format("  {}={:.6g}", id, v.get<double>());
    out += "\n";
  }
  for (const auto& l : res.at("levels")) {
    out += fmt::format("  r{} ({}): n={} tau={:.3g} ms", l.at("level").get<int>(), l.at("label").get<std::string>(),
                       l.at("n").get<std::size_t>(), 1e3 * l.at("tau_seconds").get<double>());
    for (const auto& m : res.at("measures")) {
      const std::string id = m.at("id").get<std::string>();
      const json& s = l.at("measures").at(id);
      const double n = static_cast<double>(l.at("n").get<std::size_t>());
      if (s.at("var_y").is_null() || n < 2) {
        out += fmt::format("  {}={:.4g}", id, s.at("mean_y").get<double>());
      } else {
        out += fmt::format("  {}={}", id,
                           estimate_format(s.at("mean_y").get<double>(), std::sqrt(s["var_y"].get<double>() / n)));
      }
    }
    out += "\n";
  }

  out += "\nruns\n";
  for (const auto& r : res.at("runs")) {
    out += fmt::format("  run {:>2}: counts [", r.at("run").get<std::size_t>());
    const auto counts = r.at("counts").get<std::vector<std::size_t>>();
    for (std::size_t i = 0; i < counts.size(); ++i) out += (i ? ", " : "") + std::to_string(counts[i]);
    out += fmt::format("]  {:.3g} s", r.at("elapsed_seconds").get<double>());
    if (r.at("over_budget").get<bool>()) out += "  over budget";
    if (r.at("equal_split").get<bool>()) out += "  equal split";
    out += "\n";
  }
  return out;
}

std::string render_comparison(const ComparisonTable& t) {
  std::string out = fmt::format("{:<28} {:<22} {:>10}", "label", "estimator", "time [s]");
  for (const auto& m : t.measures) out += fmt::format(" {:>22} {:>10} {:>9}", m, "z", "speedup");
  out += "\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    out += fmt::format("{:<28} {:<22} {:>10.2f}", r.label + (i == t.baseline ? " *" : ""), r.estimator, r.elapsed);
    for (std::size_t m = 0; m < t.measures.size(); ++m) {
      const std::string est = r.std_error[m] ? estimate_format(r.estimate[m], *r.std_error[m])
                                             : fmt::format("{:.6g}", r.estimate[m]);
      out += fmt::format(" {:>22} {:>10} {:>9}", est, opt_num(r.speed[m]), opt_num(r.speedup[m], "{:.1f}"));
    }
    out += "\n";
  }
  out += "(* baseline)\n";
  return out;
}

std::string render_sweep(const std::vector<SweepRow>& rows, const std::vector<std::string>& measures) {
  std::string out = fmt::format("{:>8}", "rating");
  for (const auto& m : measures) out += fmt::format(" {:>12} {:>12} {:>9}", "z_MC " + m, "z_ML " + m, "ratio");
  out += "\n";
  for (const auto& r : rows) {
    out += fmt::format("{:>8.2f}", r.rating_scale);
    for (std::size_t m = 0; m < measures.size(); ++m) {
      out += fmt::format(" {:>12} {:>12} {:>9}", opt_num(r.z_mc[m]), opt_num(r.z_ml[m]), opt_num(r.speedup[m], "{:.1f}"));
    }
    out += "\n";
  }
  return out;
}

fs::path write_run_outputs(const fs::path& dir, const ResultsRecord& rec) {
  fs::create_directories(dir);
  const fs::path results = dir / "results.json";
  write_file(results, rec.json.dump(2) + "\n");
  write_file(dir / "levels.csv", levels_csv(rec.json));
  write_file(dir / "report.txt", render_report(rec.json, rec.wall_seconds, utc_timestamp()));
  return results;
}

json read_results(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace adequacy
