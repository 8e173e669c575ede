#include "adequacy/composite.hpp"
#include "adequacy/copt.hpp"
#include "adequacy/rng.hpp"
#include "adequacy/storage.hpp"
#include "oracles/enumeration.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>

using namespace adequacy;

namespace {

bool close_rel(double a, double b, double rel = 1e-12) { return std::abs(a - b) <= rel * std::abs(b); }

struct UnitSet {
  std::vector<double> cap;
  std::vector<double> avail;
};

UnitSet random_units(RngStream& r, std::size_t n) {
  UnitSet u;
  for (std::size_t i = 0; i < n; ++i) {
    u.cap.push_back(static_cast<double>(5 + r.uniform_index(96)));
    u.avail.push_back(0.8 + 0.19 * r.uniform());
  }
  return u;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TEST_CASE("capacity table matches exhaustive enumeration") {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    RngStream r(8, 0, trial);
    const std::size_t n = 1 + r.uniform_index(12);
    const auto u = random_units(r, n);
    const auto t0 = std::chrono::steady_clock::now();
    const Copt copt(u.cap, u.avail, 1.0);
    const double build = seconds_since(t0);
    CHECK(build < 1.0);
    const auto states = oracle::enumerate_capacity(u.cap, u.avail);
    double mean = 0.0;
    for (const auto& s : states) mean += s.probability * s.capacity;
    CHECK(close_rel(copt.mean(), mean));
    const double top = copt.max_capacity();
    for (double x = -3.0; x <= top + 10.0; x += 0.7) {
      CAPTURE(x);
      CHECK(close_rel(copt.prob_below(x), oracle::prob_below(states, x)));
      CHECK(close_rel(copt.expected_shortfall(x), oracle::expected_shortfall(states, x)));
    }
    for (double x = 0.0; x <= top; x += 1.0) {
      CHECK(close_rel(copt.prob_below(x), oracle::prob_below(states, x)));
    }
  }
}

TEST_CASE("pmf is a distribution on the grid") {
  const std::vector<double> cap{10.0, 20.0, 20.0};
  const std::vector<double> avail{0.9, 0.5, 1.0};
  const Copt copt(cap, avail, 10.0);
  REQUIRE(copt.size() == 6);
  const auto pmf = copt.pmf();
  CHECK(pmf[0] == 0.0);
  CHECK(pmf[2] == doctest::Approx(0.1 * 0.5));
  CHECK(pmf[3] == doctest::Approx(0.9 * 0.5));
  CHECK(pmf[4] == doctest::Approx(0.1 * 0.5));
  CHECK(pmf[5] == doctest::Approx(0.9 * 0.5));
  double s = 0.0;
  for (double p : pmf) s += p;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(Copt(cap, avail, 0.0), std::invalid_argument);
  const std::vector<double> bad{1.5, 0.5, 0.5};
  CHECK_THROWS_AS(Copt(cap, bad, 1.0), std::invalid_argument);
}

TEST_CASE("HL1 convolution matches enumeration over a demand trace") {
  RngStream r(9, 0, 0);
  Network net;
  net.name = "enum";
  net.node_ids = {1};
  net.node_weight = {1.0};
  const auto u = random_units(r, 12);
  for (std::size_t i = 0; i < u.cap.size(); ++i) net.generators.push_back({0, u.cap[i], u.avail[i]});
  double installed = 0.0;
  for (double c : u.cap) installed += c;
  for (int h = 0; h < 60; ++h) net.demand_trace.push_back(installed * (0.4 + 0.6 * r.uniform()));
  net.demand_trace.push_back(installed * 0.7);  // exactly representable grid cases
  net.demand_trace.push_back(std::floor(installed * 0.8));

  const auto t0 = std::chrono::steady_clock::now();
  const SnapshotRisk got = copt_convolve(net, 1.0);
  CHECK(seconds_since(t0) < 1.0);

  const auto states = oracle::enumerate_capacity(u.cap, u.avail);
  double plc = 0.0, epns = 0.0;
  for (double d : net.demand_trace) {
    for (const auto& s : states) {
      const double c = std::max(0.0, d - s.capacity);
      if (c > kCurtailmentTolerance) plc += s.probability;
      epns += s.probability * c;
    }
  }
  plc /= static_cast<double>(net.demand_trace.size());
  epns /= static_cast<double>(net.demand_trace.size());
  CHECK(close_rel(got.plc, plc));
  CHECK(close_rel(got.epns, epns));
}

TEST_CASE("storage level-0 convolution matches enumeration") {
  RngStream r(10, 0, 0);
  StorageSystem sys;
  double installed = 0.0;
  for (int i = 0; i < 11; ++i) {
    ConventionalUnit unit;
    unit.name = "u" + std::to_string(i);
    unit.capacity_mw = static_cast<double>(10 + r.uniform_index(50));
    unit.mttf_h = 200.0 + 1000.0 * r.uniform();
    unit.mttr_h = 10.0 + 90.0 * r.uniform();
    installed += unit.capacity_mw;
    sys.portfolio.push_back(unit);
  }
  const std::size_t hours = 72;
  for (int y = 0; y < 2; ++y) {
    sys.demand.names.push_back("d" + std::to_string(y));
    sys.wind.names.push_back("w" + std::to_string(y));
    std::vector<double> d(hours), w(hours);
    for (std::size_t t = 0; t < hours; ++t) {
      d[t] = installed * (0.5 + 0.5 * r.uniform());
      w[t] = 0.1 * installed * r.uniform();
    }
    sys.demand.years.push_back(d);
    sys.wind.years.push_back(w);
  }
  sys.fleet.push_back({"s", 5.0, 20.0, 20.0});

  // Availability of the hourly two-state chain, derived independently.
  std::vector<double> cap, avail;
  for (const auto& unit : sys.portfolio) {
    const double pf = 1.0 - std::exp(-1.0 / unit.mttf_h);
    const double pr = 1.0 - std::exp(-1.0 / unit.mttr_h);
    cap.push_back(unit.capacity_mw);
    avail.push_back(pr / (pf + pr));
  }
  const auto states = oracle::enumerate_capacity(cap, avail);
  std::array<double, 24> profile{};
  for (std::size_t h = 0; h < 24; ++h) profile[h] = 5.0 * std::sin(0.26 * static_cast<double>(h));

  for (bool with_profile : {false, true}) {
    double lole = 0.0, eens = 0.0;
    for (const auto& d : sys.demand.years) {
      for (const auto& w : sys.wind.years) {
        for (std::size_t t = 0; t < hours; ++t) {
          const double need = d[t] - w[t] + (with_profile ? profile[t % 24] : 0.0);
          for (const auto& s : states) {
            const double c = std::max(0.0, need - s.capacity);
            if (c > kCurtailmentTolerance) lole += s.probability;
            eens += s.probability * c;
          }
        }
      }
    }
    lole /= 4.0;
    eens /= 4.0;
    const auto t0 = std::chrono::steady_clock::now();
    const AnnualRisk got = with_profile ? convolve_level0(sys, std::span<const double>(profile), 1.0)
                                        : convolve_level0(sys, std::nullopt, 1.0);
    CHECK(seconds_since(t0) < 1.0);
    CAPTURE(with_profile);
    CHECK(close_rel(got.lole, lole));
    CHECK(close_rel(got.eens, eens));
  }
}
