#include "adequacy/composite.hpp"
#include "adequacy/sampling.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <numeric>

using namespace adequacy;

namespace {

const std::filesystem::path kData = ADEQUACY_TEST_DATA_DIR;

Network two_bus(double rating) {
  Network net;
  net.name = "two-bus";
  net.node_ids = {1, 2};
  net.node_weight = {0.0, 1.0};
  net.generators = {{0, 100.0, 0.9}};
  net.lines = {{0, 1, 0.2, rating, 0.99}};
  net.demand_trace = {80.0};
  net.validate();
  return net;
}

SystemStateHL2 all_up(const Network& net, double system_demand) {
  SystemStateHL2 s;
  for (double w : net.node_weight) s.nodal_demand.push_back(w * system_demand);
  s.gen_status.assign(net.generators.size(), 1);
  s.line_status.assign(net.lines.size(), 1);
  s.hour_index = 1;
  return s;
}

}  // namespace

TEST_CASE("injection matrix of a single line") {
  const Network net = two_bus(50.0);
  const std::vector<std::uint8_t> up{1};
  const std::vector<std::size_t> island{0, 1};
  const auto inj = build_injection_matrix(net, up, island);
  REQUIRE(inj.m.rows() == 1);
  REQUIRE(inj.m.cols() == 2);
  CHECK(inj.m(0, 0) == doctest::Approx(0.5));
  CHECK(inj.m(0, 1) == doctest::Approx(-0.5));
}

TEST_CASE("injection matrix reproduces DC flows on the reference network (property)") {
  const Network net = load_network(kData / "rts" / "rts24.net");
  std::vector<std::uint8_t> up(net.lines.size(), 1);
  std::vector<std::size_t> island(net.num_nodes());
  std::iota(island.begin(), island.end(), 0);
  const auto inj = build_injection_matrix(net, up, island);
  const Eigen::Index n = static_cast<Eigen::Index>(net.num_nodes());
  // Incidence A (lines x nodes) and susceptances D.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(net.lines.size()), n);
  for (std::size_t k = 0; k < net.lines.size(); ++k) {
    a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(net.lines[k].from)) = 1.0;
    a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(net.lines[k].to)) = -1.0;
  }
  // Constant injections move no power.
  CHECK((inj.m * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() < 1e-10);
  // Balanced injections satisfy Kirchhoff's current law at every node.
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd p = Eigen::VectorXd::Random(n);
    p.array() -= p.mean();
    const Eigen::VectorXd f = inj.m * p;
    CHECK((a.transpose() * f - p).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("islands follow the in-service lines") {
  const Network net = load_network(kData / "rts" / "rts24.net");
  std::vector<std::uint8_t> up(net.lines.size(), 1);
  CHECK(island_decomposition(net, up).size() == 1);
  // Take out every line touching the first node.
  for (std::size_t k = 0; k < net.lines.size(); ++k) {
    if (net.lines[k].from == 0 || net.lines[k].to == 0) up[k] = 0;
  }
  const auto islands = island_decomposition(net, up);
  REQUIRE(islands.size() == 2);
  CHECK(islands[0] == std::vector<std::size_t>{0});
  CHECK(islands[1].size() == net.num_nodes() - 1);
  std::vector<std::uint8_t> none(net.lines.size(), 0);
  CHECK(island_decomposition(net, none).size() == net.num_nodes());
}

TEST_CASE("hand-checked curtailments on two buses") {
  const CompositeSystem sys(two_bus(50.0));
  auto s = all_up(sys.network(), 80.0);
  CHECK(sys.evaluate_hl2(s).total == doctest::Approx(30.0));  // line limit
  s.line_status[0] = 0;
  CHECK(sys.evaluate_hl2(s).total == doctest::Approx(80.0));  // load bus isolated
  s.line_status[0] = 1;
  s.gen_status[0] = 0;
  CHECK(sys.evaluate_hl2(s).total == doctest::Approx(80.0));

  const CompositeSystem strong(two_bus(500.0));
  auto t = all_up(strong.network(), 80.0);
  CHECK(strong.evaluate_hl2(t).total == 0.0);
  t.nodal_demand[1] = 130.0;
  CHECK(strong.evaluate_hl2(t).total == doctest::Approx(30.0));  // capacity short

  const std::vector<double> demand{0.0, 130.0};
  const std::vector<std::uint8_t> gens{1};
  CHECK(hl1_curtailment(strong.network(), demand, gens) == doctest::Approx(30.0));
  const auto x = measure_outputs({30.0, {}, solvers::LpStatus::optimal});
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 30.0);
  const auto y = measure_outputs({1e-7, {}, solvers::LpStatus::optimal});
  CHECK(y[0] == 0.0);
}

TEST_CASE("network curtailment bounds and monotonicity on sampled states (property)") {
  Network net = load_network(kData / "rts" / "rts24.net");
  net.rating_scale = 0.8;
  Network loose = net;
  loose.rating_scale = 1.0;
  const CompositeSystem tight(net);
  const CompositeSystem relaxed(loose);
  const CompositeSystem exact(net, false);
  SystemStateHL2 s;
  int curtailed = 0;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    RngStream r(555, 1, i);
    sample_hl2_state(net, r, s);
    // Stress the network: heavier demand makes constraints bind more often.
    for (auto& d : s.nodal_demand) d *= 1.3;
    const double c2 = tight.evaluate_hl2(s).total;
    const double c1 = hl1_curtailment(net, s.nodal_demand, s.gen_status);
    const double total = std::accumulate(s.nodal_demand.begin(), s.nodal_demand.end(), 0.0);
    CAPTURE(dump_state(s));
    CHECK(c2 >= c1 - 1e-6);
    CHECK(c2 <= total + 1e-6);
    CHECK(relaxed.evaluate_hl2(s).total <= c2 + 1e-6);
    CHECK(std::abs(exact.evaluate_hl2(s).total - c2) <= 1e-6);
    curtailed += c2 > kCurtailmentTolerance;
  }
  CHECK(curtailed > 50);
}

TEST_CASE("island LP is the documented program") {
  const CompositeSystem sys(two_bus(50.0));
  const auto s = all_up(sys.network(), 80.0);
  std::vector<std::size_t> island{0, 1};
  const auto inj = build_injection_matrix(sys.network(), s.line_status, island);
  const auto lp = sys.island_lp(s, inj);
  const auto res = solvers::solve_lp(lp);
  REQUIRE(res.status == solvers::LpStatus::optimal);
  CHECK(res.objective == doctest::Approx(30.0));
}
