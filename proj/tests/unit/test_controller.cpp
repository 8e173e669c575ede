#include "adequacy/controller.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace adequacy;

namespace {

// E[U] = 1/2 and E[U + U^2/10 - U] = 1/30.
ModelStack toy_stack(bool analytic) {
  ModelStack s;
  s.measures = register_measures({"A", "B"});
  s.models = {"coarse", "fine"};
  s.pairing = Pairing::pattern2;
  if (analytic) {
    s.analytic_level0 = std::vector<double>{0.5, 1.0};
    s.analytic_seconds = 1e-3;
  } else {
    s.levels.push_back({"coarse", [](RngStream& r, std::span<double> up, std::span<double>) {
                          const double u = r.uniform();
                          up[0] = u;
                          up[1] = 2.0 * u;
                        },
                        1e-6});
  }
  s.levels.push_back({"fine-coarse", [](RngStream& r, std::span<double> up, std::span<double> lo) {
                        const double u = r.uniform();
                        up[0] = u + 0.1 * u * u;
                        lo[0] = u;
                        up[1] = 2.0 * u;
                        lo[1] = 2.0 * u;
                      },
                      4e-6});
  return s;
}

ControllerOptions nominal_options() {
  ControllerOptions o;
  o.n0 = 50;
  o.runs = 4;
  o.t_star = 0.05;
  o.target_measure = "A";
  o.seed = 99;
  o.cost_model = CostModel::nominal;
  return o;
}

}  // namespace

TEST_CASE("MLMC run converges to the known expectation") {
  const auto res = run_controller(toy_stack(false), nominal_options());
  REQUIRE(res.estimates.size() == 2);
  const auto& a = res.estimates[0];
  REQUIRE(a.var_q_hat);
  CHECK(std::abs(a.q_hat - (0.5 + 1.0 / 30.0)) < 4.0 * std::sqrt(*a.var_q_hat));
  // Measure B has an identically zero correction.
  CHECK(res.levels[1][1].mean_y == 0.0);
  CHECK(res.levels[1][1].var_y == 0.0);
  CHECK(res.runs.size() == 5);
  CHECK(res.runs[0].counts == std::vector<std::size_t>{50, 50});
  // Nominal accounting: elapsed equals counts times the configured costs.
  CHECK(res.elapsed == doctest::Approx(1e-6 * res.level_counts[0] + 4e-6 * res.level_counts[1]));
  // Each planned run spends about t_star.
  for (std::size_t i = 1; i < res.runs.size(); ++i) CHECK(res.runs[i].elapsed == doctest::Approx(0.05).epsilon(0.01));
}

TEST_CASE("analytic level 0 is added and never sampled") {
  const auto res = run_controller(toy_stack(true), nominal_options());
  REQUIRE(res.analytic_level0);
  CHECK(res.levels[0].size() == 1);
  CHECK(res.levels[0][0].level == 1);
  const auto& a = res.estimates[0];
  CHECK(a.q_hat == doctest::Approx(0.5 + res.levels[0][0].mean_y));
  CHECK(std::abs(a.q_hat - (0.5 + 1.0 / 30.0)) < 4.0 * std::sqrt(*a.var_q_hat));
  CHECK(res.estimates[1].q_hat == 1.0);
}

TEST_CASE("nominal runs are bit-identical and worker-independent per sample") {
  const auto a = run_controller(toy_stack(false), nominal_options());
  const auto b = run_controller(toy_stack(false), nominal_options());
  CHECK(a.level_counts == b.level_counts);
  CHECK(a.estimates[0].q_hat == b.estimates[0].q_hat);
  CHECK(*a.estimates[0].var_q_hat == *b.estimates[0].var_q_hat);

  auto opt = nominal_options();
  opt.workers = 3;
  const auto c = run_controller(toy_stack(false), opt);
  const auto d = run_controller(toy_stack(false), opt);
  CHECK(c.estimates[0].q_hat == d.estimates[0].q_hat);
  // Same samples, merged in a different grouping: equal up to rounding.
  CHECK(c.level_counts == a.level_counts);
  CHECK(c.estimates[0].q_hat == doctest::Approx(a.estimates[0].q_hat).epsilon(1e-12));
}

TEST_CASE("different seeds give different samples") {
  auto opt = nominal_options();
  const auto a = run_controller(toy_stack(false), opt);
  opt.seed = 100;
  const auto b = run_controller(toy_stack(false), opt);
  CHECK(a.estimates[0].q_hat != b.estimates[0].q_hat);
}

TEST_CASE("all-zero outputs fall back to an equal time split") {
  ModelStack s;
  s.measures = register_measures({"A"});
  s.models = {"m"};
  s.levels.push_back({"m", [](RngStream&, std::span<double> up, std::span<double>) { up[0] = 0.0; }, 1e-3});
  auto opt = nominal_options();
  opt.runs = 2;
  const auto res = run_controller(s, opt);
  CHECK(res.runs[1].equal_split);
  CHECK(res.runs[1].counts[0] == 50);  // 0.05 s / 1e-3 s
  CHECK(res.estimates[0].q_hat == 0.0);
}

TEST_CASE("evaluation failures name the level and sample") {
  ModelStack s;
  s.measures = register_measures({"A"});
  s.models = {"m"};
  s.levels.push_back({"m",
                      [](RngStream& r, std::span<double> up, std::span<double>) {
                        if (r.sample_index() == 7) throw std::runtime_error("boom");
                        up[0] = 1.0;
                      },
                      1e-3});
  auto opt = nominal_options();
  try {
    run_controller(s, opt);
    FAIL("expected an exception");
  } catch (const ModelEvaluationError& e) {
    CHECK(e.level() == 0);
    CHECK(e.sample_index() == 7);
  }

  s.levels[0].evaluate = [](RngStream&, std::span<double> up, std::span<double>) { up[0] = NAN; };
  CHECK_THROWS_AS(run_controller(s, opt), ModelEvaluationError);
}

TEST_CASE("stack validation") {
  auto s = toy_stack(false);
  s.levels.pop_back();
  CHECK_THROWS_AS(run_controller(s, nominal_options()), std::invalid_argument);
  auto t = toy_stack(false);
  auto opt = nominal_options();
  opt.target_measure = "C";
  CHECK_THROWS_AS(run_controller(t, opt), std::out_of_range);
  opt = nominal_options();
  opt.n0 = 1;
  CHECK_THROWS(run_controller(t, opt));
}
