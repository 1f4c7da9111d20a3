#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gridshed/rationing.hpp"
#include "test_helpers.hpp"

using namespace gridshed;
using namespace gridshed::testing;

TEST_CASE("system_reduction multiplies share and fraction") {
  CHECK(system_reduction({1.0 / 3.0, 0.60}) == doctest::Approx(0.20).epsilon(1e-15));
  CHECK(system_reduction({1.0 / 3.0, 0.30}) == doctest::Approx(0.10).epsilon(1e-15));
  CHECK(system_reduction({1.0 / 3.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(system_reduction({1.2, 0.5}), ValidationError);
  CHECK_THROWS_AS(system_reduction({0.5, -0.1}), ValidationError);
}

TEST_CASE("system_reduction is bilinear and bounded") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double f = unit(rng), r = unit(rng), k = unit(rng);
    const double rho = system_reduction({f, r});
    CHECK(rho >= 0.0);
    CHECK(rho <= 1.0);
    CHECK(system_reduction({f * k, r}) == doctest::Approx(k * rho).epsilon(1e-12));
    CHECK(system_reduction({f, r * k}) == doctest::Approx(k * rho).epsilon(1e-12));
  }
}

TEST_CASE("household_cap scales the baseline and flags survivability") {
  const RationingPolicy sixty{1.0 / 3.0, 0.60};
  const HouseholdCap cap = household_cap(sixty, 10.0);
  CHECK(cap.cap_kw == doctest::Approx(4.0));
  CHECK(cap.below_survivability);  // 40% < 50%

  const RationingPolicy none{1.0 / 3.0, 0.0};
  CHECK(household_cap(none, 10.0).cap_kw == 10.0);
  CHECK_FALSE(household_cap(none, 10.0).below_survivability);

  const RationingPolicy forty{1.0 / 3.0, 0.40};
  CHECK_FALSE(household_cap(forty, 10.0).below_survivability);  // 60% >= 50%

  CHECK_THROWS_AS(household_cap(sixty, -1.0), ValidationError);
}

TEST_CASE("apply_rationing scales demand uniformly") {
  const PowerSeries demand = make_power({60000, 60000, 60000});
  const PowerSeries same = apply_rationing(demand, 0.0);
  CHECK(same.values_mw == demand.values_mw);
  const PowerSeries cut = apply_rationing(demand, 0.20);
  CHECK(cut.grid == demand.grid);
  for (double v : cut.values_mw) CHECK(v == doctest::Approx(48000));
  CHECK_THROWS_AS(apply_rationing(demand, 1.5), ValidationError);
}

TEST_CASE("ens is non-increasing in rho") {
  std::mt19937 rng(3);
  EventProfile profile{make_power(random_values(rng, 48, 1e4, 5e4)),
                       make_power(random_values(rng, 48, 2e4, 7e4))};
  double previous = compute_ens(compute_shedding(profile)).mwh;
  for (double rho : {0.05, 0.1, 0.2, 0.4, 0.8, 1.0}) {
    const double ens =
        compute_ens(compute_shedding(profile, apply_rationing(profile.demand, rho))).mwh;
    CHECK(ens <= previous + 1e-9);
    previous = ens;
  }
}

TEST_CASE("compliant households are served their requests") {
  EnforcementSimulator sim({5.0, 3.0, 8.0}, RationingPolicy{1.0, 0.5});
  const std::vector<double> requests{2.0, 1.0, 3.5};
  CHECK(sim.step(requests) == doctest::Approx(6.5));
  for (const auto& h : sim.households()) CHECK(h.state == HouseholdState::normal);
}

TEST_CASE("homogeneous clamped population matches the macro formula exactly") {
  // binary-exact values so the micro aggregate equals (1 - r) * sum(baseline)
  const std::size_t n = 1024;
  const double baseline = 8.0;
  const RationingPolicy policy{1.0, 0.5};
  EnforcementSimulator sim(std::vector<double>(n, baseline), policy);
  const double cap = household_cap(policy, baseline).cap_kw;
  const double served = sim.step(std::vector<double>(n, cap));
  CHECK(served == (1.0 - policy.residential_fraction) * (baseline * n));
  for (const auto& h : sim.households()) CHECK(h.state == HouseholdState::normal);
}

TEST_CASE("violators are warned, then cut off, and stay off") {
  EnforcementSimulator sim({10.0}, RationingPolicy{1.0, 0.6});
  // first violation: clamped to cap and warned
  CHECK(sim.step(std::vector<double>{9.0}) == doctest::Approx(4.0));
  CHECK(sim.households()[0].state == HouseholdState::warned);
  // second violation: cut off, nothing served
  CHECK(sim.step(std::vector<double>{9.0}) == 0.0);
  CHECK(sim.households()[0].state == HouseholdState::cut_off);
  // compliance afterwards does not restore service
  CHECK(sim.step(std::vector<double>{1.0}) == 0.0);
  CHECK(sim.households()[0].state == HouseholdState::cut_off);
}

TEST_CASE("population enforcement matches a scripted per-household replay") {
  std::mt19937 rng(20211215);
  std::lognormal_distribution<double> lognormal(0.5, 0.4);
  const std::size_t n = 1000;
  std::vector<double> baselines(n);
  for (double& b : baselines) b = lognormal(rng);

  const RationingPolicy policy{1.0, 0.6};
  EnforcementSimulator sim(baselines, policy);

  // 10% persistent violators request 2x baseline; the rest request half
  // their cap with some jitter.
  std::uniform_real_distribution<double> jitter(0.1, 0.9);
  std::vector<std::vector<double>> steps(3, std::vector<double>(n));
  for (auto& step : steps) {
    for (std::size_t i = 0; i < n; ++i) {
      const double cap = household_cap(policy, baselines[i]).cap_kw;
      step[i] = (i % 10 == 0) ? 2.0 * baselines[i] : jitter(rng) * cap;
    }
  }

  // independent replay of the documented state machine
  std::vector<int> strikes(n, 0);
  std::vector<double> expected;
  for (const auto& step : steps) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double cap = household_cap(policy, baselines[i]).cap_kw;
      if (strikes[i] >= 2) continue;
      if (step[i] <= cap) {
        total += step[i];
      } else if (strikes[i] == 0) {
        strikes[i] = 1;
        total += cap;
      } else {
        strikes[i] = 2;
      }
    }
    expected.push_back(total);
  }

  for (std::size_t k = 0; k < steps.size(); ++k) {
    CHECK(sim.step(steps[k]) == doctest::Approx(expected[k]).epsilon(1e-12));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 10 == 0) {
      CHECK(sim.households()[i].state == HouseholdState::cut_off);
    } else {
      CHECK(sim.households()[i].state == HouseholdState::normal);
    }
  }
}

TEST_CASE("enforcement rejects malformed input") {
  EnforcementSimulator sim({1.0, 2.0}, RationingPolicy{1.0, 0.5});
  CHECK_THROWS_AS(sim.step(std::vector<double>{1.0}), ValidationError);
  CHECK_THROWS_AS(sim.step(std::vector<double>{1.0, -2.0}), ValidationError);
}

TEST_CASE("household csv loads ids and baselines") {
  std::istringstream in("id,baseline_kw\nh1,2.5\nh2,4.0\n");
  const auto baselines = load_households(in);
  REQUIRE(baselines.size() == 2);
  CHECK(baselines[0] == 2.5);
  CHECK(baselines[1] == 4.0);

  std::istringstream bad("id,baseline_kw\nh1,oops\n");
  CHECK_THROWS_AS(load_households(bad), ValidationError);
}
