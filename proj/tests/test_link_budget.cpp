#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rydsat/errors.hpp"
#include "rydsat/link_budget.hpp"

using namespace rydsat;

namespace {

AntennaSpec dish(double d = 16.0, double eff = 0.7, bool losses = false) {
  AntennaSpec a;
  a.diameter = d;
  a.aperture_efficiency = eff;
  if (losses) a.fixed_losses = {{"cable", -3.0}, {"polarization", -3.0}};
  return a;
}

}  // namespace

TEST_CASE("path loss") {
  CHECK(path_loss(3800.0, 36000.0) == doctest::Approx(-195.2).epsilon(0.1 / 195.2));
  CHECK(path_loss(1.0, 1.0) == -32.5);
  CHECK_THROWS_AS(path_loss(0.0, 1.0), Error);
}

TEST_CASE("path loss: distance scaling is exact") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> f(1.0, 1e5), d(1.0, 1e5), a(0.01, 100.0);
  for (int i = 0; i < 500; ++i) {
    const double fi = f(rng), di = d(rng), ai = a(rng);
    REQUIRE(path_loss(fi, ai * di) ==
            doctest::Approx(path_loss(fi, di) - 20.0 * std::log10(ai)).epsilon(1e-13));
  }
}

TEST_CASE("antenna gain") {
  CHECK(antenna_raw_gain(dish(), 0.0788) == doctest::Approx(54.5).epsilon(0.1 / 54.5));
  CHECK(antenna_gain(dish(), 0.0788) == antenna_raw_gain(dish(), 0.0788));
  CHECK(antenna_gain(dish(16.0, 0.7, true), 0.0788) == doctest::Approx(48.5).epsilon(0.1 / 48.5));
  const double lambda = 0.1;
  CHECK(std::abs(antenna_gain(dish(lambda / std::numbers::pi, 1.0), lambda)) <= 1e-12);
}

TEST_CASE("antenna gain: monotone in diameter and wavelength") {
  double prev = -1e9;
  for (double d = 0.5; d < 40.0; d *= 1.3) {
    const double g = antenna_gain(dish(d), 0.0788);
    CHECK(g > prev);
    prev = g;
  }
  prev = 1e9;
  for (double l = 0.01; l < 1.0; l *= 1.3) {
    const double g = antenna_gain(dish(), l);
    CHECK(g < prev);
    prev = g;
  }
}

TEST_CASE("antenna: invalid specs rejected") {
  CHECK_THROWS_AS(antenna_gain(dish(0.0), 0.1), Error);
  CHECK_THROWS_AS(antenna_gain(dish(1.0, 1.5), 0.1), Error);
  CHECK_THROWS_AS(antenna_gain(dish(), 0.0), Error);
}

TEST_CASE("cavity circulated power") {
  CavitySpec c;
  CHECK(cavity_circulated_power(-50.0, c) == -50.0);
  c.q_factor = 100.0;
  CHECK(cavity_circulated_power(-128.0, c) == doctest::Approx(-108.0));
  c.q_factor = 1000.0;
  CHECK(cavity_circulated_power(0.0, c) == doctest::Approx(30.0));
  c.q_factor = 0.5;
  CHECK_THROWS_AS(cavity_circulated_power(0.0, c), Error);
}

TEST_CASE("compose budget: GEO beacon") {
  const double loss = path_loss(3800.0, 36000.0);
  const double gain = antenna_gain(dish(16.0, 0.7, true), 0.0788);
  const LinkBudget b = compose_budget(47.0, {{"path", loss}, {"antenna", gain}}, -128.0);
  CHECK(b.power_after("path").value() == doctest::Approx(-148.0).epsilon(0.5 / 148.0));
  CHECK(b.rx_power == doctest::Approx(-100.0).epsilon(0.5 / 100.0));
  CHECK(b.predicted_snr == doctest::Approx(28.0).epsilon(0.5 / 28.0));
  CHECK(b.predicted_snr + b.noise_floor - b.tx_power == doctest::Approx(loss + gain).epsilon(1e-15));
  CHECK_FALSE(b.power_after("missing").has_value());
  CHECK(b.format().find("predicted SNR") != std::string::npos);
}

TEST_CASE("compose budget: empty terms") {
  const LinkBudget b = compose_budget(10.0, {}, -90.0);
  CHECK(b.rx_power == 10.0);
  CHECK(b.predicted_snr == 100.0);
}

TEST_CASE("compose budget: rx power is order independent") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  std::vector<BudgetTerm> terms;
  for (int i = 0; i < 8; ++i) terms.push_back({"t" + std::to_string(i), u(rng)});
  const double ref = compose_budget(47.0, terms, -128.0).rx_power;
  for (int i = 0; i < 20; ++i) {
    std::shuffle(terms.begin(), terms.end(), rng);
    CHECK(compose_budget(47.0, terms, -128.0).rx_power == doctest::Approx(ref).epsilon(1e-13));
  }
}
