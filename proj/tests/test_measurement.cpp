#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "demonsim/measurement.hpp"

using namespace demonsim;

namespace {
constexpr double kPi = 3.14159265358979323846;
const Distribution kThird = two_level_equilibrium(std::log(3.0));  // (0.75, 0.25)
}

TEST_CASE("depumping error law") {
  CHECK(error_from_pulse(ErrorModel{1.94, 0.0}) == 0.0);
  CHECK(error_from_pulse(ErrorModel{1.94, 0.357}) ==
        Catch::Approx(0.499716329281373).margin(1e-12));
  CHECK_THROWS_AS(error_from_pulse(ErrorModel{0.0, 0.1}), ModelError);
  CHECK_THROWS_AS(error_from_pulse(ErrorModel{1.94, -0.1}), ModelError);

  double last = -1.0;
  for (double theta = 0.0; theta <= 2.0; theta += 0.05) {
    const double eps = error_from_pulse(ErrorModel{1.94, theta});
    CHECK(eps > last);
    CHECK(std::abs((1.0 - eps) - std::exp(-1.94 * theta)) < 1e-15);
    last = eps;
  }
}

TEST_CASE("measurement joint table") {
  const auto t = measure(kThird, 0.2);
  CHECK(t.symmetric_error());
  CHECK(t.epsilon() == 0.2);

  // Joint cells: p(x0) * (correct/incorrect record probability).
  CHECK(t.joint[0][0] == Catch::Approx(0.6).margin(1e-15));
  CHECK(t.joint[0][1] == Catch::Approx(0.15).margin(1e-15));
  CHECK(t.joint[1][0] == Catch::Approx(0.05).margin(1e-15));
  CHECK(t.joint[1][1] == Catch::Approx(0.2).margin(1e-15));

  CHECK(t.marginal_record[0] == Catch::Approx(0.65).margin(1e-15));
  CHECK(t.marginal_record[1] == Catch::Approx(0.35).margin(1e-15));
  CHECK(t.record_realizable[0]);
  CHECK(t.record_realizable[1]);

  // Bayes consistency: p(x0 | y) p(y) == joint.
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x)
      CHECK(t.conditional_state[y][x] * t.marginal_record[y] ==
            Catch::Approx(t.joint[x][y]).margin(1e-14));

  // Row-normalized record conditionals.
  for (int x = 0; x < 2; ++x)
    CHECK(t.conditional_record[x][0] + t.conditional_record[x][1] ==
          Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("noiseless and fully contrarian measurements") {
  const auto perfect = measure(kThird, 0.0);
  CHECK(perfect.conditional_record[0][0] == 1.0);
  CHECK(perfect.conditional_record[1][1] == 1.0);
  CHECK(perfect.conditional_state[1][1] == 1.0);

  const auto inverted = measure(kThird, 1.0);
  CHECK(inverted.conditional_record[0][1] == 1.0);
  CHECK(inverted.conditional_record[1][0] == 1.0);

  CHECK_THROWS_AS(measure(kThird, -0.01), ModelError);
  CHECK_THROWS_AS(measure(kThird, 1.01), ModelError);
}

TEST_CASE("asymmetric error channels") {
  const auto t = measure(kThird, 0.1, 0.3);
  CHECK_FALSE(t.symmetric_error());
  CHECK(t.joint[0][1] == Catch::Approx(0.75 * 0.1).margin(1e-15));
  CHECK(t.joint[1][0] == Catch::Approx(0.25 * 0.3).margin(1e-15));
}

TEST_CASE("measurement information") {
  const auto worked = measure(two_level_equilibrium(
      beta_from_prep_angle(PulsePrep{kPi / 3.0}).beta), 0.2);
  CHECK(mutual_information(worked) ==
        Catch::Approx(0.147044215496445).margin(1e-12));

  // A coin-flip record carries nothing.
  CHECK(mutual_information(measure(kThird, 0.5)) ==
        Catch::Approx(0.0).margin(1e-15));

  // Information decreases monotonically toward epsilon = 1/2.
  double last = std::numeric_limits<double>::infinity();
  for (double eps = 0.0; eps <= 0.5 + 1e-9; eps += 0.05) {
    const double mi = mutual_information(measure(kThird, eps));
    CHECK(mi < last + 1e-15);
    last = mi;
  }
  // And is symmetric about it.
  CHECK(mutual_information(measure(kThird, 0.3)) ==
        Catch::Approx(mutual_information(measure(kThird, 0.7))).margin(1e-12));
}
