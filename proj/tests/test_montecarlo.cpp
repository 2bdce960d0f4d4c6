#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "demonsim/exact.hpp"
#include "demonsim/montecarlo.hpp"

using namespace demonsim;

namespace {
constexpr double kPi = 3.14159265358979323846;

struct Bench {
  ThermalContext ctx;
  FeedbackProtocol protocol;
  MeasurementOutcomeTable table;
};

Bench szilard_bench(double theta_c, double epsilon) {
  const auto calib = beta_from_prep_angle(PulsePrep{theta_c});
  auto ctx = make_thermal_context(calib.beta);
  auto protocol = szilard_protocol(StateSpace::two_level());
  auto table = measure(two_level_equilibrium(ctx.beta), epsilon);
  return Bench{std::move(ctx), std::move(protocol), std::move(table)};
}

bool same_record(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  return a.x0 == b.x0 && a.y == b.y && a.xc == b.xc && a.xt == b.xt &&
         a.work == b.work && a.heat == b.heat && a.sigma_cond == b.sigma_cond &&
         a.sigma_uncond == b.sigma_uncond && a.sigma_info == b.sigma_info;
}
}

TEST_CASE("sampling is a pure function of the seed") {
  const auto b = szilard_bench(kPi / 3.0, 0.2);
  const auto one = sample_trajectories(b.protocol, b.table, 512, 777);
  const auto two = sample_trajectories(b.protocol, b.table, 512, 777);
  REQUIRE(one.n() == 512);
  REQUIRE(two.n() == 512);
  for (std::size_t i = 0; i < one.n(); ++i)
    REQUIRE(same_record(one.records[i], two.records[i]));

  const auto other = sample_trajectories(b.protocol, b.table, 512, 778);
  bool any_difference = false;
  for (std::size_t i = 0; i < one.n(); ++i)
    if (!same_record(one.records[i], other.records[i])) any_difference = true;
  CHECK(any_difference);
}

TEST_CASE("trajectory i is independent of the batch size") {
  const auto b = szilard_bench(kPi / 3.0, 0.2);
  const auto small = sample_trajectories(b.protocol, b.table, 50, 41);
  const auto large = sample_trajectories(b.protocol, b.table, 100, 41);
  for (std::size_t i = 0; i < small.n(); ++i)
    REQUIRE(same_record(small.records[i], large.records[i]));
}

TEST_CASE("single-trajectory batches are well formed") {
  const auto b = szilard_bench(kPi / 3.0, 0.2);
  const auto batch = sample_trajectories(b.protocol, b.table, 1, 3);
  REQUIRE(batch.n() == 1);
  const auto est = estimate(batch, [](const TrajectoryRecord& r) { return r.work; });
  CHECK(est.n == 1);
  CHECK(est.stderr_of_mean == 0.0);
}

TEST_CASE("estimate of a constant observable has zero spread") {
  const auto b = szilard_bench(kPi / 3.0, 0.2);
  const auto batch = sample_trajectories(b.protocol, b.table, 1000, 11);
  const auto est = estimate(batch, [](const TrajectoryRecord&) { return 2.5; });
  CHECK(est.mean == Catch::Approx(2.5).margin(1e-15));
  CHECK(est.stderr_of_mean == 0.0);
}

TEST_CASE("noiseless readout never mislabels the state") {
  const auto b = szilard_bench(kPi / 3.0, 0.0);
  const auto batch = sample_trajectories(b.protocol, b.table, 5000, 19);
  for (const auto& r : batch.records) {
    const auto x0s = b.protocol.system_of(r.x0);
    REQUIRE(r.y == static_cast<int>(x0s));
    // Perfect feedback resets the system, extracting the gap from up states.
    CHECK(b.protocol.system_of(r.xc) == 0);
  }
}

TEST_CASE("sampled frequencies and means track the enumeration") {
  const auto b = szilard_bench(kPi / 3.0, 0.2);
  const std::size_t n = 100000;
  const auto batch = sample_trajectories(b.protocol, b.table, n, 2024);

  // p(x0 = up, y = 1) = 0.25 * 0.8 = 0.2 at this point.
  const auto frac = estimate(batch, [&](const TrajectoryRecord& r) {
    return (b.protocol.system_of(r.x0) == 1 && r.y == 1) ? 1.0 : 0.0;
  });
  CHECK(std::abs(frac.mean - 0.2) < 3.0 * frac.stderr_of_mean);

  const auto work = estimate(batch, [](const TrajectoryRecord& r) { return r.work; });
  CHECK(std::abs(work.mean - 0.2) < 3.0 * work.stderr_of_mean);
  CHECK(work.relative_stderr() < 0.06);

  const auto sigma = estimate(
      batch, [](const TrajectoryRecord& r) { return r.sigma_cond; });
  CHECK(std::abs(sigma.mean - 0.166339594407988) < 3.0 * sigma.stderr_of_mean);
  CHECK(sigma.relative_stderr() < 0.06);

  const auto ft = ft_estimate(batch);
  CHECK(std::abs(ft[0].mean - 0.9125) < 3.0 * ft[0].stderr_of_mean);
  CHECK(std::abs(ft[1].mean - 1.0) < 3.0 * ft[1].stderr_of_mean);
  CHECK(std::abs(ft[2].mean - 0.9825) < 3.0 * ft[2].stderr_of_mean);
}

TEST_CASE("composite sampling satisfies the saturated exponential averages") {
  IonCompositeModel model;  // thermal battery, nbar = 0.14
  const auto calib = beta_from_prep_angle(PulsePrep{kPi / 3.0});
  const auto ctx = make_thermal_context(calib.beta);
  const auto ion = ion_composite_protocol(model, ctx);
  const auto table = measure(two_level_equilibrium(ctx.beta), 0.35);

  const auto batch = sample_trajectories(ion, table, 100000, 515);
  const auto ft = ft_estimate(batch);
  for (int k = 0; k < 3; ++k) {
    INFO("sigma index " << k);
    CHECK(std::abs(ft[k].mean - 1.0) < 3.0 * ft[k].stderr_of_mean);
  }

  // Phonon draws must stay inside the truncated ladder.
  for (const auto& r : batch.records) {
    REQUIRE(r.x0 < ion.space.size());
    REQUIRE(r.xc < ion.space.size());
  }
}

TEST_CASE("empirical entropy estimates converge to the model values") {
  const auto b = szilard_bench(kPi / 3.0, 0.2);
  const std::size_t n = 100000;
  const auto model_batch =
      sample_trajectories(b.protocol, b.table, n, 99, SigmaMode::model);
  const auto emp_batch =
      sample_trajectories(b.protocol, b.table, n, 99, SigmaMode::empirical);
  REQUIRE(emp_batch.sigma_mode == SigmaMode::empirical);

  // Identical state paths, sigma recomputed from sampled frequencies.
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(emp_batch.records[i].x0 == model_batch.records[i].x0);
    REQUIRE(emp_batch.records[i].xc == model_batch.records[i].xc);
    REQUIRE(emp_batch.records[i].work == model_batch.records[i].work);
  }

  const auto model_sigma = estimate(
      model_batch, [](const TrajectoryRecord& r) { return r.sigma_info; });
  const auto emp_sigma = estimate(
      emp_batch, [](const TrajectoryRecord& r) { return r.sigma_info; });
  CHECK(std::abs(emp_sigma.mean - model_sigma.mean) <
        3.0 * (model_sigma.stderr_of_mean + emp_sigma.stderr_of_mean) + 1e-3);
}

TEST_CASE("thermalized final states follow the equilibrium law") {
  const auto b = szilard_bench(kPi / 3.0, 0.2);
  const auto batch = sample_trajectories(b.protocol, b.table, 100000, 7);
  const auto up = estimate(batch, [](const TrajectoryRecord& r) {
    return r.xt == 1 ? 1.0 : 0.0;
  });
  CHECK(std::abs(up.mean - 0.25) < 3.0 * up.stderr_of_mean);

  const auto heat = estimate(batch, [](const TrajectoryRecord& r) { return r.heat; });
  // Feedback resets to dn; relaxation re-populates up, absorbing heat.
  CHECK(std::abs(heat.mean - 0.2) < 3.0 * heat.stderr_of_mean);
}
