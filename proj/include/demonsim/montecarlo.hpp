#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "demonsim/accounting.hpp"
#include "demonsim/core.hpp"
#include "demonsim/errors.hpp"
#include "demonsim/measurement.hpp"
#include "demonsim/numeric.hpp"
#include "demonsim/protocols.hpp"

namespace demonsim {

/// Where per-trajectory sigma values come from: the model's calibrated
/// probabilities (the default, mirroring tomography-based estimation), or
/// frequencies re-counted from the batch itself.
enum class SigmaMode { model, empirical };

inline const char* sigma_mode_name(SigmaMode m) {
  return m == SigmaMode::model ? "model" : "empirical";
}

/// One sampled feedback cycle. State indices live on the protocol's
/// operating space except x_t, which is the post-thermalization system state.
struct TrajectoryRecord {
  std::size_t x0 = 0;
  int y = 0;
  std::size_t xc = 0;
  std::size_t xt = 0;
  double work = 0.0;
  double heat = 0.0;
  double sigma_cond = 0.0;
  double sigma_uncond = 0.0;
  double sigma_info = 0.0;

  double sigma(Sigma which) const {
    switch (which) {
      case Sigma::conditional: return sigma_cond;
      case Sigma::unconditional: return sigma_uncond;
      case Sigma::informational: return sigma_info;
    }
    return 0.0;
  }
};

struct TrajectoryBatch {
  std::vector<TrajectoryRecord> records;
  std::uint64_t seed = 0;
  std::string protocol_id;
  std::string sweep_point;
  SigmaMode sigma_mode = SigmaMode::model;

  std::size_t n() const { return records.size(); }
};

/// Sample mean with its standard error.
struct Estimate {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  std::size_t n = 0;

  double relative_stderr() const {
    return mean == 0.0 ? std::numeric_limits<double>::infinity()
                       : std::abs(stderr_of_mean / mean);
  }
};

namespace detail {

// Fixed draw slots within each trajectory's private counter block, so adding
// or skipping a draw for one protocol flavor never shifts the others.
inline constexpr std::uint64_t kSlotInitialState = 0;
inline constexpr std::uint64_t kSlotBattery = 1;
inline constexpr std::uint64_t kSlotRecord = 2;
inline constexpr std::uint64_t kSlotControl = 3;
inline constexpr std::uint64_t kSlotThermalize = 4;

inline double uniform_at(std::uint64_t seed, std::uint64_t trajectory,
                         std::uint64_t slot) {
  return uniform_from_bits(
      mix64(seed, trajectory * CounterRng::kDrawsPerTrajectory + slot));
}

/// Positive entries of one stochastic row, cumulated for inverse-CDF draws.
/// The final positive bucket absorbs rounding residue, so a draw can never
/// land on a zero-probability state.
struct SparseCdf {
  std::vector<std::pair<std::size_t, double>> cumulative;

  static SparseCdf from_row(const std::vector<double>& row) {
    SparseCdf cdf;
    double running = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i)
      if (row[i] > 0.0) {
        running += row[i];
        cdf.cumulative.emplace_back(i, running);
      }
    return cdf;
  }

  std::size_t draw(double u) const {
    for (std::size_t k = 0; k + 1 < cumulative.size(); ++k)
      if (u < cumulative[k].second) return cumulative[k].first;
    return cumulative.back().first;
  }
};

}  // namespace detail

/// Draw n feedback cycles: x0 ~ p_eq (x) battery, y ~ p(y | x0), x_c ~
/// C_y(. | x0), x_t ~ p_eq afresh. Each trajectory consumes its own
/// counter block of the root seed, so batches are bitwise reproducible and
/// independent of any execution-order choices. Every sampled outcome is
/// realizable by construction, which is exactly why Monte Carlo reproduces
/// the support-deficient exponential averages.
inline TrajectoryBatch sample_trajectories(const FeedbackProtocol& protocol,
                                           const MeasurementOutcomeTable& table,
                                           std::size_t n, std::uint64_t seed,
                                           SigmaMode mode = SigmaMode::model) {
  if (n < 1) throw ModelError("sample_trajectories: need at least one trajectory");
  validate_protocol(protocol);

  const Distribution p_eq =
      make_distribution({table.marginal_state[0], table.marginal_state[1]});
  const ControlledDistributions cd_system =
      reduce_to_system(protocol, apply_control(protocol, table));
  const StateSpace system_space = StateSpace::two_level(
      protocol.composite() ? protocol.space.energies[protocol.composite_index(1, 0)]
                           : protocol.space.energies[1]);

  // sigma lookup per realizable (y, system x_c) cell.
  std::array<std::array<std::array<double, 3>, 2>, 2> sigma_table{};
  for (int y = 0; y < 2; ++y)
    for (std::size_t xcs = 0; xcs < 2; ++xcs)
      if (cd_system.record_realizable[y] && cd_system.support[y][xcs])
        sigma_table[y][xcs] = entropy_productions(y, xcs, cd_system, p_eq);

  const std::size_t dim = protocol.space.size();
  std::array<std::vector<detail::SparseCdf>, 2> control_cdf;
  for (int y = 0; y < 2; ++y) {
    control_cdf[y].reserve(dim);
    for (std::size_t from = 0; from < dim; ++from)
      control_cdf[y].push_back(detail::SparseCdf::from_row(protocol.channel[y][from]));
  }
  const std::vector<double> p_eq_row{p_eq[0], p_eq[1]};

  TrajectoryBatch batch;
  batch.seed = seed;
  batch.protocol_id = protocol.name;
  batch.sigma_mode = mode;
  batch.records.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    TrajectoryRecord& rec = batch.records[i];
    const std::size_t x0s =
        draw_index(p_eq_row, detail::uniform_at(seed, i, detail::kSlotInitialState));
    std::size_t phonon = 0;
    if (protocol.composite())
      phonon = draw_index(protocol.ancilla_init,
                          detail::uniform_at(seed, i, detail::kSlotBattery));
    rec.x0 = protocol.composite() ? protocol.composite_index(x0s, phonon) : x0s;

    const std::vector<double> record_row{table.conditional_record[x0s][0],
                                         table.conditional_record[x0s][1]};
    rec.y = static_cast<int>(
        draw_index(record_row, detail::uniform_at(seed, i, detail::kSlotRecord)));

    rec.xc = control_cdf[rec.y][rec.x0].draw(
        detail::uniform_at(seed, i, detail::kSlotControl));
    rec.xt =
        draw_index(p_eq_row, detail::uniform_at(seed, i, detail::kSlotThermalize));

    rec.work = work_of_step(rec.x0, rec.xc, protocol.space);
    const std::size_t xcs = protocol.system_of(rec.xc);
    rec.heat = system_space.energies[rec.xt] - system_space.energies[xcs];

    const auto& sig = sigma_table[rec.y][xcs];
    rec.sigma_cond = sig[0];
    rec.sigma_uncond = sig[1];
    rec.sigma_info = sig[2];
  }

  if (mode == SigmaMode::empirical) {
    // Re-derive sigma from batch frequencies: q and p(x_c) become counted
    // rates while the equilibrium reference stays the calibrated model.
    std::array<double, 2> count_y{};
    std::array<std::array<double, 2>, 2> count_y_xc{};
    std::array<double, 2> count_xc{};
    for (const auto& rec : batch.records) {
      const std::size_t xcs = protocol.system_of(rec.xc);
      count_y[rec.y] += 1.0;
      count_y_xc[rec.y][xcs] += 1.0;
      count_xc[xcs] += 1.0;
    }
    const double total = static_cast<double>(n);
    for (auto& rec : batch.records) {
      const std::size_t xcs = protocol.system_of(rec.xc);
      const double q_hat = count_y_xc[rec.y][xcs] / count_y[rec.y];
      const double p_hat = count_xc[xcs] / total;
      rec.sigma_cond = std::log(q_hat / p_eq[xcs]);
      rec.sigma_uncond = std::log(p_hat / p_eq[xcs]);
      rec.sigma_info = std::log(q_hat / p_hat);
    }
  }
  return batch;
}

/// Two-pass mean and standard error, reduced in record order with
/// compensated sums so repeated runs agree to the bit.
inline Estimate estimate(const TrajectoryBatch& batch,
                         const std::function<double(const TrajectoryRecord&)>& f) {
  if (batch.records.empty()) throw ModelError("estimate: empty batch");
  const std::size_t n = batch.n();
  CompensatedSum total;
  for (const auto& rec : batch.records) total.add(f(rec));
  Estimate e;
  e.n = n;
  e.mean = total.value() / static_cast<double>(n);
  if (n == 1) return e;
  CompensatedSum squares;
  for (const auto& rec : batch.records) {
    const double d = f(rec) - e.mean;
    squares.add(d * d);
  }
  const double variance = squares.value() / static_cast<double>(n - 1);
  e.stderr_of_mean = std::sqrt(std::max(variance, 0.0) / static_cast<double>(n));
  return e;
}

/// Estimates of the three exponential averages <e^{-sigma}>.
inline std::array<Estimate, 3> ft_estimate(const TrajectoryBatch& batch) {
  const auto for_sigma = [&](Sigma which) {
    return estimate(batch, [which](const TrajectoryRecord& rec) {
      return std::exp(-rec.sigma(which));
    });
  };
  return {for_sigma(Sigma::conditional), for_sigma(Sigma::unconditional),
          for_sigma(Sigma::informational)};
}

}  // namespace demonsim
