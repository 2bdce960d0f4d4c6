#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "demonsim/errors.hpp"
#include "demonsim/numeric.hpp"

namespace demonsim {

inline constexpr double kProbabilityTolerance = 1e-12;

/// Finite set of labeled states with per-state energies, in units where
/// k_B = E = 1. The two-level space puts the ground state first so that
/// index 0 is "dn" (record 0) and index 1 is "up" (record 1) everywhere.
struct StateSpace {
  std::vector<std::string> labels;
  std::vector<double> energies;

  std::size_t size() const { return labels.size(); }

  static StateSpace two_level(double energy_gap = 1.0) {
    return StateSpace{{"dn", "up"}, {0.0, energy_gap}};
  }
};

inline void validate_space(const StateSpace& space) {
  if (space.labels.empty()) throw ModelError("state space must be non-empty");
  if (space.labels.size() != space.energies.size())
    throw DimensionError("state space labels/energies size mismatch");
  for (double e : space.energies)
    if (!std::isfinite(e)) throw ModelError("state energies must be finite");
  for (std::size_t i = 0; i < space.labels.size(); ++i)
    for (std::size_t j = i + 1; j < space.labels.size(); ++j)
      if (space.labels[i] == space.labels[j])
        throw ModelError("duplicate state label: " + space.labels[i]);
}

/// The Boltzmann environment. beta = 0 is the infinite-temperature case and
/// is represented exactly, not by a large sentinel.
struct ThermalContext {
  double beta = 1.0;
  double energy_gap = 1.0;

  bool infinite_temperature() const { return beta == 0.0; }

  double temperature() const {
    if (beta == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / beta;
  }
};

inline ThermalContext make_thermal_context(double beta, double energy_gap = 1.0) {
  if (std::isnan(beta) || beta < 0.0)
    throw ModelError("inverse temperature must satisfy beta >= 0");
  if (!(energy_gap > 0.0))
    throw ModelError("energy gap must be positive");
  return ThermalContext{beta, energy_gap};
}

/// Probability vector aligned with a StateSpace. Exact zeros are preserved:
/// the support structure drives the absolute-irreversibility accounting, so
/// no epsilon flooring is ever applied.
struct Distribution {
  std::vector<double> p;

  std::size_t size() const { return p.size(); }
  double operator[](std::size_t i) const { return p[i]; }
};

inline Distribution make_distribution(std::vector<double> p) {
  if (p.empty()) throw ModelError("distribution must be non-empty");
  CompensatedSum total;
  for (double x : p) {
    if (!(x >= 0.0) || x > 1.0 + kProbabilityTolerance)
      throw ModelError("distribution entries must lie in [0, 1]");
    total.add(x);
  }
  if (std::abs(total.value() - 1.0) > kProbabilityTolerance)
    throw ModelError("distribution entries must sum to 1");
  return Distribution{std::move(p)};
}

/// Preparation pulse angle theta_c = Omega_1 * tau_1, radians.
struct PulsePrep {
  double theta_c;
};

/// Boltzmann populations and effective inverse temperature implied by a
/// preparation pulse, via beta = ln[(1 + cos theta_c) / (1 - cos theta_c)]
/// and p_dn = (1 + cos theta_c) / 2.
struct PrepCalibration {
  double beta;
  double p_down;
};

inline PrepCalibration beta_from_prep_angle(const PulsePrep& prep) {
  const double theta = prep.theta_c;
  if (!(theta > 0.0) || theta > M_PI + 1e-12)
    throw ModelError(
        "preparation angle theta_c must lie in (0, pi]; theta_c = 0 is a "
        "degenerate preparation (infinite beta)");
  const double c = std::cos(theta);
  return PrepCalibration{std::log((1.0 + c) / (1.0 - c)), 0.5 * (1.0 + c)};
}

/// Two-level Boltzmann closed form, valid for any real beta (including the
/// population-inverted beta < 0 that prep angles beyond pi/2 imply).
inline Distribution two_level_equilibrium(double beta, double energy_gap = 1.0) {
  if (std::isnan(beta)) throw ModelError("beta must not be NaN");
  const double x = beta * energy_gap;
  if (std::isinf(x)) {
    return x > 0.0 ? Distribution{{1.0, 0.0}} : Distribution{{0.0, 1.0}};
  }
  const double p_down = 1.0 / (1.0 + std::exp(-x));
  return Distribution{{p_down, 1.0 - p_down}};
}

/// Boltzmann distribution over an arbitrary finite space,
/// p_i proportional to exp(-beta * E_i). beta = 0 yields uniform weights;
/// beta = +inf concentrates uniformly on the minimum-energy states.
inline Distribution equilibrium_distribution(const ThermalContext& ctx,
                                             const StateSpace& space) {
  validate_space(space);
  const std::size_t n = space.size();
  std::vector<double> p(n, 0.0);
  const double e_min = *std::min_element(space.energies.begin(), space.energies.end());
  if (std::isinf(ctx.beta)) {
    std::size_t ground_states = 0;
    for (double e : space.energies)
      if (e == e_min) ++ground_states;
    for (std::size_t i = 0; i < n; ++i)
      if (space.energies[i] == e_min) p[i] = 1.0 / static_cast<double>(ground_states);
    return Distribution{std::move(p)};
  }
  CompensatedSum z;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = std::exp(-ctx.beta * (space.energies[i] - e_min));
    z.add(p[i]);
  }
  const double norm = z.value();
  for (double& x : p) x /= norm;
  return Distribution{std::move(p)};
}

/// -sum p ln p in nats, with 0 ln 0 := 0.
inline double shannon_entropy(const Distribution& d) {
  CompensatedSum h;
  for (double x : d.p)
    if (x > 0.0) h.add(-x * std::log(x));
  return h.value();
}

/// sum p ln(p/q) in nats. A p-supported state outside supp(q) is an
/// absolutely irreversible pair and is reported as such rather than
/// silently returning infinity.
inline double kl_divergence(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size())
    throw DimensionError("kl_divergence: distributions over different spaces");
  CompensatedSum d;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0)
      throw SupportError(
          "kl_divergence: absolutely irreversible pair (supp(p) not within "
          "supp(q)) at state index " +
          std::to_string(i));
    d.add(p[i] * std::log(p[i] / q[i]));
  }
  return d.value();
}

/// Mutual information of a joint table p(i, j), in nats.
inline double joint_mutual_information(const std::vector<std::vector<double>>& joint) {
  const std::size_t rows = joint.size();
  if (rows == 0) throw ModelError("mutual information of an empty table");
  const std::size_t cols = joint.front().size();
  std::vector<double> row_marginal(rows, 0.0);
  std::vector<double> col_marginal(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    if (joint[i].size() != cols)
      throw DimensionError("mutual information: ragged joint table");
    for (std::size_t j = 0; j < cols; ++j) {
      row_marginal[i] += joint[i][j];
      col_marginal[j] += joint[i][j];
    }
  }
  CompensatedSum mi;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double pij = joint[i][j];
      if (pij > 0.0) mi.add(pij * std::log(pij / (row_marginal[i] * col_marginal[j])));
    }
  return mi.value();
}

/// Mean energy under a distribution, used by the thermalization-heat
/// bookkeeping.
inline double mean_energy(const Distribution& d, const StateSpace& space) {
  if (d.size() != space.size())
    throw DimensionError("mean_energy: distribution does not match space");
  CompensatedSum e;
  for (std::size_t i = 0; i < d.size(); ++i) e.add(d[i] * space.energies[i]);
  return e.value();
}

}  // namespace demonsim
