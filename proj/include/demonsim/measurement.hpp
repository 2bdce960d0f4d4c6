#pragma once

#include <array>
#include <cmath>

#include "demonsim/core.hpp"
#include "demonsim/errors.hpp"

namespace demonsim {

/// Exponential error law of the 854-nm depumping pulse:
/// epsilon = 1 - exp(-zeta * theta), theta = Omega_2 * tau_2.
struct ErrorModel {
  double zeta = 1.94;
  double theta = 0.0;
};

inline double error_from_pulse(const ErrorModel& model) {
  if (!(model.zeta > 0.0)) throw ModelError("decay parameter zeta must be positive");
  if (!(model.theta >= 0.0)) throw ModelError("pulse angle theta must be >= 0");
  return 1.0 - std::exp(-model.zeta * model.theta);
}

/// Joint statistics of the true initial state x0 and the demon's record y.
/// Record 1 reads "up", record 0 reads "dn"; a record is wrong with
/// probability epsilon[x0].
struct MeasurementOutcomeTable {
  std::array<std::array<double, 2>, 2> joint{};              // [x0][y]
  std::array<double, 2> marginal_state{};                    // p(x0), the input equilibrium
  std::array<double, 2> marginal_record{};                   // p(y)
  std::array<std::array<double, 2>, 2> conditional_state{};  // [y][x0] = p(x0 | y)
  std::array<std::array<double, 2>, 2> conditional_record{}; // [x0][y] = p(y | x0)
  std::array<bool, 2> record_realizable{};                   // p(y) > 0
  std::array<double, 2> epsilon_by_state{};                  // {eps_dn, eps_up}

  bool symmetric_error() const { return epsilon_by_state[0] == epsilon_by_state[1]; }
  double epsilon() const { return epsilon_by_state[0]; }
};

/// Noisy classical measurement of a two-level equilibrium state. The error
/// is symmetric by default (a single epsilon, as measured); the asymmetric
/// overload exists for generality.
inline MeasurementOutcomeTable measure(const Distribution& p_eq, double epsilon_down,
                                       double epsilon_up) {
  if (p_eq.size() != 2)
    throw DimensionError("measure: expected a two-level distribution");
  if (!(epsilon_down >= 0.0 && epsilon_down <= 1.0) ||
      !(epsilon_up >= 0.0 && epsilon_up <= 1.0))
    throw ModelError("measurement error must lie in [0, 1]");

  MeasurementOutcomeTable t;
  t.epsilon_by_state = {epsilon_down, epsilon_up};
  t.marginal_state = {p_eq[0], p_eq[1]};
  // Record y matches state x iff y == x under the dn<->0, up<->1 encoding.
  for (int x = 0; x < 2; ++x) {
    const double eps = t.epsilon_by_state[static_cast<std::size_t>(x)];
    for (int y = 0; y < 2; ++y) {
      const double flip = (y == x) ? (1.0 - eps) : eps;
      t.joint[x][y] = p_eq[static_cast<std::size_t>(x)] * flip;
      t.conditional_record[x][y] = flip;
    }
  }
  for (int y = 0; y < 2; ++y) {
    t.marginal_record[y] = t.joint[0][y] + t.joint[1][y];
    t.record_realizable[y] = t.marginal_record[y] > 0.0;
    for (int x = 0; x < 2; ++x)
      t.conditional_state[y][x] =
          t.record_realizable[y] ? t.joint[x][y] / t.marginal_record[y] : 0.0;
  }
  return t;
}

inline MeasurementOutcomeTable measure(const Distribution& p_eq, double epsilon) {
  return measure(p_eq, epsilon, epsilon);
}

/// I(X0; Y) of the post-measurement joint, in nats.
inline double mutual_information(const MeasurementOutcomeTable& table) {
  std::vector<std::vector<double>> joint{{table.joint[0][0], table.joint[0][1]},
                                         {table.joint[1][0], table.joint[1][1]}};
  return joint_mutual_information(joint);
}

}  // namespace demonsim
