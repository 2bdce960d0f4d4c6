#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "demonsim/core.hpp"
#include "demonsim/errors.hpp"
#include "demonsim/measurement.hpp"

namespace demonsim {

using StochasticMatrix = std::vector<std::vector<double>>;  // [from][to]

inline StochasticMatrix identity_matrix(std::size_t n) {
  StochasticMatrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

inline void validate_channel(const StochasticMatrix& m, std::size_t n) {
  if (m.size() != n) throw DimensionError("channel has wrong number of rows");
  for (const auto& row : m) {
    if (row.size() != n) throw DimensionError("channel has a ragged row");
    CompensatedSum s;
    for (double x : row) {
      if (!(x >= 0.0)) throw ModelError("channel entries must be non-negative");
      s.add(x);
    }
    if (std::abs(s.value() - 1.0) > kProbabilityTolerance)
      throw ModelError("channel row does not sum to 1");
  }
}

/// Per-record stochastic control channel C_y(x_c | x_0) over a state space
/// that is either the bare two-level system or its composite extension by a
/// phonon battery. Channels are stochastic matrices rather than deterministic
/// maps so the composite marginal is representable and the engines stay
/// protocol-agnostic.
struct FeedbackProtocol {
  std::string name;
  StateSpace space;                        // operating space
  std::array<StochasticMatrix, 2> channel; // channel[y]
  int ancilla_levels = 0;                  // 0 = bare system
  std::vector<double> ancilla_init;        // initial battery weights, size ancilla_levels
  bool reconstructed = false;              // protocol details rebuilt, not taken from data

  bool composite() const { return ancilla_levels > 0; }

  std::size_t system_of(std::size_t index) const {
    return composite() ? index / static_cast<std::size_t>(ancilla_levels) : index;
  }
  std::size_t phonon_of(std::size_t index) const {
    return composite() ? index % static_cast<std::size_t>(ancilla_levels) : 0;
  }
  std::size_t composite_index(std::size_t system, std::size_t phonon) const {
    return system * static_cast<std::size_t>(ancilla_levels) + phonon;
  }

  /// Probability of starting in protocol-space state `index` given the
  /// system part is distributed as p_sys.
  double initial_weight(std::size_t index, const Distribution& p_sys) const {
    const double ps = p_sys[system_of(index)];
    return composite() ? ps * ancilla_init[phonon_of(index)] : ps;
  }
};

inline void validate_protocol(const FeedbackProtocol& p) {
  validate_space(p.space);
  validate_channel(p.channel[0], p.space.size());
  validate_channel(p.channel[1], p.space.size());
  if (p.composite()) {
    if (p.space.size() != 2 * static_cast<std::size_t>(p.ancilla_levels))
      throw DimensionError("composite space size must be 2 * ancilla_levels");
    CompensatedSum s;
    for (double x : p.ancilla_init) s.add(x);
    if (p.ancilla_init.size() != static_cast<std::size_t>(p.ancilla_levels) ||
        std::abs(s.value() - 1.0) > kProbabilityTolerance)
      throw ModelError("battery initial distribution invalid");
  }
}

/// Work carried by one control transition: the energy the system releases,
/// w = E(x_0) - E(x_c). Negative values mean work was injected.
inline double work_of_step(std::size_t x0, std::size_t xc, const StateSpace& space) {
  if (x0 >= space.size() || xc >= space.size())
    throw DimensionError("work_of_step: state index outside space");
  return space.energies[x0] - space.energies[xc];
}

/// Szilard engine feedback: on record 1 the demon drains the excited state
/// (up -> dn extracts E, dn stays put); on record 0 it does nothing.
inline FeedbackProtocol szilard_protocol(const StateSpace& space) {
  if (space.size() != 2) throw DimensionError("szilard_protocol needs a two-level space");
  FeedbackProtocol p;
  p.name = "szilard";
  p.space = space;
  p.channel[0] = identity_matrix(2);
  p.channel[1] = {{1.0, 0.0}, {1.0, 0.0}};
  validate_protocol(p);
  return p;
}

/// State-flipping feedback: on record 1 the demon applies a pi-flip
/// (up -> dn extracts E, dn -> up injects E); on record 0 it does nothing.
/// This conditional-flip form is a reconstruction and is flagged as such in
/// output metadata.
inline FeedbackProtocol state_flip_protocol(const StateSpace& space) {
  if (space.size() != 2)
    throw DimensionError("state_flip_protocol needs a two-level space");
  FeedbackProtocol p;
  p.name = "flip";
  p.space = space;
  p.channel[0] = identity_matrix(2);
  p.channel[1] = {{0.0, 1.0}, {1.0, 0.0}};
  p.reconstructed = true;
  validate_protocol(p);
  return p;
}

/// Do-nothing control, useful as a baseline: both records leave the state
/// untouched.
inline FeedbackProtocol identity_protocol(const StateSpace& space) {
  FeedbackProtocol p;
  p.name = "identity";
  p.space = space;
  p.channel[0] = identity_matrix(space.size());
  p.channel[1] = identity_matrix(space.size());
  validate_protocol(p);
  return p;
}

/// Trapped-ion composite model: qubit (x) tensor phonon battery (n), with the
/// battery initialized thermal at mean nbar and truncated at n_max.
struct IonCompositeModel {
  double lamb_dicke = 0.11;  // eta-tilde; sets the pulse duration, recorded as metadata
  double nbar = 0.14;        // initial mean phonon number
  int n_max = 30;            // Fock truncation
  double pulse_area = M_PI;  // red-sideband pulse angle for the n = 1 pair

  static constexpr double kTailTolerance = 1e-10;
};

inline void validate_ion_model(const IonCompositeModel& m) {
  if (!(m.lamb_dicke > 0.0)) throw ModelError("Lamb-Dicke parameter must be positive");
  if (!(m.nbar >= 0.0)) throw ModelError("mean phonon number must be >= 0");
  if (m.n_max < 2) throw ModelError("Fock truncation n_max must be >= 2");
  if (!(m.pulse_area > 0.0)) throw ModelError("pulse area must be positive");
}

/// Red-sideband population transfer between |up, n-1> and |dn, n>. The pair
/// Rabi frequency scales as sqrt(n), so a pulse calibrated as a pi-pulse on
/// the n = 1 pair transfers sin^2(pi sqrt(n) / 2) on pair n.
inline double sideband_transfer_prob(int n, const IonCompositeModel& model) {
  validate_ion_model(model);
  if (n < 1)
    throw ZeroProbabilityError(
        "sideband pair index must be >= 1: |up, n-1> has no partner at n = 0");
  const double s = std::sin(0.5 * model.pulse_area * std::sqrt(static_cast<double>(n)));
  return s * s;
}

/// Truncated thermal (geometric) phonon distribution with mean nbar,
/// renormalized over 0..n_max. Rejects truncations whose discarded tail
/// exceeds the model tolerance.
inline std::vector<double> thermal_phonon_weights(const IonCompositeModel& model) {
  validate_ion_model(model);
  const int levels = model.n_max + 1;
  std::vector<double> w(static_cast<std::size_t>(levels), 0.0);
  if (model.nbar == 0.0) {
    w[0] = 1.0;
    return w;
  }
  const double r = model.nbar / (1.0 + model.nbar);
  const double tail = std::pow(r, levels);
  if (tail >= IonCompositeModel::kTailTolerance)
    throw ModelError(
        "truncation tail too heavy: n_max insufficient for requested nbar");
  const double norm = (1.0 - r) / (1.0 - tail);
  double rn = 1.0;
  for (int n = 0; n < levels; ++n) {
    w[static_cast<std::size_t>(n)] = norm * rn;
    rn *= r;
  }
  return w;
}

/// Szilard engine on the composite (qubit, phonon) space: on record 1 the
/// red-sideband pulse exchanges one quantum between qubit and battery, i.e.
/// |up, n-1> <-> |dn, n> with the sqrt(n)-scaled transfer probability; on
/// record 0 nothing happens. With nbar = 0 the system marginal reduces
/// exactly to the ideal Szilard protocol; with nbar > 0 every conditional
/// q(x_c | y) acquires full support.
inline FeedbackProtocol ion_composite_protocol(const IonCompositeModel& model,
                                               const ThermalContext& ctx) {
  validate_ion_model(model);
  const int levels = model.n_max + 1;
  const std::size_t dim = 2 * static_cast<std::size_t>(levels);

  FeedbackProtocol p;
  p.name = "ion";
  p.ancilla_levels = levels;
  p.ancilla_init = thermal_phonon_weights(model);
  p.space.labels.reserve(dim);
  p.space.energies.reserve(dim);
  for (const char* sys : {"dn", "up"})
    for (int n = 0; n < levels; ++n) {
      p.space.labels.push_back(std::string(sys) + ":" + std::to_string(n));
      p.space.energies.push_back(sys[0] == 'u' ? ctx.energy_gap : 0.0);
    }

  p.channel[0] = identity_matrix(dim);
  StochasticMatrix c1(dim, std::vector<double>(dim, 0.0));
  for (int n = 0; n < levels; ++n) {
    const std::size_t dn_n = p.composite_index(0, static_cast<std::size_t>(n));
    const std::size_t up_n = p.composite_index(1, static_cast<std::size_t>(n));
    // |dn, n> couples down the ladder to |up, n-1>.
    if (n >= 1) {
      const double t = sideband_transfer_prob(n, model);
      c1[dn_n][p.composite_index(1, static_cast<std::size_t>(n - 1))] = t;
      c1[dn_n][dn_n] = 1.0 - t;
    } else {
      c1[dn_n][dn_n] = 1.0;
    }
    // |up, n> couples up the ladder to |dn, n+1>; the topmost level has no
    // partner inside the truncation and is left in place (its occupancy is
    // bounded by the tail tolerance).
    if (n + 1 < levels) {
      const double t = sideband_transfer_prob(n + 1, model);
      c1[up_n][p.composite_index(0, static_cast<std::size_t>(n + 1))] = t;
      c1[up_n][up_n] = 1.0 - t;
    } else {
      c1[up_n][up_n] = 1.0;
    }
  }
  p.channel[1] = std::move(c1);
  validate_protocol(p);
  return p;
}

/// Post-control statistics: the record-conditioned distributions
/// q(x_c | y), their mixture p(x_c), and the exact support pattern.
struct ControlledDistributions {
  std::array<std::vector<double>, 2> conditional;  // q(. | y)
  std::vector<double> marginal;                    // p(x_c)
  std::array<std::vector<bool>, 2> support;        // q(x_c | y) > 0
  std::array<double, 2> record_prob{};             // p(y)
  std::array<bool, 2> record_realizable{};

  std::size_t size() const { return marginal.size(); }
};

/// Push the measured state through the control channel:
/// q(x_c | y) = sum_{x_0} C_y(x_c | x_0) p(x_0 | y), p(x_c) = sum_y p(y) q(x_c | y).
/// For composite protocols p(x_0 | y) is extended by the independent battery
/// distribution.
inline ControlledDistributions apply_control(const FeedbackProtocol& protocol,
                                             const MeasurementOutcomeTable& table) {
  validate_protocol(protocol);
  const std::size_t dim = protocol.space.size();
  if (!protocol.composite() && dim != 2)
    throw DimensionError("apply_control: bare protocol must act on the system space");

  ControlledDistributions cd;
  cd.marginal.assign(dim, 0.0);
  for (int y = 0; y < 2; ++y) {
    cd.record_prob[y] = table.marginal_record[y];
    cd.record_realizable[y] = table.record_realizable[y];
    cd.conditional[y].assign(dim, 0.0);
    cd.support[y].assign(dim, false);
    if (!cd.record_realizable[y]) continue;
    for (std::size_t from = 0; from < dim; ++from) {
      const double p_from =
          table.conditional_state[y][protocol.system_of(from)] *
          (protocol.composite() ? protocol.ancilla_init[protocol.phonon_of(from)] : 1.0);
      if (p_from == 0.0) continue;
      const auto& row = protocol.channel[y][from];
      for (std::size_t to = 0; to < dim; ++to)
        if (row[to] > 0.0) cd.conditional[y][to] += p_from * row[to];
    }
    for (std::size_t to = 0; to < dim; ++to) {
      cd.support[y][to] = cd.conditional[y][to] > 0.0;
      cd.marginal[to] += cd.record_prob[y] * cd.conditional[y][to];
    }
  }
  return cd;
}

/// Reduce composite post-control statistics to the bare qubit. For a bare
/// protocol this is the identity.
inline ControlledDistributions reduce_to_system(const FeedbackProtocol& protocol,
                                                const ControlledDistributions& cd) {
  if (!protocol.composite()) return cd;
  ControlledDistributions sys;
  sys.marginal.assign(2, 0.0);
  sys.record_prob = cd.record_prob;
  sys.record_realizable = cd.record_realizable;
  for (int y = 0; y < 2; ++y) {
    sys.conditional[y].assign(2, 0.0);
    sys.support[y].assign(2, false);
  }
  for (std::size_t i = 0; i < cd.size(); ++i) {
    const std::size_t s = protocol.system_of(i);
    sys.marginal[s] += cd.marginal[i];
    for (int y = 0; y < 2; ++y) {
      sys.conditional[y][s] += cd.conditional[y][i];
      if (cd.support[y][i]) sys.support[y][s] = true;
    }
  }
  return sys;
}

}  // namespace demonsim
