#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "demonsim/accounting.hpp"
#include "demonsim/core.hpp"
#include "demonsim/measurement.hpp"
#include "demonsim/protocols.hpp"

namespace demonsim {

/// One cell of the joint outcome space (x_0, y, x_c) over the protocol's
/// operating space. Zero-weight cells are retained with an empty ledger so
/// support analysis works off structure rather than thresholds.
struct OutcomeAtom {
  std::size_t x0 = 0;
  int y = 0;
  std::size_t xc = 0;
  double probability = 0.0;
  std::optional<EntropyLedger> ledger;
};

/// Exact joint enumeration of one sweep point, with the distributions every
/// downstream reduction needs. Atom order is fixed (x0-major, then y, then
/// x_c) and all reductions are compensated, so results are bit-reproducible.
struct Enumeration {
  FeedbackProtocol protocol;
  Distribution p_eq;                 // system equilibrium (recovered from the table)
  StateSpace system_space;           // bare two-level space with the protocol's gap
  ControlledDistributions cd;        // over the protocol space
  ControlledDistributions cd_system; // qubit marginal
  double mean_energy_eq = 0.0;
  std::vector<OutcomeAtom> atoms;
};

inline Enumeration enumerate_outcomes(const FeedbackProtocol& protocol,
                                      const MeasurementOutcomeTable& table) {
  Enumeration en;
  en.protocol = protocol;
  en.p_eq = make_distribution({table.marginal_state[0], table.marginal_state[1]});
  const double gap = protocol.composite()
                         ? protocol.space.energies[protocol.composite_index(1, 0)]
                         : protocol.space.energies[1];
  en.system_space = StateSpace::two_level(gap);
  en.cd = apply_control(protocol, table);
  en.cd_system = reduce_to_system(protocol, en.cd);
  en.mean_energy_eq = mean_energy(en.p_eq, en.system_space);

  const std::size_t dim = protocol.space.size();
  en.atoms.reserve(dim * 2 * dim);
  for (std::size_t x0 = 0; x0 < dim; ++x0) {
    const std::size_t x0s = protocol.system_of(x0);
    for (int y = 0; y < 2; ++y) {
      const double p_init_y = table.joint[x0s][y] *
                              (protocol.composite()
                                   ? protocol.ancilla_init[protocol.phonon_of(x0)]
                                   : 1.0);
      for (std::size_t xc = 0; xc < dim; ++xc) {
        OutcomeAtom atom;
        atom.x0 = x0;
        atom.y = y;
        atom.xc = xc;
        atom.probability = p_init_y * protocol.channel[y][x0][xc];
        if (atom.probability > 0.0) {
          const std::size_t xcs = protocol.system_of(xc);
          EntropyLedger ledger;
          const auto sigmas = entropy_productions(y, xcs, en.cd_system, en.p_eq);
          ledger.sigma_cond = sigmas[0];
          ledger.sigma_uncond = sigmas[1];
          ledger.sigma_info = sigmas[2];
          const auto ds = stochastic_entropy_changes(x0s, y, xcs, en.cd_system, en.p_eq);
          ledger.delta_s_cond = ds.first;
          ledger.delta_s_coarse = ds.second;
          ledger.work = work_of_step(x0, xc, protocol.space);
          // Conditional-mean thermalization heat: x_t is a fresh equilibrium
          // draw, so only <E>_eq - E(x_c) survives the ensemble average.
          ledger.heat = en.mean_energy_eq - en.system_space.energies[xcs];
          atom.ledger = ledger;
        }
        en.atoms.push_back(std::move(atom));
      }
    }
  }
  return en;
}

/// Probability-weighted sum of a per-atom functional over the realized atoms.
inline double exact_expectation(const Enumeration& en,
                                const std::function<double(const OutcomeAtom&)>& f) {
  CompensatedSum acc;
  for (const auto& atom : en.atoms) {
    if (atom.probability == 0.0) continue;
    const double v = f(atom);
    if (!std::isfinite(v))
      throw DivergentObservableError(
          "divergent observable on an atom of weight " +
          std::to_string(atom.probability));
    acc.add(atom.probability * v);
  }
  return acc.value();
}

/// <e^{-sigma}> over the realized atoms plus the reference-measure mass on
/// unreachable outcomes. The reference for sigma_cond and sigma_uncond is the
/// equilibrium distribution; for sigma_info it is the controlled marginal.
inline FtResult ft_exponential_average(const Enumeration& en, Sigma which) {
  FtResult result;
  result.which = which;
  CompensatedSum value;
  for (const auto& atom : en.atoms) {
    if (atom.probability == 0.0) continue;
    value.add(atom.probability * std::exp(-atom.ledger->sigma(which)));
  }
  result.value = value.value();

  const auto& cd = en.cd_system;
  CompensatedSum deficit;
  switch (which) {
    case Sigma::conditional:
      for (int y = 0; y < 2; ++y) {
        if (!cd.record_realizable[y]) continue;
        for (std::size_t xc = 0; xc < cd.size(); ++xc)
          if (!cd.support[y][xc]) deficit.add(cd.record_prob[y] * en.p_eq[xc]);
      }
      break;
    case Sigma::unconditional:
      for (std::size_t xc = 0; xc < cd.size(); ++xc)
        if (cd.marginal[xc] == 0.0) deficit.add(en.p_eq[xc]);
      break;
    case Sigma::informational:
      for (int y = 0; y < 2; ++y) {
        if (!cd.record_realizable[y]) continue;
        for (std::size_t xc = 0; xc < cd.size(); ++xc)
          if (!cd.support[y][xc]) deficit.add(cd.record_prob[y] * cd.marginal[xc]);
      }
      break;
  }
  result.support_deficit = deficit.value();
  return result;
}

}  // namespace demonsim
