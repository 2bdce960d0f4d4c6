#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "demonsim/core.hpp"
#include "demonsim/errors.hpp"
#include "demonsim/protocols.hpp"

namespace demonsim {

/// Selector for the three dissipative entities of the decomposition
/// sigma_cond = sigma_uncond + sigma_info.
enum class Sigma { conditional, unconditional, informational };

inline const char* sigma_name(Sigma s) {
  switch (s) {
    case Sigma::conditional: return "sigma_cond";
    case Sigma::unconditional: return "sigma_uncond";
    case Sigma::informational: return "sigma_info";
  }
  return "?";
}

/// Per-outcome thermodynamic bookkeeping. All entropies in nats, work and
/// heat in units of the energy gap E.
struct EntropyLedger {
  double sigma_cond = 0.0;    // ln q(xc|y) / p_eq(xc)
  double sigma_uncond = 0.0;  // ln p(xc)  / p_eq(xc)
  double sigma_info = 0.0;    // ln q(xc|y) / p(xc)
  double delta_s_cond = 0.0;  // ln q(xc|y) - ln p_eq(x0)
  double delta_s_coarse = 0.0;// ln p(xc)   - ln p_eq(x0)
  double work = 0.0;          // E(x0) - E(xc)
  double heat = 0.0;          // thermalization heat E(xt) - E(xc)

  double sigma(Sigma which) const {
    switch (which) {
      case Sigma::conditional: return sigma_cond;
      case Sigma::unconditional: return sigma_uncond;
      case Sigma::informational: return sigma_info;
    }
    return 0.0;
  }
};

namespace detail {

inline void require_realizable(int y, std::size_t xc, const ControlledDistributions& cd,
                               const Distribution& p_eq) {
  if (y < 0 || y > 1 || xc >= cd.size() || cd.size() != p_eq.size())
    throw DimensionError("entropy accounting: index outside the controlled space");
  if (!cd.record_realizable[y] || cd.conditional[y][xc] == 0.0)
    throw ZeroProbabilityError(
        "zero-probability outcome: q(x_c | y) = 0 for record y = " + std::to_string(y));
  if (p_eq[xc] == 0.0)
    throw SupportError("entropy accounting: p_eq(x_c) = 0 on a realizable outcome");
}

}  // namespace detail

/// The three dissipative entities of one realized outcome (y, x_c):
///   sigma_cond = ln q(xc|y)/p_eq(xc),  sigma_uncond = ln p(xc)/p_eq(xc),
///   sigma_info = ln q(xc|y)/p(xc).
/// Outcomes the control can never produce are rejected with a distinct
/// zero-probability signal.
inline std::array<double, 3> entropy_productions(int y, std::size_t xc,
                                                 const ControlledDistributions& cd,
                                                 const Distribution& p_eq) {
  detail::require_realizable(y, xc, cd, p_eq);
  const double q = cd.conditional[y][xc];
  const double p = cd.marginal[xc];
  const double eq = p_eq[xc];
  return {std::log(q / eq), std::log(p / eq), std::log(q / p)};
}

/// Stochastic entropy changes of one realized trajectory (x_0, y, x_c):
///   dS_cond   = ln q(xc|y) - ln p_eq(x0)
///   dS_coarse = ln p(xc)   - ln p_eq(x0)
/// The sign convention makes T<sigma_cond> = dF - W_out an exact identity.
inline std::pair<double, double> stochastic_entropy_changes(
    std::size_t x0, int y, std::size_t xc, const ControlledDistributions& cd,
    const Distribution& p_eq) {
  detail::require_realizable(y, xc, cd, p_eq);
  if (x0 >= p_eq.size() || p_eq[x0] == 0.0)
    throw ZeroProbabilityError("zero-probability outcome: p_eq(x_0) = 0");
  const double ln_p0 = std::log(p_eq[x0]);
  return {std::log(cd.conditional[y][xc]) - ln_p0, std::log(cd.marginal[xc]) - ln_p0};
}

/// One exponential-average check <e^{-sigma}> together with the reference
/// mass sitting on outcomes the forward process can never reach. By
/// construction value + support_deficit = 1 for each of the three sigmas.
struct FtResult {
  double value = 0.0;
  double support_deficit = 0.0;
  Sigma which = Sigma::conditional;
};

/// Demon efficacies. Undefined (all NaN) unless 0 < dF < infinity.
struct Efficacies {
  double eta_out = std::numeric_limits<double>::quiet_NaN();
  double eta_ext = std::numeric_limits<double>::quiet_NaN();
  double eta_max = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;
};

enum class CoarseVariant { marginal, cycle_improper, partial_average };

inline const char* coarse_variant_name(CoarseVariant v) {
  switch (v) {
    case CoarseVariant::marginal: return "marginal";
    case CoarseVariant::cycle_improper: return "cycle-improper";
    case CoarseVariant::partial_average: return "partial-average";
  }
  return "?";
}

/// Second-law check under one coarse-graining convention.
///   marginal:        dF_v = T<dS_coarse>, margin = dF_v - W_out  (never < 0)
///   cycle-improper:  dF_v = 0 (closed cycle), margin = <-beta w> = -beta W_out
///   partial-average: dS averaged over p(y) at fixed (x0, xc); -inf cells are
///                    absolute violations
struct CoarseCheck {
  CoarseVariant variant = CoarseVariant::cycle_improper;
  double delta_f_variant = 0.0;
  double w_out = 0.0;
  double margin = 0.0;
  bool violated = false;
  bool absolute = false;  // a -inf cell was encountered
};

/// Ensemble work/information budget of one sweep point.
struct WorkReport {
  double w_out = 0.0;             // <w>, extracted work
  double w_ext = 0.0;             // kappa * w_out, work stored in the battery
  double kappa = 1.0;             // storage efficiency
  double delta_f = 0.0;           // T <dS_cond>
  double delta_f_marginal = 0.0;  // T <dS_coarse>
  double delta_f_coarse = 0.0;    // selected coarse variant's dF
  double mean_sigma_cond = 0.0;
  double mean_sigma_uncond = 0.0;
  double mean_sigma_info = 0.0;
  double mean_delta_s_cond = 0.0;
  double mean_delta_s_coarse = 0.0;
  double mean_heat = 0.0;         // <Q_{X|Y}>, equals w_out in expectation
  FtResult ft_cond, ft_uncond, ft_info;
  Efficacies eff;
  CoarseCheck coarse;
  // Internal identity residuals, NaN when T is infinite:
  //   |T<sigma_cond> - (dF - W_out)|, |T<sigma_uncond> - (dF_marginal - W_out)|,
  //   |W_out - <Q>|.
  double identity_residual_cond = 0.0;
  double identity_residual_uncond = 0.0;
  double heat_residual = 0.0;
};

/// eta_out = W_out/dF, eta_ext = W_ext/dF, eta_max = 1 - T<sigma_info>/dF.
/// The ordering eta_ext <= eta_out <= eta_max <= 1 is implied by the tighter
/// work bound whenever dF is positive and finite.
inline Efficacies efficacies(const WorkReport& report, double temperature) {
  Efficacies e;
  if (!(report.delta_f > 0.0) || !std::isfinite(report.delta_f)) return e;
  e.eta_out = report.w_out / report.delta_f;
  e.eta_ext = report.w_ext / report.delta_f;
  e.eta_max = 1.0 - temperature * report.mean_sigma_info / report.delta_f;
  e.defined = true;
  return e;
}

}  // namespace demonsim
