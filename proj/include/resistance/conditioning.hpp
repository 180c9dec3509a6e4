#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "resistance/model.hpp"

namespace resistance {

/// Position of a path in the downcrossing cycle.
///  Down: inside [sigma_{2 i0}, sigma_{2 i0 + 1}), heading from 0 to -alpha.
///  Up:   inside [sigma_{2 i0 - 1}, sigma_{2 i0}), waiting to return to 0.
///  Free: the conditioning is resolved. On a conditioned path this means every
///        forced downcrossing is done; on an unconditioned path it means the
///        level epsilon has been hit.
enum class Phase { Down, Up, Free };

std::string_view to_string(Phase phase);

struct PhaseState {
  std::size_t i0 = 0;  // completed downcrossings
  Phase phase = Phase::Down;
  double x = 0.0;
  std::optional<std::size_t> n_forced;

  bool operator==(const PhaseState&) const = default;
};

/// Sum_n alpha_n M_t^n and the part of it carried by scenarios that are
/// currently inside a forced downcrossing.
struct MixtureWeight {
  double value = 0.0;
  double down_mass = 0.0;
};

/// M_t^n = P(A_n | F_t) evaluated at `state`. Throws NumericError if a
/// Down/Up state sits at or above epsilon.
double martingale_value(std::size_t n, const PhaseState& state, const ModelParams& params);

/// Extra drift of B inside a forced downcrossing: 2 mu S(x) / (S(eps) - S(x)).
/// Negative for mu > 0; mu + conditioned_drift(x) = -mu coth(mu (eps - x)).
double conditioned_drift(double x, const ModelParams& params);

/// Merton fraction (mu0 - r) / sigma^2.
double classic_strategy(const ModelParams& params);

/// Log-utility optimum when exactly n downcrossings are required.
double optimal_strategy_fixed(std::size_t n, const PhaseState& state, const ModelParams& params);

MixtureWeight mixture_weight(const XiLaw& law, const PhaseState& state, const ModelParams& params);

/// Log-utility optimum when the required count is random with law `law`
/// (weights under P).
double optimal_strategy_random(const XiLaw& law, const PhaseState& state,
                               const ModelParams& params);

inline double project_unit(double pi) { return pi < 0.0 ? 0.0 : (pi > 1.0 ? 1.0 : pi); }

}  // namespace resistance
