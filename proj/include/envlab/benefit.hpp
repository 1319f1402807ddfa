#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "envlab/density.hpp"
#include "envlab/host.hpp"

namespace envlab {

/// Known bounds on the envelope contents, when the host announces them.
struct Bounds {
  std::optional<double> x_l;
  std::optional<double> x_u;

  /// Throws invalid-parameter unless 0 <= x_l < x_u (where present).
  void validate() const;
};

enum class Decision { Switch, Stay, Indifferent };

std::string_view to_string(Decision d);
std::optional<Decision> parse_decision(std::string_view name);

/// E(B | Y = y) with its numerator (the exchange condition e(y)) and
/// denominator. At support gaps the denominator is zero: attainable is then
/// false, expected_benefit is 0 and the decision is Indifferent.
struct BenefitReport {
  double y = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  double expected_benefit = 0.0;
  Decision decision = Decision::Indifferent;
  bool attainable = false;
};

/// Absolute indifference band for amounts up to 1; for larger y the band is
/// kIndifferenceTolerance * y, since benefits scale with the amount observed.
inline constexpr double kIndifferenceTolerance = 1e-12;
inline constexpr double kDefaultRootTolerance = 1e-9;
inline constexpr std::size_t kDefaultScanCells = 4096;

Decision decide(double expected_benefit, double y);

BenefitReport expected_benefit_discrete(const DiscreteDensity& density, Process process,
                                        const DyadicRational& y);
BenefitReport expected_benefit_continuous(const ContinuousDensity& density, Process process,
                                          double y);
/// Dispatches on the density kind; for discrete priors y is taken exactly.
BenefitReport expected_benefit(const Density& density, Process process, double y);

/// e(y): the numerator of the matching expected-benefit formula.
double exchange_condition(const Density& density, Process process, double y);

struct ExchangeRoot {
  double y = 0.0;
  double residual = 0.0;  ///< |e(y)| at the returned point
};

/// Sign-change roots of e on [lo, hi]: uniform scan over `cells` cells, then
/// bisection of each bracketing cell down to width <= tol. Roots closer
/// together than one cell can be missed.
std::vector<ExchangeRoot> find_exchange_roots(const Density& density, Process process, double lo,
                                              double hi, double tol = kDefaultRootTolerance,
                                              std::size_t cells = kDefaultScanCells);

struct StrategyResult {
  Decision decision = Decision::Indifferent;
  double value = 0.0;
};

/// Bounded indicator strategy: switch (value y) below 2·x_l, stay (value
/// -y/2) above x_u/2, otherwise the expected-benefit formula. The transition
/// points themselves use the formula.
StrategyResult strategy(const Density& density, Process process, const Bounds& bounds, double y);

}  // namespace envlab
