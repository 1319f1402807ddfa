#include "envlab/benefit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "envlab/error.hpp"

namespace envlab {

namespace {

void check_observation(double y) {
  if (!(y > 0.0) || !std::isfinite(y)) {
    throw Error(ErrorCode::invalid_parameter, "observation y must be positive and finite");
  }
}

template <typename Real>
BenefitReport make_report(double y, Real numerator, Real denominator) {
  BenefitReport report;
  report.y = y;
  report.numerator = static_cast<double>(numerator);
  report.denominator = static_cast<double>(denominator);
  report.attainable = denominator > 0;
  if (report.attainable) {
    report.expected_benefit = static_cast<double>(numerator / denominator);
    report.decision = decide(report.expected_benefit, y);
  }
  return report;
}

}  // namespace

void Bounds::validate() const {
  if (x_l && (!(*x_l >= 0.0) || !std::isfinite(*x_l))) {
    throw Error(ErrorCode::invalid_parameter, "lower bound must be finite and nonnegative");
  }
  if (x_u && (!(*x_u > 0.0) || std::isnan(*x_u))) {
    throw Error(ErrorCode::invalid_parameter, "upper bound must be positive");
  }
  if (x_l && x_u && !(*x_l < *x_u)) {
    throw Error(ErrorCode::invalid_parameter, "lower bound must be below upper bound");
  }
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Switch: return "Switch";
    case Decision::Stay: return "Stay";
    case Decision::Indifferent: return "Indifferent";
  }
  return "Indifferent";
}

std::optional<Decision> parse_decision(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "switch") return Decision::Switch;
  if (key == "stay") return Decision::Stay;
  if (key == "indifferent") return Decision::Indifferent;
  return std::nullopt;
}

Decision decide(double expected_benefit, double y) {
  const double band = kIndifferenceTolerance * std::max(1.0, std::abs(y));
  if (expected_benefit > band) return Decision::Switch;
  if (expected_benefit < -band) return Decision::Stay;
  return Decision::Indifferent;
}

BenefitReport expected_benefit_discrete(const DiscreteDensity& density, Process process,
                                        const DyadicRational& y) {
  if (!y.is_positive()) throw Error(ErrorCode::invalid_parameter, "observation y must be positive");
  const long double amount = y.to_long_double();
  const double y_value = y.to_double();
  if (process == Process::allocate_first_then_prime) {
    return make_report(y_value, amount / 4, 1.0L);
  }

  const long double p_half = density.mass(y.halved());
  const long double p_same = density.mass(y);
  const long double p_double = density.mass(y.doubled());
  const long double half = amount / 2;

  switch (process) {
    case Process::double_only:
      return make_report(y_value, -half * p_half + amount * p_same, p_half + p_same);
    case Process::halve_only:
      return make_report(y_value, -half * p_same + amount * p_double, p_same + p_double);
    case Process::halve_or_double:
      return make_report(y_value, -half * p_half + half * p_same + amount * p_double,
                         p_half + 2 * p_same + p_double);
    case Process::prime_second_then_allocate:
      return make_report(y_value, -half * p_half + amount * p_double, p_half + p_double);
    case Process::allocate_first_then_prime:
      break;
  }
  return make_report(y_value, 0.0L, 0.0L);
}

BenefitReport expected_benefit_continuous(const ContinuousDensity& density, Process process,
                                          double y) {
  check_observation(y);
  if (process == Process::allocate_first_then_prime) return make_report(y, y / 4, 1.0);

  const double f_half = density.pdf(y / 2);
  const double f_same = density.pdf(y);
  const double f_double = density.pdf(2 * y);

  switch (process) {
    case Process::double_only:
      return make_report(y, -(y / 2) * f_half + 2 * y * f_same, f_half + 2 * f_same);
    case Process::halve_only:
      return make_report(y, -y * f_same + 4 * y * f_double, 2 * f_same + 4 * f_double);
    case Process::halve_or_double:
      return make_report(y, -(y / 2) * f_half + y * f_same + 4 * y * f_double,
                         f_half + 4 * f_same + 4 * f_double);
    case Process::prime_second_then_allocate:
      return make_report(y, -(y / 2) * f_half + 4 * y * f_double, f_half + 4 * f_double);
    case Process::allocate_first_then_prime:
      break;
  }
  return make_report(y, 0.0, 0.0);
}

BenefitReport expected_benefit(const Density& density, Process process, double y) {
  check_observation(y);
  if (density.is_discrete()) {
    return expected_benefit_discrete(density.discrete(), process, DyadicRational::from_double(y));
  }
  return expected_benefit_continuous(density.continuous(), process, y);
}

double exchange_condition(const Density& density, Process process, double y) {
  return expected_benefit(density, process, y).numerator;
}

std::vector<ExchangeRoot> find_exchange_roots(const Density& density, Process process, double lo,
                                              double hi, double tol, std::size_t cells) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::invalid_interval, "need 0 < lo < hi < infinity");
  }
  if (!(tol > 0.0) || cells == 0) {
    throw Error(ErrorCode::invalid_parameter, "tolerance and cell count must be positive");
  }
  const auto e = [&](double y) { return exchange_condition(density, process, y); };
  const auto grid = [&](std::size_t i) {
    return i == cells ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
  };

  std::vector<ExchangeRoot> roots;
  double left = grid(0);
  double e_left = e(left);
  if (e_left == 0.0) roots.push_back({left, 0.0});
  for (std::size_t i = 1; i <= cells; ++i) {
    const double right = grid(i);
    const double e_right = e(right);
    if (e_right == 0.0) {
      roots.push_back({right, 0.0});
    } else if ((e_left < 0.0 && e_right > 0.0) || (e_left > 0.0 && e_right < 0.0)) {
      double a = left;
      double b = right;
      double e_a = e_left;
      while (b - a > tol) {
        const double mid = a + (b - a) / 2;
        if (mid <= a || mid >= b) break;
        const double e_mid = e(mid);
        if (e_mid == 0.0) {
          a = b = mid;
          break;
        }
        if ((e_mid < 0.0) == (e_a < 0.0)) {
          a = mid;
          e_a = e_mid;
        } else {
          b = mid;
        }
      }
      const double root = a + (b - a) / 2;
      roots.push_back({root, std::abs(e(root))});
    }
    left = right;
    e_left = e_right;
  }
  return roots;
}

StrategyResult strategy(const Density& density, Process process, const Bounds& bounds, double y) {
  check_observation(y);
  bounds.validate();
  if ((bounds.x_l && y < *bounds.x_l) || (bounds.x_u && y > *bounds.x_u)) {
    throw Error(ErrorCode::observation_outside_bounds,
                "observation " + std::to_string(y) + " lies outside the announced bounds");
  }
  if (bounds.x_l && y < 2 * *bounds.x_l) return {Decision::Switch, y};
  if (bounds.x_u && y > *bounds.x_u / 2) return {Decision::Stay, -y / 2};
  const BenefitReport report = expected_benefit(density, process, y);
  if (!report.attainable) return {Decision::Indifferent, 0.0};
  return {report.decision, report.expected_benefit};
}

}  // namespace envlab
