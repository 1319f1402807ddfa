#include "envlab/catalog.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include <boost/multiprecision/cpp_int.hpp>

#include "envlab/error.hpp"

namespace envlab {

namespace {

using boost::multiprecision::cpp_rational;

constexpr std::array<CatalogEntry, 8> kEntries{{
    {"uniform01", DensityKind::continuous, true, "f(x) = 1 on (0, 1]", ""},
    {"rayleigh_half", DensityKind::continuous, true, "f(x) = 8x exp(-4x^2), x > 0",
     ""},
    {"broome_discrete", DensityKind::discrete, true, "P(X = 2^n) = 2^n / 3^(n+1), n >= 0", ""},
    {"broome_continuous", DensityKind::continuous, true, "f(x) = 1 / (x + 1)^2, x > 0", ""},
    {"extreme_values", DensityKind::continuous, true,
     "f(x) = 10^(-2k-1) on [10^k, 10^(k+1)), k >= 0; 0 below 1", ""},
    {"recurrence", DensityKind::discrete, false,
     "p_n = p_(n-1)/2 + 2^-(2n+1), p_0 = 1/12, at 2^n", "max_index (integer >= 1, default 64)"},
    {"improper_exp", DensityKind::continuous, false, "f(x) = 2^(-4x^2), x > 0 (unnormalised)",
     ""},
    {"power_law", DensityKind::continuous, false, "f(x) = x^-n, x > 0 (improper)",
     "n (integer >= 1, required)"},
}};

void check_params(std::string_view name, const ParamMap& params,
                  std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorCode::invalid_parameter,
                  "density '" + std::string(name) + "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::invalid_parameter, "parameter '" + key + "' is not finite");
    }
  }
}

int integer_param(const ParamMap& params, const std::string& key, int fallback, int minimum,
                  bool required) {
  const auto it = params.find(key);
  if (it == params.end()) {
    if (required) throw Error(ErrorCode::invalid_parameter, "missing parameter '" + key + "'");
    return fallback;
  }
  const double value = it->second;
  if (value != std::floor(value) || value < minimum || value > 1e6) {
    throw Error(ErrorCode::invalid_parameter,
                "parameter '" + key + "' must be an integer >= " + std::to_string(minimum));
  }
  return static_cast<int>(value);
}

// Support test shared by the 2^n (n >= 0) grids.
bool nonnegative_power_of_two(const DyadicRational& x, std::int32_t* n) {
  return x.is_power_of_two(n) && *n >= 0;
}

Density make_uniform01() {
  return ContinuousDensity(
      "uniform01", [](double x) { return x <= 1.0 ? 1.0 : 0.0; }, Interval{0.0, 1.0}, true,
      [](Rng& rng) { return rng.uniform_open_closed(); });
}

Density make_rayleigh_half() {
  // Weibull with scale 1/2 and shape 2.
  return ContinuousDensity(
      "rayleigh_half", [](double x) { return 8.0 * x * std::exp(-4.0 * x * x); }, Interval{}, true,
      [](Rng& rng) { return 0.5 * std::sqrt(-std::log(rng.uniform_open())); });
}

Density make_broome_discrete() {
  auto mass = [](const DyadicRational& x) {
    std::int32_t n = 0;
    x.is_power_of_two(&n);
    return std::ldexp(1.0L, n) / std::pow(3.0L, static_cast<long double>(n) + 1.0L);
  };
  auto support = [](const DyadicRational& x) {
    std::int32_t n = 0;
    return nonnegative_power_of_two(x, &n);
  };
  auto enumerator = [mass](std::size_t limit) {
    std::vector<PointMass> points;
    for (std::size_t n = 0; n < limit && n < 10000; ++n) {
      const auto x = DyadicRational::power_of_two(static_cast<std::int32_t>(n));
      points.push_back({x, mass(x)});
    }
    return points;
  };
  // Geometric number of doublings with success probability 1/3.
  auto sampler = [](Rng& rng) {
    const double n = std::floor(std::log(rng.uniform_open()) / std::log(2.0 / 3.0));
    return DyadicRational::power_of_two(static_cast<std::int32_t>(std::min(n, 1000.0)));
  };
  return DiscreteDensity("broome_discrete", mass, support, true, enumerator, sampler);
}

Density make_broome_continuous() {
  return ContinuousDensity(
      "broome_continuous", [](double x) { return 1.0 / ((x + 1.0) * (x + 1.0)); }, Interval{},
      true, [](Rng& rng) {
        const double u = rng.uniform_open();
        return u / (1.0 - u);
      });
}

// Decade index k with 10^k <= x < 10^(k+1), for x >= 1.
int decade(double x) {
  int k = static_cast<int>(std::floor(std::log10(x)));
  while (k > 0 && x < std::pow(10.0, k)) --k;
  while (x >= std::pow(10.0, k + 1)) ++k;
  return k;
}

Density make_extreme_values() {
  auto pdf = [](double x) {
    if (x < 1.0) return 0.0;
    return std::pow(10.0, -(2 * decade(x) + 1));
  };
  // Decade k carries mass 9 * 10^k * 10^(-2k-1) = 0.9 * 10^-k.
  auto sampler = [](Rng& rng) {
    const double k = std::floor(std::log(rng.uniform_open()) / std::log(0.1));
    const double low = std::pow(10.0, k);
    return low + 9.0 * low * rng.uniform_closed_open();
  };
  return ContinuousDensity("extreme_values", pdf, Interval{1.0, HUGE_VAL}, true, sampler);
}

std::vector<cpp_rational> recurrence_exact(int max_index) {
  std::vector<cpp_rational> p;
  p.reserve(static_cast<std::size_t>(max_index) + 1);
  p.emplace_back(1, 12);
  for (int n = 1; n <= max_index; ++n) {
    const cpp_rational tail(1, boost::multiprecision::cpp_int(1) << (2 * n + 1));
    p.push_back(p.back() / 2 + tail);
  }
  return p;
}

Density make_recurrence(int max_index) {
  auto masses = std::make_shared<const std::vector<long double>>(recurrence_masses(max_index));
  auto support = [max_index](const DyadicRational& x) {
    std::int32_t n = 0;
    return nonnegative_power_of_two(x, &n) && n <= max_index;
  };
  auto mass = [masses](const DyadicRational& x) {
    std::int32_t n = 0;
    x.is_power_of_two(&n);
    return (*masses)[static_cast<std::size_t>(n)];
  };
  auto enumerator = [masses](std::size_t limit) {
    std::vector<PointMass> points;
    for (std::size_t n = 0; n < masses->size() && n < limit; ++n) {
      points.push_back({DyadicRational::power_of_two(static_cast<std::int32_t>(n)), (*masses)[n]});
    }
    return points;
  };
  // The masses total 1/2 rather than 1, so the prior is analytic-only.
  return DiscreteDensity("recurrence", mass, support, false, enumerator);
}

Density make_improper_exp() {
  return ContinuousDensity(
      "improper_exp", [](double x) { return std::exp2(-4.0 * x * x); }, Interval{}, false);
}

Density make_power_law(int n) {
  return ContinuousDensity(
      "power_law", [n](double x) { return std::pow(x, -n); }, Interval{}, false);
}

}  // namespace

std::span<const CatalogEntry> catalog_entries() { return kEntries; }

std::vector<long double> recurrence_masses(int max_index) {
  if (max_index < 0) throw Error(ErrorCode::invalid_parameter, "max_index must be >= 0");
  std::vector<long double> out;
  for (const auto& p : recurrence_exact(max_index)) out.push_back(p.convert_to<long double>());
  return out;
}

std::string recurrence_mass_fraction(int n) {
  if (n < 0) throw Error(ErrorCode::invalid_parameter, "index must be >= 0");
  return recurrence_exact(n).back().str();
}

Density catalog_lookup(std::string_view name, const ParamMap& params) {
  if (name == "uniform01") {
    check_params(name, params, {});
    return make_uniform01();
  }
  if (name == "rayleigh_half") {
    check_params(name, params, {});
    return make_rayleigh_half();
  }
  if (name == "broome_discrete") {
    check_params(name, params, {});
    return make_broome_discrete();
  }
  if (name == "broome_continuous") {
    check_params(name, params, {});
    return make_broome_continuous();
  }
  if (name == "extreme_values") {
    check_params(name, params, {});
    return make_extreme_values();
  }
  if (name == "recurrence") {
    check_params(name, params, {"max_index"});
    return make_recurrence(integer_param(params, "max_index", kDefaultRecurrenceMaxIndex, 1, false));
  }
  if (name == "improper_exp") {
    check_params(name, params, {});
    return make_improper_exp();
  }
  if (name == "power_law") {
    check_params(name, params, {"n"});
    return make_power_law(integer_param(params, "n", 0, 1, true));
  }
  throw Error(ErrorCode::unknown_name, "no catalog density named '" + std::string(name) + "'");
}

}  // namespace envlab
