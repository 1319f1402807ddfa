#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "envlab/density.hpp"

namespace envlab {

using ParamMap = std::map<std::string, double>;

struct CatalogEntry {
  std::string_view name;
  DensityKind kind;
  bool proper;
  std::string_view formula;
  std::string_view params;  // human-readable parameter summary, empty if none
};

/// The eight named priors, in listing order.
std::span<const CatalogEntry> catalog_entries();

/// Builds a named prior. Throws unknown-name or invalid-parameter.
Density catalog_lookup(std::string_view name, const ParamMap& params = {});

inline constexpr int kDefaultRecurrenceMaxIndex = 64;

/// p_n = p_{n-1}/2 + 2^-(2n+1) from p_0 = 1/12, computed exactly and rounded
/// once to long double. Index n is the mass at 2^n.
std::vector<long double> recurrence_masses(int max_index);

/// Exact p_n as a reduced fraction, e.g. "1/6" for n = 1.
std::string recurrence_mass_fraction(int n);

}  // namespace envlab
