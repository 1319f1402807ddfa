#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace envlab {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Enumeration against closed forms on `densities` random dyadic priors for
/// every process, plus the catalog's discrete priors. Tolerance 1e-12.
std::vector<CheckResult> verify_discrete(std::uint64_t seed, int densities = 200);

/// Seeded Monte-Carlo against the continuous closed forms for uniform01,
/// rayleigh_half and broome_continuous at three interior points under every
/// process, with k = 4 sigma. The window starts at y/128 and widens until at
/// least 10^4 plays land in it.
std::vector<CheckResult> verify_mc(std::uint64_t seed, std::uint64_t plays = 4'000'000,
                                   unsigned shards = 1);

/// Blind play: mean advantage of always switching over never switching is
/// within 4 standard errors of zero.
std::vector<CheckResult> verify_blind(std::uint64_t seed, std::uint64_t plays = 1'000'000);

}  // namespace envlab
