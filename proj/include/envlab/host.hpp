#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "envlab/density.hpp"
#include "envlab/rng.hpp"

namespace envlab {

/// The five content-and-allocation procedures a host may follow.
enum class Process {
  halve_or_double,            ///< fair coin for both priming and allocation
  double_only,                ///< second envelope always doubled
  halve_only,                 ///< second envelope always halved
  allocate_first_then_prime,  ///< agent holds the first envelope; second primed afterwards
  prime_second_then_allocate, ///< agent holds the second envelope
};

inline constexpr std::array<Process, 5> kAllProcesses{
    Process::halve_or_double, Process::double_only, Process::halve_only,
    Process::allocate_first_then_prime, Process::prime_second_then_allocate};

/// Canonical names: halve-or-double, double-only, halve-only, allocate-first,
/// allocate-second.
std::string_view to_string(Process p);
/// Accepts the canonical names, underscores in place of hyphens, and the long
/// forms allocate-first-then-prime / prime-second-then-allocate.
std::optional<Process> parse_process(std::string_view name);

/// ω2 forced by the process (1 double, 0 halve), if any.
std::optional<int> fixed_prime(Process p);
/// ω3 forced by the process (0 first envelope, 1 second), if any.
std::optional<int> fixed_allocation(Process p);

/// One realized outcome {x1; ω2; ω3}.
struct HostEvent {
  double x1 = 0.0;
  int omega2 = 0;  ///< 0 halve, 1 double
  int omega3 = 0;  ///< 0 allocate the first envelope, 1 the second

  friend bool operator==(const HostEvent&, const HostEvent&) = default;
};

struct Play {
  HostEvent event;
  double y = 0.0;  ///< allocated content
  double z = 0.0;  ///< complementary content
  double b = 0.0;  ///< benefit of switching, z - y
};

/// ½ for ω2 = 0, 2 for ω2 = 1.
double g_factor(int omega2);

/// Primes the envelopes (x1, g(ω2)·x1) and hands over envelope ω3. Both
/// b = z - y and b = ½(2ω3 - 1)(1 - 3ω2)·x1 hold exactly.
Play allocate(double x1, int omega2, int omega3);

bool consistent(const HostEvent& event, Process process);

/// P({x1; ω2; ω3}) = P(X1 = x1) times the coin factors the process leaves free.
long double event_probability(const DiscreteDensity& density, const HostEvent& event,
                              Process process);

/// Draws x1, then ω2 (unless fixed), then ω3 (unless fixed), in that order.
Play run_play(const Density& density, Process process, Rng& rng);

/// Initial amounts that can lead to an observed y, ascending.
std::vector<double> candidate_initials(double y, Process process);

}  // namespace envlab
