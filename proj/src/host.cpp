#include "envlab/host.hpp"

#include <cmath>
#include <string>

#include "envlab/error.hpp"

namespace envlab {

namespace {

void check_bit(int bit, const char* label) {
  if (bit != 0 && bit != 1) {
    throw Error(ErrorCode::invalid_parameter, std::string(label) + " must be 0 or 1");
  }
}

}  // namespace

std::string_view to_string(Process p) {
  switch (p) {
    case Process::halve_or_double: return "halve-or-double";
    case Process::double_only: return "double-only";
    case Process::halve_only: return "halve-only";
    case Process::allocate_first_then_prime: return "allocate-first";
    case Process::prime_second_then_allocate: return "allocate-second";
  }
  return "unknown";
}

std::optional<Process> parse_process(std::string_view name) {
  std::string key(name);
  for (auto& c : key) {
    if (c == '_') c = '-';
  }
  for (Process p : kAllProcesses) {
    if (key == to_string(p)) return p;
  }
  if (key == "allocate-first-then-prime") return Process::allocate_first_then_prime;
  if (key == "prime-second-then-allocate") return Process::prime_second_then_allocate;
  return std::nullopt;
}

std::optional<int> fixed_prime(Process p) {
  if (p == Process::double_only) return 1;
  if (p == Process::halve_only) return 0;
  return std::nullopt;
}

std::optional<int> fixed_allocation(Process p) {
  if (p == Process::allocate_first_then_prime) return 0;
  if (p == Process::prime_second_then_allocate) return 1;
  return std::nullopt;
}

double g_factor(int omega2) {
  check_bit(omega2, "omega2");
  return 0.5 * (1 - omega2) + 2.0 * omega2;
}

Play allocate(double x1, int omega2, int omega3) {
  if (!(x1 > 0.0) || !std::isfinite(x1)) {
    throw Error(ErrorCode::nonpositive_initial_amount, "initial amount must be positive and finite");
  }
  check_bit(omega2, "omega2");
  check_bit(omega3, "omega3");
  const double second = g_factor(omega2) * x1;
  Play play;
  play.event = {x1, omega2, omega3};
  play.y = omega3 == 0 ? x1 : second;
  play.z = omega3 == 0 ? second : x1;
  play.b = 0.5 * (2 * omega3 - 1) * (1 - 3 * omega2) * x1;
  return play;
}

bool consistent(const HostEvent& event, Process process) {
  if (event.omega2 != 0 && event.omega2 != 1) return false;
  if (event.omega3 != 0 && event.omega3 != 1) return false;
  if (const auto prime = fixed_prime(process); prime && *prime != event.omega2) return false;
  if (const auto alloc = fixed_allocation(process); alloc && *alloc != event.omega3) return false;
  return true;
}

long double event_probability(const DiscreteDensity& density, const HostEvent& event,
                              Process process) {
  if (!consistent(event, process)) {
    throw Error(ErrorCode::event_inconsistent_with_process,
                "event does not occur under " + std::string(to_string(process)));
  }
  // Each coin the process leaves free contributes a factor of one half.
  const long double coins = process == Process::halve_or_double ? 0.25L : 0.5L;
  if (!(event.x1 > 0.0)) return 0.0L;
  return coins * density.mass(DyadicRational::from_double(event.x1));
}

Play run_play(const Density& density, Process process, Rng& rng) {
  const double x1 = sample(density, rng);
  const auto prime = fixed_prime(process);
  const int omega2 = prime ? *prime : rng.coin();
  const auto alloc = fixed_allocation(process);
  const int omega3 = alloc ? *alloc : rng.coin();
  return allocate(x1, omega2, omega3);
}

std::vector<double> candidate_initials(double y, Process process) {
  if (!(y > 0.0)) throw Error(ErrorCode::invalid_parameter, "observation must be positive");
  switch (process) {
    case Process::double_only: return {y / 2, y};
    case Process::halve_only: return {y, 2 * y};
    case Process::halve_or_double: return {y / 2, y, 2 * y};
    case Process::allocate_first_then_prime: return {y};
    case Process::prime_second_then_allocate: return {y / 2, 2 * y};
  }
  return {};
}

}  // namespace envlab
