#include "envlab/verify.hpp"

#include <cmath>
#include <sstream>

#include "envlab/benefit.hpp"
#include "envlab/catalog.hpp"
#include "envlab/oracle.hpp"

namespace envlab {

namespace {

constexpr double kExactTolerance = 1e-12;

std::string describe(double a, double b) {
  std::ostringstream os;
  os.precision(17);
  os << a << " vs " << b;
  return os.str();
}

struct Tally {
  int compared = 0;
  int mismatches = 0;
  std::string first_failure;
};

void compare_discrete(const DiscreteDensity& density, Process process, const DyadicRational& y,
                      Tally& tally) {
  const BenefitReport enumerated = enumerate_conditional_benefit(density, process, y);
  if (!enumerated.attainable) return;
  const BenefitReport closed = expected_benefit_discrete(density, process, y);
  ++tally.compared;
  const bool same = closed.attainable &&
                    std::abs(closed.expected_benefit - enumerated.expected_benefit) <= kExactTolerance &&
                    closed.decision == enumerated.decision;
  if (!same) {
    if (tally.mismatches == 0) {
      tally.first_failure = std::string(to_string(process)) + " y=" + y.to_string() + ": " +
                            describe(closed.expected_benefit, enumerated.expected_benefit);
    }
    ++tally.mismatches;
  }
}

CheckResult finish(std::string name, const Tally& tally) {
  CheckResult r{std::move(name), tally.mismatches == 0 && tally.compared > 0, ""};
  r.detail = std::to_string(tally.compared) + " probes";
  if (tally.mismatches > 0) {
    r.detail += ", " + std::to_string(tally.mismatches) + " mismatches; first " + tally.first_failure;
  }
  return r;
}

}  // namespace

std::vector<CheckResult> verify_discrete(std::uint64_t seed, int densities) {
  std::vector<CheckResult> results;

  Tally random_tally;
  Rng rng(seed);
  for (int i = 0; i < densities; ++i) {
    const DiscreteDensity density = random_dyadic_density(rng);
    const auto points = density.enumerate(64).value_or(std::vector<PointMass>{});
    for (Process process : kAllProcesses) {
      for (const auto& p : points) {
        for (const auto& y : {p.point.halved(), p.point, p.point.doubled()}) {
          compare_discrete(density, process, y, random_tally);
        }
      }
    }
  }
  results.push_back(finish("enumeration == closed form, " + std::to_string(densities) +
                               " random dyadic priors x 5 processes",
                           random_tally));

  // Recurrence masses are near 2^-n * 7/12, so every formula cancels about n
  // bits of the long double masses; past 2^21 the two paths drift apart by
  // more than 1e-12 from rounding alone.
  constexpr std::pair<const char*, int> catalog_ranges[] = {{"broome_discrete", 30},
                                                            {"recurrence", 21}};
  for (const auto& [name, last] : catalog_ranges) {
    const Density density = catalog_lookup(name);
    Tally tally;
    for (Process process : kAllProcesses) {
      for (int n = 0; n <= last; ++n) {
        compare_discrete(density.discrete(), process, DyadicRational::power_of_two(n), tally);
      }
    }
    results.push_back(finish(std::string("enumeration == closed form, ") + name, tally));
  }
  return results;
}

std::vector<CheckResult> verify_mc(std::uint64_t seed, std::uint64_t plays, unsigned shards) {
  struct Probe {
    const char* density;
    double points[3];
  };
  constexpr Probe probes[] = {
      {"uniform01", {0.1, 0.3, 0.4}},
      {"rayleigh_half", {0.3, 0.6, 0.9}},
      {"broome_continuous", {0.5, 1.0, 2.0}},
  };

  std::vector<CheckResult> results;
  std::uint64_t run = 0;
  for (const auto& probe : probes) {
    const Density density = catalog_lookup(probe.density);
    for (Process process : kAllProcesses) {
      for (double y : probe.points) {
        const BenefitReport analytic = expected_benefit(density, process, y);
        double epsilon = y / 128;
        McEstimate estimate;
        for (int widen = 0;; ++widen) {
          estimate = mc_conditional_benefit(density, process, y, epsilon, plays,
                                            derive_seed(seed, run), shards);
          if (estimate.n_conditioned >= kMinConditionedSamples || widen == 4) break;
          epsilon *= 2;
        }
        ++run;
        const Comparison c = compare(analytic, estimate, 4.0);
        std::ostringstream detail;
        detail.precision(6);
        detail << "analytic " << analytic.expected_benefit << ", mc " << estimate.mean_benefit
               << " +- " << estimate.std_error << " (n_cond " << estimate.n_conditioned
               << ", eps " << epsilon << ")";
        const bool enough = estimate.n_conditioned >= kMinConditionedSamples;
        if (!enough) detail << ", too few conditioned plays";
        std::ostringstream name;
        name << "mc " << probe.density << ' ' << to_string(process) << " y=" << y;
        results.push_back({name.str(), c.pass && enough, detail.str()});
      }
    }
  }
  return results;
}

std::vector<CheckResult> verify_blind(std::uint64_t seed, std::uint64_t plays) {
  std::vector<CheckResult> results;
  for (const char* name : {"uniform01", "rayleigh_half"}) {
    const McEstimate e =
        blind_switch_advantage(catalog_lookup(name), Process::halve_or_double, plays, seed);
    std::ostringstream detail;
    detail.precision(6);
    detail << "mean advantage " << e.mean_benefit << " +- " << e.std_error;
    results.push_back({std::string("blind always-switch vs never-switch, ") + name,
                       std::abs(e.mean_benefit) <= 4.0 * e.std_error, detail.str()});
  }
  return results;
}

}  // namespace envlab
