#pragma once

#include <cstdint>
#include <optional>

#include "envlab/benefit.hpp"
#include "envlab/density.hpp"
#include "envlab/host.hpp"
#include "envlab/rng.hpp"

namespace envlab {

/// Running (count, sum, sum of squares) of benefits. merge() is associative,
/// so shards can be combined in any grouping.
struct BenefitAccumulator {
  std::uint64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double b) {
    ++count;
    sum += b;
    sum_sq += b * b;
  }
  void merge(const BenefitAccumulator& other) {
    count += other.count;
    sum += other.sum;
    sum_sq += other.sum_sq;
  }
  double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
  /// Standard error of the mean (sample variance with n - 1); 0 below two samples.
  double std_error() const;
};

struct McEstimate {
  double y_center = 0.0;
  double epsilon = 0.0;
  std::uint64_t n_total = 0;
  std::uint64_t n_conditioned = 0;
  double mean_benefit = 0.0;
  double std_error = 0.0;
  /// False for discrete priors, which condition on Y == y exactly.
  bool windowed = true;
};

/// Builds the event set reaching Y = y literally from host.allocate and
/// host.event_probability and returns its probability-weighted mean benefit.
/// Shares no code with the closed forms in benefit.
BenefitReport enumerate_conditional_benefit(const DiscreteDensity& density, Process process,
                                            const DyadicRational& y);

/// Seeded Monte-Carlo estimate of E(B | y - eps < Y <= y + eps) (continuous)
/// or E(B | Y = y) (discrete; eps is recorded but unused). The n plays are
/// split over `shards` generators seeded derive_seed(seed, shard) and merged
/// in shard order, so the result depends only on (seed, n, shards).
McEstimate mc_conditional_benefit(const Density& density, Process process, double y,
                                  double epsilon, std::uint64_t n, std::uint64_t seed,
                                  unsigned shards = 1);

inline constexpr std::uint64_t kMinConditionedSamples = 10'000;
inline constexpr std::uint64_t kMaxPlays = 100'000'000;

/// Window y/128 unless given; n grows from `initial_n` until at least
/// kMinConditionedSamples plays land in the window or kMaxPlays is reached.
McEstimate mc_conditional_benefit_auto(const Density& density, Process process, double y,
                                       std::uint64_t seed,
                                       std::optional<double> epsilon = std::nullopt,
                                       std::uint64_t initial_n = 100'000, unsigned shards = 1);

/// Window bias allowance is kBiasAllowance * epsilon.
inline constexpr double kBiasAllowance = 2.0;

struct Comparison {
  bool pass = false;
  double deviation = 0.0;  ///< |analytic - estimate|
  double band = 0.0;       ///< k_sigma * std_error + bias allowance
};

Comparison compare(const BenefitReport& analytic, const McEstimate& estimate, double k_sigma);

/// Mean per-play advantage of always switching over never switching when y is
/// never looked at: the mean of b over n unconditioned plays.
McEstimate blind_switch_advantage(const Density& density, Process process, std::uint64_t n,
                                  std::uint64_t seed, unsigned shards = 1);

/// Random proper prior on a handful of dyadic points m·2^k, built so that
/// chains x, 2x, 4x occur often. Enumerable and sampleable.
DiscreteDensity random_dyadic_density(Rng& rng);

}  // namespace envlab
