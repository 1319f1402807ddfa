#include "envlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <thread>
#include <vector>

#include "envlab/error.hpp"

namespace envlab {

double BenefitAccumulator::std_error() const {
  if (count < 2) return 0.0;
  const double n = static_cast<double>(count);
  const double variance = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1));
  return std::sqrt(variance / n);
}

BenefitReport enumerate_conditional_benefit(const DiscreteDensity& density, Process process,
                                            const DyadicRational& y) {
  if (!y.is_positive()) throw Error(ErrorCode::invalid_parameter, "observation y must be positive");

  long double weighted_benefit = 0.0L;
  long double total_weight = 0.0L;
  for (const DyadicRational& x1 : {y.halved(), y, y.doubled()}) {
    for (int omega2 : {0, 1}) {
      for (int omega3 : {0, 1}) {
        const HostEvent event{x1.to_double(), omega2, omega3};
        if (!consistent(event, process)) continue;
        const Play play = allocate(event.x1, omega2, omega3);
        if (DyadicRational::from_double(play.y) != y) continue;
        const long double weight = event_probability(density, event, process);
        weighted_benefit += static_cast<long double>(play.b) * weight;
        total_weight += weight;
      }
    }
  }

  BenefitReport report;
  report.y = y.to_double();
  report.numerator = static_cast<double>(weighted_benefit);
  report.denominator = static_cast<double>(total_weight);
  report.attainable = total_weight > 0.0L;
  if (report.attainable) {
    report.expected_benefit = static_cast<double>(weighted_benefit / total_weight);
    report.decision = decide(report.expected_benefit, report.y);
  }
  return report;
}

namespace {

void check_sampleable(const Density& density) {
  if (!density.sampleable()) {
    throw Error(ErrorCode::improper_density_unsampleable,
                "density '" + density.name() + "' cannot be simulated");
  }
}

// Runs `n` plays split over `shards` generators; `visit(play, acc)` decides
// what each play contributes.
template <typename Visit>
BenefitAccumulator run_sharded(const Density& density, Process process, std::uint64_t n,
                               std::uint64_t seed, unsigned shards, Visit visit) {
  shards = std::max(1U, shards);
  std::vector<BenefitAccumulator> partial(shards);
  auto work = [&](unsigned shard) {
    const std::uint64_t share = n / shards + (shard < n % shards ? 1 : 0);
    Rng rng(derive_seed(seed, shard));
    BenefitAccumulator acc;
    for (std::uint64_t i = 0; i < share; ++i) visit(run_play(density, process, rng), acc);
    partial[shard] = acc;
  };
  if (shards == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(shards);
    for (unsigned s = 0; s < shards; ++s) threads.emplace_back(work, s);
    for (auto& t : threads) t.join();
  }
  BenefitAccumulator total;
  for (const auto& acc : partial) total.merge(acc);
  return total;
}

}  // namespace

McEstimate mc_conditional_benefit(const Density& density, Process process, double y,
                                  double epsilon, std::uint64_t n, std::uint64_t seed,
                                  unsigned shards) {
  check_sampleable(density);
  if (!(y > 0.0) || n == 0 || (!density.is_discrete() && !(epsilon > 0.0))) {
    throw Error(ErrorCode::invalid_parameter, "need y > 0, epsilon > 0 and n >= 1");
  }
  const bool windowed = !density.is_discrete();
  const double lo = y - epsilon;
  const double hi = y + epsilon;
  const auto acc = run_sharded(density, process, n, seed, shards,
                               [&](const Play& play, BenefitAccumulator& a) {
                                 const bool hit = windowed ? (play.y > lo && play.y <= hi)
                                                           : play.y == y;
                                 if (hit) a.add(play.b);
                               });
  if (acc.count == 0) {
    throw Error(ErrorCode::zero_conditioned_samples, "no play landed on the observation window");
  }
  return {y, epsilon, n, acc.count, acc.mean(), acc.std_error(), windowed};
}

McEstimate mc_conditional_benefit_auto(const Density& density, Process process, double y,
                                       std::uint64_t seed, std::optional<double> epsilon,
                                       std::uint64_t initial_n, unsigned shards) {
  const double eps = epsilon.value_or(y / 128);
  std::uint64_t n = std::clamp<std::uint64_t>(initial_n, 1, kMaxPlays);
  for (;;) {
    std::uint64_t landed = 0;
    try {
      const McEstimate estimate = mc_conditional_benefit(density, process, y, eps, n, seed, shards);
      if (estimate.n_conditioned >= kMinConditionedSamples || n >= kMaxPlays) return estimate;
      landed = estimate.n_conditioned;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::zero_conditioned_samples || n >= kMaxPlays) throw;
    }
    // Aim 20% past the target using the observed hit rate; at least double.
    std::uint64_t next = n * 2;
    if (landed > 0) {
      const double needed =
          1.2 * static_cast<double>(kMinConditionedSamples) * static_cast<double>(n) /
          static_cast<double>(landed);
      next = std::max(next, static_cast<std::uint64_t>(needed));
    } else {
      next = n * 10;
    }
    n = std::min(next, kMaxPlays);
  }
}

Comparison compare(const BenefitReport& analytic, const McEstimate& estimate, double k_sigma) {
  if (!analytic.attainable || estimate.n_conditioned == 0 || !(k_sigma > 0.0)) {
    throw Error(ErrorCode::invalid_parameter,
                "comparison needs an attainable report, conditioned samples and k > 0");
  }
  Comparison c;
  c.deviation = std::abs(analytic.expected_benefit - estimate.mean_benefit);
  c.band = k_sigma * estimate.std_error + (estimate.windowed ? kBiasAllowance * estimate.epsilon : 0.0);
  c.pass = c.deviation <= c.band;
  return c;
}

McEstimate blind_switch_advantage(const Density& density, Process process, std::uint64_t n,
                                  std::uint64_t seed, unsigned shards) {
  check_sampleable(density);
  if (n == 0) throw Error(ErrorCode::invalid_parameter, "need n >= 1");
  // Always-switch banks b, never-switch banks 0: the difference is b itself.
  const auto acc = run_sharded(density, process, n, seed, shards,
                               [](const Play& play, BenefitAccumulator& a) { a.add(play.b); });
  McEstimate estimate;
  estimate.n_total = n;
  estimate.n_conditioned = acc.count;
  estimate.mean_benefit = acc.mean();
  estimate.std_error = acc.std_error();
  estimate.windowed = false;
  return estimate;
}

DiscreteDensity random_dyadic_density(Rng& rng) {
  auto masses = std::make_shared<std::map<DyadicRational, long double>>();
  const auto pick = [&](std::uint64_t bound) { return static_cast<int>(rng.next_u64() % bound); };

  // A doubling chain with occasional gaps, plus a few stray points.
  const std::int64_t odd = 2 * pick(4) + 1;
  const int start = pick(13) - 6;
  const int length = 1 + pick(8);
  for (int k = 0; k < length; ++k) {
    if (k == 0 || rng.uniform_closed_open() < 0.8) {
      (*masses)[DyadicRational(odd, start + k)] = 0.0L;
    }
  }
  const int strays = pick(4);
  for (int i = 0; i < strays; ++i) {
    (*masses)[DyadicRational(2 * pick(4) + 1, pick(17) - 8)] = 0.0L;
  }

  long double total = 0.0L;
  for (auto& [point, mass] : *masses) {
    mass = 0.05L + static_cast<long double>(rng.uniform_closed_open());
    total += mass;
  }
  for (auto& [point, mass] : *masses) mass /= total;

  auto cumulative = std::make_shared<std::vector<std::pair<long double, DyadicRational>>>();
  long double running = 0.0L;
  for (const auto& [point, mass] : *masses) {
    running += mass;
    cumulative->emplace_back(running, point);
  }

  return DiscreteDensity(
      "random_dyadic",
      [masses](const DyadicRational& x) { return masses->at(x); },
      [masses](const DyadicRational& x) { return masses->contains(x); }, true,
      [masses](std::size_t limit) {
        std::vector<PointMass> points;
        for (const auto& [point, mass] : *masses) {
          if (points.size() >= limit) break;
          points.push_back({point, mass});
        }
        return points;
      },
      [cumulative](Rng& r) {
        const long double u = static_cast<long double>(r.uniform_closed_open()) * cumulative->back().first;
        for (const auto& [edge, point] : *cumulative) {
          if (u < edge) return point;
        }
        return cumulative->back().second;
      });
}

}  // namespace envlab
