#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "envlab/dyadic.hpp"
#include "envlab/rng.hpp"

namespace envlab {

enum class DensityKind { discrete, continuous };

std::string_view to_string(DensityKind kind);

struct PointMass {
  DyadicRational point;
  long double mass = 0;
};

/// Prior over dyadic amounts. Masses are carried in long double so the
/// cancellation in benefit numerators keeps well below 1e-12 on deep grids.
class DiscreteDensity {
 public:
  using MassFn = std::function<long double(const DyadicRational&)>;
  using SupportFn = std::function<bool(const DyadicRational&)>;
  /// Returns support points in a fixed order, at most `limit` of them.
  using Enumerator = std::function<std::vector<PointMass>(std::size_t limit)>;
  using Sampler = std::function<DyadicRational(Rng&)>;

  DiscreteDensity(std::string name, MassFn mass, SupportFn support, bool proper,
                  Enumerator enumerator = {}, Sampler sampler = {});

  const std::string& name() const noexcept { return name_; }
  bool proper() const noexcept { return proper_; }
  bool sampleable() const noexcept { return proper_ && static_cast<bool>(sampler_); }
  bool enumerable() const noexcept { return static_cast<bool>(enumerator_); }

  bool in_support(const DyadicRational& x) const;
  /// Zero off the support.
  long double mass(const DyadicRational& x) const;
  std::optional<std::vector<PointMass>> enumerate(std::size_t limit) const;
  DyadicRational sample(Rng& rng) const;

  /// Same support with every mass multiplied by `factor`; never sampleable.
  DiscreteDensity scaled(long double factor) const;

 private:
  std::string name_;
  MassFn mass_;
  SupportFn support_;
  bool proper_;
  Enumerator enumerator_;
  Sampler sampler_;
};

/// Half-open interval (lower, upper]; either bound may be infinite.
struct Interval {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lower && x <= upper; }
};

class ContinuousDensity {
 public:
  using PdfFn = std::function<double(double)>;
  using Sampler = std::function<double(Rng&)>;

  ContinuousDensity(std::string name, PdfFn pdf, Interval support, bool proper,
                    Sampler sampler = {});

  const std::string& name() const noexcept { return name_; }
  bool proper() const noexcept { return proper_; }
  bool sampleable() const noexcept { return proper_ && static_cast<bool>(sampler_); }
  const Interval& support() const noexcept { return support_; }

  /// Zero for nonpositive x and wherever the underlying function vanishes.
  double pdf(double x) const;
  double sample(Rng& rng) const;

  ContinuousDensity scaled(double factor) const;

 private:
  std::string name_;
  PdfFn pdf_;
  Interval support_;
  bool proper_;
  Sampler sampler_;
};

/// A prior f_{X1}: discrete or continuous, proper or improper. Immutable.
class Density {
 public:
  Density(DiscreteDensity d) : impl_(std::move(d)) {}    // NOLINT(google-explicit-constructor)
  Density(ContinuousDensity c) : impl_(std::move(c)) {}  // NOLINT(google-explicit-constructor)

  DensityKind kind() const noexcept {
    return is_discrete() ? DensityKind::discrete : DensityKind::continuous;
  }
  bool is_discrete() const noexcept { return std::holds_alternative<DiscreteDensity>(impl_); }
  const DiscreteDensity& discrete() const { return std::get<DiscreteDensity>(impl_); }
  const ContinuousDensity& continuous() const { return std::get<ContinuousDensity>(impl_); }

  const std::string& name() const;
  bool proper() const;
  bool sampleable() const;

  /// Point evaluation: mass for discrete priors (0 off the dyadic grid),
  /// pdf for continuous ones.
  double evaluate(double x) const;

  Density scaled(double factor) const;

 private:
  std::variant<DiscreteDensity, ContinuousDensity> impl_;
};

/// Draws an initial amount; throws improper-density-unsampleable for
/// analytic-only priors.
double sample(const Density& density, Rng& rng);

}  // namespace envlab
