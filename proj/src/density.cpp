#include "envlab/density.hpp"

#include <cmath>

#include "envlab/error.hpp"

namespace envlab {

std::string_view to_string(DensityKind kind) {
  return kind == DensityKind::discrete ? "discrete" : "continuous";
}

DiscreteDensity::DiscreteDensity(std::string name, MassFn mass, SupportFn support, bool proper,
                                 Enumerator enumerator, Sampler sampler)
    : name_(std::move(name)),
      mass_(std::move(mass)),
      support_(std::move(support)),
      proper_(proper),
      enumerator_(std::move(enumerator)),
      sampler_(std::move(sampler)) {}

bool DiscreteDensity::in_support(const DyadicRational& x) const {
  return x.is_positive() && support_(x);
}

long double DiscreteDensity::mass(const DyadicRational& x) const {
  if (!in_support(x)) return 0.0L;
  return mass_(x);
}

std::optional<std::vector<PointMass>> DiscreteDensity::enumerate(std::size_t limit) const {
  if (!enumerator_) return std::nullopt;
  return enumerator_(limit);
}

DyadicRational DiscreteDensity::sample(Rng& rng) const {
  if (!sampleable()) {
    throw Error(ErrorCode::improper_density_unsampleable,
                "density '" + name_ + "' is analytic-only");
  }
  return sampler_(rng);
}

DiscreteDensity DiscreteDensity::scaled(long double factor) const {
  if (!(factor > 0.0L)) throw Error(ErrorCode::invalid_parameter, "scale factor must be positive");
  auto mass = [inner = mass_, factor](const DyadicRational& x) { return factor * inner(x); };
  Enumerator enumerator;
  if (enumerator_) {
    enumerator = [inner = enumerator_, factor](std::size_t limit) {
      auto points = inner(limit);
      for (auto& p : points) p.mass *= factor;
      return points;
    };
  }
  return {name_, std::move(mass), support_, false, std::move(enumerator)};
}

ContinuousDensity::ContinuousDensity(std::string name, PdfFn pdf, Interval support, bool proper,
                                     Sampler sampler)
    : name_(std::move(name)),
      pdf_(std::move(pdf)),
      support_(support),
      proper_(proper),
      sampler_(std::move(sampler)) {}

double ContinuousDensity::pdf(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
  const double value = pdf_(x);
  return value > 0.0 ? value : 0.0;
}

double ContinuousDensity::sample(Rng& rng) const {
  if (!sampleable()) {
    throw Error(ErrorCode::improper_density_unsampleable,
                "density '" + name_ + "' is analytic-only");
  }
  return sampler_(rng);
}

ContinuousDensity ContinuousDensity::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorCode::invalid_parameter, "scale factor must be positive");
  auto pdf = [inner = pdf_, factor](double x) { return factor * inner(x); };
  return {name_, std::move(pdf), support_, false};
}

const std::string& Density::name() const {
  return std::visit([](const auto& d) -> const std::string& { return d.name(); }, impl_);
}

bool Density::proper() const {
  return std::visit([](const auto& d) { return d.proper(); }, impl_);
}

bool Density::sampleable() const {
  return std::visit([](const auto& d) { return d.sampleable(); }, impl_);
}

double Density::evaluate(double x) const {
  if (is_discrete()) {
    if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
    return static_cast<double>(discrete().mass(DyadicRational::from_double(x)));
  }
  return continuous().pdf(x);
}

Density Density::scaled(double factor) const {
  if (is_discrete()) return discrete().scaled(factor);
  return continuous().scaled(factor);
}

double sample(const Density& density, Rng& rng) {
  if (density.is_discrete()) return density.discrete().sample(rng).to_double();
  return density.continuous().sample(rng);
}

}  // namespace envlab
