#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"

#include "envlab/benefit.hpp"
#include "envlab/catalog.hpp"
#include "envlab/density_spec.hpp"
#include "envlab/error.hpp"

using namespace envlab;

namespace {

template <typename Fn>
ErrorCode error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an envlab::Error");
  return ErrorCode::malformed_spec;
}

}  // namespace

TEST_CASE("dyadic rationals are canonical and exact") {
  const DyadicRational six(6, 0);
  CHECK(six.mantissa() == 3);
  CHECK(six.exponent() == 1);
  CHECK(DyadicRational(0, 7) == DyadicRational());
  CHECK(DyadicRational(0, 7).exponent() == 0);

  const auto three_quarters = DyadicRational::from_double(0.75);
  CHECK(three_quarters == DyadicRational(3, -2));
  CHECK(three_quarters.to_double() == 0.75);
  CHECK(DyadicRational::from_double(-12.0) == DyadicRational(-3, 2));

  std::int32_t k = 0;
  CHECK(DyadicRational::from_double(1024.0).is_power_of_two(&k));
  CHECK(k == 10);
  CHECK_FALSE(DyadicRational::from_double(12.0).is_power_of_two());

  CHECK(error_code_of([] { DyadicRational::from_double(NAN); }) == ErrorCode::invalid_parameter);
}

TEST_CASE("halving a doubled amount is the identity, and ordering matches the reals") {
  Rng rng(2024);
  for (int i = 0; i < 5000; ++i) {
    const double a = std::ldexp(rng.uniform_open() - 0.5, static_cast<int>(rng.next_u64() % 200) - 100);
    const double b = std::ldexp(rng.uniform_open() - 0.5, static_cast<int>(rng.next_u64() % 200) - 100);
    const auto da = DyadicRational::from_double(a);
    const auto db = DyadicRational::from_double(b);
    CHECK(da.doubled().halved() == da);
    CHECK(da.halved().doubled() == da);
    CHECK(da.doubled().to_double() == 2 * a);
    CHECK(((da <=> db) == std::strong_ordering::less) == (a < b));
    CHECK(((da <=> db) == std::strong_ordering::equal) == (a == b));
  }
  // Same leading bit, different exponents.
  CHECK(DyadicRational(3, 0) < DyadicRational(7, -1));
  CHECK(DyadicRational(-3, 0) > DyadicRational(-7, -1));
}

TEST_CASE("catalog lists eight priors and rejects unknown names and bad parameters") {
  CHECK(catalog_entries().size() == 8);
  std::set<std::string_view> names;
  for (const auto& e : catalog_entries()) names.insert(e.name);
  CHECK(names.size() == 8);
  for (const auto& e : catalog_entries()) {
    const ParamMap params = e.name == "power_law" ? ParamMap{{"n", 2}} : ParamMap{};
    const Density d = catalog_lookup(e.name, params);
    CHECK(d.kind() == e.kind);
    CHECK(d.proper() == e.proper);
  }

  CHECK(error_code_of([] { catalog_lookup("cauchy"); }) == ErrorCode::unknown_name);
  CHECK(error_code_of([] { catalog_lookup("power_law", {{"n", 0}}); }) == ErrorCode::invalid_parameter);
  CHECK(error_code_of([] { catalog_lookup("power_law", {{"n", 2.5}}); }) == ErrorCode::invalid_parameter);
  CHECK(error_code_of([] { catalog_lookup("power_law"); }) == ErrorCode::invalid_parameter);
  CHECK(error_code_of([] { catalog_lookup("uniform01", {{"a", 1}}); }) == ErrorCode::invalid_parameter);
  CHECK(error_code_of([] { catalog_lookup("recurrence", {{"max_index", 0}}); }) ==
        ErrorCode::invalid_parameter);
}

TEST_CASE("uniform01 is one on (0, 1] and zero elsewhere") {
  const Density u = catalog_lookup("uniform01");
  CHECK(u.evaluate(0.3) == 1.0);
  CHECK(u.evaluate(1.0) == 1.0);
  CHECK(u.evaluate(1.5) == 0.0);
  CHECK(u.evaluate(0.0) == 0.0);
  CHECK(u.evaluate(-0.2) == 0.0);
}

TEST_CASE("rayleigh_half is the Weibull(1/2, 2) density") {
  const Density w = catalog_lookup("rayleigh_half");
  for (double x : {0.05, 0.3, 0.7, 1.4}) {
    // k/λ (x/λ)^(k-1) exp(-(x/λ)^k) with λ = 1/2, k = 2
    const double expected = 4.0 * (2 * x) * std::exp(-std::pow(2 * x, 2));
    CHECK(w.evaluate(x) == doctest::Approx(expected).epsilon(1e-15));
  }
}

TEST_CASE("broome_discrete masses 2^n / 3^(n+1) on the powers of two") {
  const auto d = catalog_lookup("broome_discrete").discrete();
  CHECK(static_cast<double>(d.mass(DyadicRational::power_of_two(0))) == doctest::Approx(1.0 / 3).epsilon(1e-16));
  CHECK(static_cast<double>(d.mass(DyadicRational::power_of_two(1))) == doctest::Approx(2.0 / 9).epsilon(1e-16));
  CHECK(d.mass(DyadicRational::from_double(3.0)) == 0.0L);
  CHECK(d.mass(DyadicRational::from_double(0.5)) == 0.0L);
  CHECK_FALSE(d.in_support(DyadicRational::from_double(0.5)));

  // Geometric partial sums: 1 - (2/3)^(N+1).
  for (int last : {0, 5, 20, 60}) {
    const auto points = d.enumerate(static_cast<std::size_t>(last) + 1).value();
    REQUIRE(points.size() == static_cast<std::size_t>(last) + 1);
    long double total = 0.0L;
    for (const auto& p : points) total += p.mass;
    CHECK(std::abs(static_cast<double>(total) - (1.0 - std::pow(2.0 / 3.0, last + 1))) <= 1e-12);
  }
}

TEST_CASE("recurrence prior follows p_n = p_(n-1)/2 + 2^-(2n+1) from p_0 = 1/12") {
  CHECK(recurrence_mass_fraction(0) == "1/12");
  CHECK(recurrence_mass_fraction(1) == "1/6");
  CHECK(recurrence_mass_fraction(2) == "11/96");

  // Unrolled: 2^n p_n = 7/12 - 2^-(n+1).
  const auto masses = recurrence_masses(kDefaultRecurrenceMaxIndex);
  REQUIRE(masses.size() == 65);
  for (int n = 0; n <= 64; ++n) {
    const long double closed = std::ldexp(7.0L / 12.0L - std::ldexp(1.0L, -(n + 1)), -n);
    CHECK(std::abs(masses[n] / closed - 1.0L) <= 1e-17L);
  }

  const auto d = catalog_lookup("recurrence").discrete();
  CHECK_FALSE(d.proper());
  CHECK(d.mass(DyadicRational::power_of_two(64)) == masses[64]);
  CHECK(d.mass(DyadicRational::power_of_two(65)) == 0.0L);
  const auto shorter = catalog_lookup("recurrence", {{"max_index", 8}}).discrete();
  CHECK(shorter.mass(DyadicRational::power_of_two(9)) == 0.0L);
}

TEST_CASE("extreme_values decades") {
  const Density d = catalog_lookup("extreme_values");
  CHECK(d.evaluate(0.999) == 0.0);
  CHECK(d.evaluate(1.0) == doctest::Approx(0.1));
  CHECK(d.evaluate(9.99) == doctest::Approx(0.1));
  CHECK(d.evaluate(10.0) == doctest::Approx(1e-3));
  CHECK(d.evaluate(99.0) == doctest::Approx(1e-3));
  CHECK(d.evaluate(100.0) == doctest::Approx(1e-5));
  CHECK(d.evaluate(1000.0) == doctest::Approx(1e-7));
  CHECK(d.evaluate(999.999) == doctest::Approx(1e-5));
}

TEST_CASE("sampling is deterministic per seed and refuses improper priors") {
  const Density u = catalog_lookup("uniform01");
  Rng first(42);
  Rng second(42);
  const double a = sample(u, first);
  const double b = sample(u, first);
  CHECK(a > 0.0);
  CHECK(a <= 1.0);
  CHECK(b > 0.0);
  CHECK(b <= 1.0);
  CHECK(a != b);
  CHECK(sample(u, second) == a);
  CHECK(sample(u, second) == b);

  Rng rng(1);
  CHECK(error_code_of([&] { sample(catalog_lookup("improper_exp"), rng); }) ==
        ErrorCode::improper_density_unsampleable);
  CHECK(error_code_of([&] { sample(catalog_lookup("power_law", {{"n", 1}}), rng); }) ==
        ErrorCode::improper_density_unsampleable);
  CHECK(error_code_of([&] { sample(catalog_lookup("recurrence"), rng); }) ==
        ErrorCode::improper_density_unsampleable);
}

TEST_CASE("rayleigh_half sample mean matches the Weibull mean") {
  // Weibull(λ, k): mean λΓ(1 + 1/k), variance λ²(Γ(1 + 2/k) - Γ(1 + 1/k)²).
  const double mean = 0.5 * std::tgamma(1.5);
  const double sd = 0.5 * std::sqrt(std::tgamma(2.0) - std::pow(std::tgamma(1.5), 2));
  CHECK(mean == doctest::Approx(std::sqrt(std::numbers::pi) / 4).epsilon(1e-14));

  const Density w = catalog_lookup("rayleigh_half");
  Rng rng(42);
  const int n = 100000;
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += sample(w, rng);
  CHECK(std::abs(total / n - mean) <= 3.0 * sd / std::sqrt(n));
}

TEST_CASE("samplers reproduce their distributions") {
  Rng rng(9);
  const int n = 200000;

  int ones = 0;
  const Density broome = catalog_lookup("broome_discrete");
  for (int i = 0; i < n; ++i) ones += sample(broome, rng) == 1.0;
  const double se_third = std::sqrt((1.0 / 3) * (2.0 / 3) / n);
  CHECK(std::abs(static_cast<double>(ones) / n - 1.0 / 3) <= 4 * se_third);

  // CDF x / (x + 1): the median is 1.
  int below_one = 0;
  const Density bc = catalog_lookup("broome_continuous");
  for (int i = 0; i < n; ++i) below_one += sample(bc, rng) <= 1.0;
  CHECK(std::abs(static_cast<double>(below_one) / n - 0.5) <= 4 * std::sqrt(0.25 / n));

  // First decade carries 0.9 of the mass.
  int first_decade = 0;
  const Density ev = catalog_lookup("extreme_values");
  for (int i = 0; i < n; ++i) {
    const double x = sample(ev, rng);
    REQUIRE(x >= 1.0);
    first_decade += x < 10.0;
  }
  CHECK(std::abs(static_cast<double>(first_decade) / n - 0.9) <= 4 * std::sqrt(0.09 / n));
}

TEST_CASE("scaling a continuous prior leaves every benefit report unchanged") {
  std::vector<Density> priors;
  for (const auto& e : catalog_entries()) {
    if (e.kind != DensityKind::continuous) continue;
    if (e.name == "power_law") {
      for (int n = 1; n <= 4; ++n) priors.push_back(catalog_lookup(e.name, {{"n", n}}));
    } else {
      priors.push_back(catalog_lookup(e.name));
    }
  }
  for (const Density& prior : priors) {
    for (double c : {0.5, 3.0, 100.0}) {
      const Density scaled = prior.scaled(c);
      CHECK_FALSE(scaled.sampleable());
      for (Process process : kAllProcesses) {
        for (double y : {0.05, 0.3, 0.7, 1.3, 2.5, 15.0, 75.0, 400.0}) {
          const BenefitReport a = expected_benefit(prior, process, y);
          const BenefitReport b = expected_benefit(scaled, process, y);
          CHECK(a.decision == b.decision);
          CHECK(a.attainable == b.attainable);
          CHECK(std::abs(a.expected_benefit - b.expected_benefit) <=
                1e-12 * std::max(1.0, std::abs(a.expected_benefit)));
        }
      }
    }
  }
}

TEST_CASE("density specs round-trip bit-exactly") {
  for (const auto& e : catalog_entries()) {
    const ParamMap params = e.name == "power_law" ? ParamMap{{"n", 3}} : ParamMap{};
    const DensitySpec spec = catalog_spec(e.name, params);
    const std::string text = serialize(spec);
    const DensitySpec back = parse_density_spec(text);
    CHECK(back == spec);
    CHECK(serialize(back) == text);
  }
  const DensitySpec custom = parse_density_spec(
      R"({"name":"piecewise","kind":"continuous","breakpoints":[0,0.1,0.30000000000000004,1],"values":[2,1.5,0.7142857142857143],"proper":false})");
  CHECK(serialize(parse_density_spec(serialize(custom))) == serialize(custom));
  CHECK(custom.breakpoints[2] == 0.30000000000000004);
}

TEST_CASE("spec parsing rejects malformed input") {
  const auto code = [](const char* text) {
    return error_code_of([&] { make_density(parse_density_spec(text)); });
  };
  CHECK(code("not json") == ErrorCode::malformed_spec);
  CHECK(code(R"({"kind":"continuous"})") == ErrorCode::malformed_spec);
  CHECK(code(R"({"name":"uniform01","kind":"sideways"})") == ErrorCode::malformed_spec);
  CHECK(code(R"({"name":"uniform01","kind":"discrete"})") == ErrorCode::malformed_spec);
  CHECK(code(R"({"name":"uniform01","kind":"continuous","proper":false})") == ErrorCode::malformed_spec);
  CHECK(code(R"({"name":"power_law","kind":"continuous","params":{"n":"two"}})") ==
        ErrorCode::malformed_spec);
  CHECK(code(R"({"name":"power_law","kind":"continuous","params":{"n":0}})") ==
        ErrorCode::invalid_parameter);
  CHECK(code(R"({"name":"zeta","kind":"discrete"})") == ErrorCode::unknown_name);
  CHECK(code(R"({"name":"piecewise","kind":"continuous","breakpoints":[0,1],"values":[0.5]})") ==
        ErrorCode::invalid_parameter);  // proper by default but integrates to 1/2
  CHECK(code(R"({"name":"piecewise","kind":"continuous","breakpoints":[0,2,1],"values":[1,1],"proper":false})") ==
        ErrorCode::invalid_parameter);
  CHECK(code(R"({"name":"piecewise","kind":"continuous","breakpoints":[0,1],"values":[1,2]})") ==
        ErrorCode::invalid_parameter);
}

TEST_CASE("piecewise densities are right-closed and sample their pieces") {
  const Density d = make_density(parse_density_spec(
      R"({"name":"piecewise","kind":"continuous","breakpoints":[0,1,3],"values":[0.5,0.25]})"));
  CHECK(d.proper());
  CHECK(d.evaluate(0.5) == 0.5);
  CHECK(d.evaluate(1.0) == 0.5);
  CHECK(d.evaluate(1.0000001) == 0.25);
  CHECK(d.evaluate(3.0) == 0.25);
  CHECK(d.evaluate(3.1) == 0.0);

  Rng rng(5);
  int first = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = sample(d, rng);
    REQUIRE(x > 0.0);
    REQUIRE(x <= 3.0);
    first += x <= 1.0;
  }
  CHECK(std::abs(static_cast<double>(first) / n - 0.5) <= 4 * std::sqrt(0.25 / n));
}

TEST_CASE("re-parsed specs evaluate identically at 100 probe points") {
  std::vector<DensitySpec> specs;
  for (const auto& e : catalog_entries()) {
    specs.push_back(catalog_spec(e.name, e.name == "power_law" ? ParamMap{{"n", 2}} : ParamMap{}));
  }
  specs.push_back(parse_density_spec(
      R"({"name":"piecewise","kind":"continuous","breakpoints":[0.5,1,4],"values":[1,0.5],"proper":false})"));
  for (const auto& spec : specs) {
    const Density a = make_density(spec);
    const Density b = make_density(parse_density_spec(serialize(spec)));
    for (int i = 0; i < 100; ++i) {
      const double x = std::ldexp(1.0, i % 12 - 4) * (1.0 + (i / 12) * 0.125);
      CHECK(a.evaluate(x) == b.evaluate(x));
    }
  }
}
