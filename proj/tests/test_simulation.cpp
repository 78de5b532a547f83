#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rvspec/estimators.hpp"
#include "rvspec/grouping.hpp"
#include "rvspec/simulation.hpp"

using namespace rvspec;
using Catch::Matchers::WithinAbs;

namespace {

double binomial_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

double quadrant_density(double t) { return std::abs(std::cos(2.0 * t)) / 4.0; }

}  // namespace

TEST_CASE("polar model on a single atom", "[simulation]") {
  const ModelSpec model(1.0, 1.0, {{{1.0, 0.0}, 1.0}});
  SeededRng rng(7, 0);
  const std::size_t n = 200000;
  const DataMatrix data = sample_polar(model, n, rng);
  std::size_t beyond = 0;
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(data(i, 0) >= 1.0);
    REQUIRE(data(i, 1) == 0.0);
    if (data(i, 0) > 10.0) ++beyond;
  }
  CHECK(std::abs(static_cast<double>(beyond) / n - 0.1) <= 4.0 * std::sqrt(0.09 / n));
}

TEST_CASE("polar model direction frequencies", "[simulation]") {
  const ModelSpec model(1.0, 2.0, {{{1.0, 0.0}, 1.2}, {{0.0, 1.0}, 0.8}});
  SeededRng rng(8, 0);
  const std::size_t n = 100000;
  const DataMatrix data = sample_polar(model, n, rng);
  std::size_t first_axis = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (data(i, 1) == 0.0) ++first_axis;
    REQUIRE(euclidean_norm(data.row(i)) >= std::sqrt(2.0) * (1.0 - 1e-12));
  }
  CHECK(std::abs(static_cast<double>(first_axis) / n - 0.6) <= 4.0 * binomial_se(0.6, n));
}

TEST_CASE("polar model with an angular density", "[simulation]") {
  const ModelSpec model(1.0, 1.0, AngularDensity{quadrant_density});
  SeededRng rng(9, 0);
  const std::size_t n = 100000;
  const SpectralEstimate directions = [&] {
    const DataMatrix data = sample_polar(model, n, rng);
    std::vector<double> atoms;
    for (std::size_t i = 0; i < n; ++i) {
      const double norm = euclidean_norm(data.row(i));
      atoms.push_back(data(i, 0) / norm);
      atoms.push_back(data(i, 1) / norm);
    }
    return SpectralEstimate(2, atoms);
  }();
  for (int q = 0; q < 4; ++q) {
    const auto quadrant = arc_region(q * std::numbers::pi / 2.0, (q + 1) * std::numbers::pi / 2.0);
    CHECK(std::abs(spectral_mass(directions, quadrant) - 0.25) <= 4.0 * binomial_se(0.25, n));
  }
  // F(π/4) = ∫_0^{π/4} cos(2u)/4 du = 1/8
  CHECK(std::abs(spectral_mass(directions, arc_region(0.0, std::numbers::pi / 4.0)) - 0.125) <=
        4.0 * binomial_se(0.125, n));
}

TEST_CASE("polar model realizes the regular-variation limit exactly", "[simulation][property]") {
  const ModelSpec model(1.0, 2.0, {{{1.0, 0.0}, 1.2}, {{0.0, 1.0}, 0.8}});
  SeededRng rng(10, 0);
  const std::size_t sample = 1000000;
  const double n = 1e4;
  const DataMatrix data = sample_polar(model, sample, rng);
  for (double r : {1.0, 2.0}) {
    const double threshold = r * std::pow(n, 1.0 / model.alpha());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < sample; ++i) {
      if (data(i, 1) == 0.0 && data(i, 0) > threshold) ++hits;
    }
    const double p = 1.2 * std::pow(r, -model.alpha()) / n;
    const double scaled = n * static_cast<double>(hits) / sample;
    CHECK(std::abs(scaled - 1.2 * std::pow(r, -model.alpha())) <= 5.0 * n * binomial_se(p, sample));
  }
}

TEST_CASE("generators are deterministic", "[simulation]") {
  const ModelSpec model(0.8, 1.0, {{{1.0, 0.0}, 0.5}, {{0.0, 1.0}, 0.5}});
  SeededRng a(1, 2), b(1, 2);
  CHECK(sample_polar(model, 1000, a) == sample_polar(model, 1000, b));
  SeededRng c(3, 4), d(3, 4);
  CHECK(sample_stable_1d(1.75, 0.5, 1.0, 1000, c) == sample_stable_1d(1.75, 0.5, 1.0, 1000, d));
  SeededRng e(5, 6), f(5, 6);
  CHECK(sample_stable_vector(0.75, model.atoms(), 500, e) == sample_stable_vector(0.75, model.atoms(), 500, f));
}

TEST_CASE("stable tail constant", "[simulation]") {
  // 0.72074106037356256686 from a 40-digit evaluation
  CHECK_THAT(stable_tail_constant(0.75), WithinAbs(0.720741060373562567, 1e-13));
  CHECK(stable_tail_constant(1.75) > 0.0);
  CHECK_THROWS_AS(stable_tail_constant(1.0), Error);
  SeededRng rng(1, 1);
  CHECK_THROWS_AS(sample_stable_1d(1.0, 0.0, 1.0, 10, rng), Error);
  CHECK_THROWS_AS(sample_stable_1d(2.5, 0.0, 1.0, 10, rng), Error);
}

TEST_CASE("symmetric stable tails balance", "[simulation][statistical]") {
  SeededRng rng(21, 0);
  const std::size_t n = 1000000;
  const DataMatrix data = sample_stable_1d(1.5, 0.0, 1.0, n, rng);
  std::vector<double> abs_values(n);
  for (std::size_t i = 0; i < n; ++i) abs_values[i] = std::abs(data(i, 0));
  std::nth_element(abs_values.begin(), abs_values.begin() + n * 99 / 100, abs_values.end());
  const double x = abs_values[n * 99 / 100];
  std::size_t upper = 0, lower = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (data(i, 0) > x) ++upper;
    if (data(i, 0) < -x) ++lower;
  }
  CHECK(static_cast<double>(upper) / static_cast<double>(lower) == Catch::Approx(1.0).margin(0.1));
}

TEST_CASE("stable tail-count oracle for the scale mapping", "[simulation][statistical]") {
  // m P(X > m^{1/α} x) → σ(+1) x^{-α} with σ(+1) = (1+ρ)/2 · σ(S)
  const double alpha = 1.75;
  const double rho = 0.5;
  const std::size_t n = 4000000;
  const double m = 1000.0;
  SeededRng rng(22, 0);
  const DataMatrix data = sample_stable_1d(alpha, rho, 1.0, n, rng);
  for (double x : {2.0, 4.0}) {
    const double threshold = std::pow(m, 1.0 / alpha) * x;
    std::size_t upper = 0, lower = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (data(i, 0) > threshold) ++upper;
      if (data(i, 0) < -threshold) ++lower;
    }
    const double p_upper = 0.75 * std::pow(x, -alpha) / m;
    const double p_lower = 0.25 * std::pow(x, -alpha) / m;
    INFO("x = " << x << " upper = " << upper << " lower = " << lower);
    CHECK(std::abs(static_cast<double>(upper) / n - p_upper) <= 4.0 * binomial_se(p_upper, n));
    CHECK(std::abs(static_cast<double>(lower) / n - p_lower) <= 4.0 * binomial_se(p_lower, n));
  }
}

TEST_CASE("stable vector on a single atom", "[simulation]") {
  const std::vector<SpectralAtom> atoms{{{1.0, 0.0}, 1.0}};
  SeededRng rng(23, 0);
  const DataMatrix data = sample_stable_vector(0.75, atoms, 1000, rng);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    REQUIRE(data(i, 0) > 0.0);
    REQUIRE(data(i, 1) == 0.0);
  }
  for (const auto& g : summarize_groups(data, plan_grouping(data.rows(), 0.5))) {
    CHECK(g.theta == std::vector<double>{1.0, 0.0});
  }
  CHECK_THROWS_AS(sample_stable_vector(1.2, atoms, 10, rng), Error);
}

TEST_CASE("discretize_angular_density", "[simulation]") {
  const auto quarters = discretize_angular_density(quadrant_density, 1.0, 4);
  REQUIRE(quarters.size() == 4);
  for (const auto& atom : quarters) CHECK_THAT(atom.weight, WithinAbs(0.25, 1e-12));
  CHECK_THAT(quarters[0].direction[0], WithinAbs(std::cos(std::numbers::pi / 4.0), 1e-15));

  const auto flat = discretize_angular_density([](double) { return 1.0 / (2.0 * std::numbers::pi); }, 1.0, 8);
  REQUIRE(flat.size() == 8);
  for (const auto& atom : flat) CHECK_THAT(atom.weight, WithinAbs(0.125, 1e-12));

  for (std::size_t k : {4u, 7u, 100u, 333u}) {
    double sum = 0.0;
    for (const auto& atom : discretize_angular_density(quadrant_density, 2.5, k)) sum += atom.weight;
    CHECK_THAT(sum, WithinAbs(2.5, 1e-12));
  }
  CHECK_THROWS_AS(discretize_angular_density([](double t) { return std::sin(t); }, 1.0, 8), Error);
  CHECK_THROWS_AS(discretize_angular_density(quadrant_density, 1.0, 3), Error);
}

TEST_CASE("stable vector round trip", "[simulation][statistical]") {
  const auto atoms = discretize_angular_density(quadrant_density, 1.0, 100);
  SeededRng rng(24, 0);
  const DataMatrix data = sample_stable_vector(0.75, atoms, 50000, rng);
  const GroupScheme scheme = plan_grouping(data.rows(), 0.5);
  const auto groups = summarize_groups(data, scheme);
  const AlphaEstimate alpha = estimate_alpha(groups);
  CHECK(alpha.alpha_hat == Catch::Approx(0.75).margin(0.07));
  const TotalMassEstimate mass = estimate_total_mass(groups, scheme, 0.75, default_t(0.75, scheme.r));
  CHECK(mass.mass_hat == Catch::Approx(1.0).margin(0.2));
}

TEST_CASE("exact law of polar group maxima", "[simulation][statistical]") {
  // P(M1 <= x) = (1 - σ x^{-α})^m for x >= σ^{1/α}; compare the median
  const ModelSpec model(1.0, 1.0, {{{1.0}, 1.0}});
  SeededRng rng(25, 0);
  const std::size_t m = 50;
  auto maxima = sample_polar_group_maxima(model, m, 20001, rng);
  std::nth_element(maxima.begin(), maxima.begin() + 10000, maxima.end());
  const double median = 1.0 / (1.0 - std::pow(0.5, 1.0 / m));
  CHECK(maxima[10000] == Catch::Approx(median).epsilon(0.03));
}
