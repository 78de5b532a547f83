#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rvspec/pipeline.hpp"
#include "rvspec/simulation.hpp"

using namespace rvspec;

namespace {

bool has_warning(const PipelineResult& result, std::string_view fragment) {
  return std::any_of(result.warnings.begin(), result.warnings.end(),
                     [&](const std::string& w) { return w.find(fragment) != std::string::npos; });
}

DataMatrix planar_sample(std::size_t n, std::uint64_t seed) {
  const ModelSpec model(1.0, 2.0, {{{1.0, 0.0}, 1.2}, {{0.0, 1.0}, 0.8}});
  SeededRng rng(seed, 0);
  return sample_polar(model, n, rng);
}

}  // namespace

TEST_CASE("fixed r matches the individual estimators", "[pipeline]") {
  const DataMatrix data = planar_sample(10000, 1);
  PipelineConfig config;
  config.r = 0.5;
  config.regions = {{"first-axis", halfspace_region({1.0, 0.0}, 0.5)}, {"none", empty_region()}};
  config.cdf_grid = 8;
  const PipelineResult result = run_pipeline(data, config);

  const GroupScheme scheme = plan_grouping(10000, 0.5);
  const auto groups = summarize_groups(data, scheme);
  const AlphaEstimate alpha = estimate_alpha(groups);
  CHECK_FALSE(result.auto_tuned);
  CHECK(result.alpha_scheme.n == scheme.n);
  CHECK(result.alpha.alpha_hat == alpha.alpha_hat);
  CHECK(result.alpha_interval.lo == alpha_ci(alpha, 0.95).lo);

  const SpectralEstimate spectral = estimate_spectral(groups);
  REQUIRE(result.regions.size() == 2);
  CHECK(result.regions[0].mass == spectral_mass(spectral, config.regions[0].region));
  REQUIRE(result.regions[0].ci.has_value());
  CHECK(result.regions[1].count == 0);
  CHECK_FALSE(result.regions[1].ci.has_value());
  CHECK(has_warning(result, "region 'none'"));
  CHECK(result.cdf.size() == 8);
  CHECK(result.cdf.back().value == 1.0);
  CHECK_FALSE(result.rho.has_value());

  const double alpha_plugin = estimate_alpha(groups).alpha_hat;
  const TotalMassEstimate mass = estimate_total_mass(groups, scheme, alpha_plugin, default_t(alpha_plugin, 0.5));
  CHECK(result.mass.mass_hat == mass.mass_hat);
  CHECK(result.mass.alpha_plugin);
  CHECK(has_warning(result, "plug-in alpha"));
}

TEST_CASE("known alpha is used for the mass", "[pipeline]") {
  const DataMatrix data = planar_sample(10000, 2);
  PipelineConfig config;
  config.r = 0.5;
  config.alpha = 1.0;
  const PipelineResult result = run_pipeline(data, config);
  CHECK(result.mass.alpha_used == 1.0);
  CHECK_FALSE(result.mass.alpha_plugin);
  CHECK(result.mass_interval.contains(2.0));
}

TEST_CASE("automatic tuning", "[pipeline]") {
  const DataMatrix data = planar_sample(20000, 3);
  PipelineConfig config;
  config.alpha = 1.0;
  config.beta = 3.0;
  const PipelineResult result = run_pipeline(data, config);
  REQUIRE(result.auto_tuned);
  REQUIRE(result.plan.has_value());
  const TuningPlan plan = make_tuning_plan(1.0, 3.0);
  CHECK(result.alpha_scheme.r == plan_grouping(20000, plan.r_alpha).r);
  CHECK(result.spectral_scheme.r == plan_grouping(20000, plan.r_spectral).r);
  CHECK(result.mass_scheme.r == plan_grouping(20000, plan.r_mass).r);
  CHECK(result.mass.t == plan.t_default);
  CHECK_FALSE(has_warning(result, "pilot"));
}

TEST_CASE("automatic tuning without a known alpha", "[pipeline]") {
  const DataMatrix data = planar_sample(20000, 4);
  const PipelineResult result = run_pipeline(data, PipelineConfig{});
  CHECK(has_warning(result, "pilot alpha"));
  CHECK(result.tuning_beta == 2.0 * result.tuning_alpha);
  CHECK(result.tuning_alpha == Catch::Approx(1.0).margin(0.15));
}

TEST_CASE("infeasible tuned r is lowered", "[pipeline]") {
  const DataMatrix data = planar_sample(500, 5);
  PipelineConfig config;
  config.alpha = 1.0;
  config.beta = kInfinity;
  const PipelineResult result = run_pipeline(data, config);
  CHECK(result.alpha_scheme.m >= 2);
  CHECK(has_warning(result, "lowered"));
}

TEST_CASE("univariate data reports rho", "[pipeline]") {
  SeededRng rng(6, 0);
  const DataMatrix data = sample_stable_1d(1.5, 0.4, 1.0, 20000, rng);
  PipelineConfig config;
  config.r = 0.5;
  const PipelineResult result = run_pipeline(data, config);
  REQUIRE(result.rho.has_value());
  CHECK(*result.rho == Catch::Approx(0.4).margin(0.25));
  CHECK(result.cdf.empty());
}

TEST_CASE("invalid input", "[pipeline]") {
  PipelineConfig config;
  config.r = 0.5;
  CHECK_THROWS_AS(run_pipeline(DataMatrix(0, 2, {}), config), Error);
  DataMatrix bad(4, 1, {1.0, std::nan(""), 2.0, 3.0});
  try {
    run_pipeline(bad, config);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteEntry);
  }
  config.r = 1.5;
  CHECK_THROWS_AS(run_pipeline(planar_sample(100, 7), config), Error);
}
