#pragma once

// End-to-end estimation: grouping, the three estimators and their
// intervals, with either a fixed r or rate-optimal automatic tuning.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rvspec/core_types.hpp"
#include "rvspec/estimators.hpp"
#include "rvspec/grouping.hpp"
#include "rvspec/tuning.hpp"

namespace rvspec {

inline constexpr double kPilotR = 0.5;

struct NamedRegion {
  std::string label;
  Region region;
};

struct PipelineConfig {
  std::optional<double> r;      // nullopt selects automatic tuning
  std::optional<double> alpha;  // known tail index; otherwise α̂ is plugged in
  std::optional<double> beta;   // second-order index for tuning; default 2α
  double epsilon = kDefaultEpsilon;
  std::optional<double> t;
  double level = 0.95;
  std::vector<NamedRegion> regions;
  std::size_t cdf_grid = 0;  // d = 2 only; 0 disables the cdf table
};

struct RegionResult {
  std::string label;
  std::size_t count = 0;
  double mass = 0.0;
  std::optional<Interval> ci;
};

struct PipelineResult {
  std::size_t sample_size = 0;
  std::size_t dim = 0;
  bool auto_tuned = false;
  std::optional<TuningPlan> plan;
  double tuning_alpha = 0.0;
  double tuning_beta = 0.0;

  GroupScheme alpha_scheme;
  AlphaEstimate alpha;
  Interval alpha_interval;

  GroupScheme spectral_scheme;
  std::optional<SpectralEstimate> spectral;
  std::vector<RegionResult> regions;
  std::vector<CdfPoint> cdf;
  std::optional<double> rho;

  GroupScheme mass_scheme;
  TotalMassEstimate mass;
  Interval mass_interval;

  std::vector<std::string> warnings;
};

inline PipelineResult run_pipeline(const DataMatrix& data, const PipelineConfig& config) {
  validate_data(data);
  PipelineResult out;
  out.sample_size = data.rows();
  out.dim = data.dim();

  std::map<double, std::vector<GroupSummary>> cache;
  const auto summaries_for = [&](const GroupScheme& scheme) -> const std::vector<GroupSummary>& {
    auto it = cache.find(scheme.r);
    if (it == cache.end()) it = cache.emplace(scheme.r, summarize_groups(data, scheme)).first;
    return it->second;
  };
  const auto note_degenerate = [&](const GroupScheme& scheme, const char* what) {
    if (scheme.degenerate()) out.warnings.push_back(std::string(what) + ": fewer than two groups");
  };

  if (config.r) {
    const GroupScheme scheme = plan_grouping(data.rows(), *config.r);
    out.alpha_scheme = out.spectral_scheme = out.mass_scheme = scheme;
  } else {
    out.auto_tuned = true;
    if (config.alpha) {
      out.tuning_alpha = *config.alpha;
    } else {
      const GroupScheme pilot = plan_grouping(data.rows(), kPilotR);
      out.tuning_alpha = estimate_alpha(summaries_for(pilot)).alpha_hat;
      out.warnings.emplace_back("auto tuning used a pilot alpha estimate at r = 0.5");
      if (!(out.tuning_alpha > 0.0)) throw Error(ErrorCode::InvalidAlpha, "pilot alpha estimate is zero");
    }
    out.tuning_beta = config.beta.value_or(2.0 * out.tuning_alpha);
    out.plan = make_tuning_plan(out.tuning_alpha, out.tuning_beta, config.epsilon);
    if (!out.plan->mass_rule_applies) {
      out.warnings.emplace_back("beta <= alpha + 1: mass tuning falls back to r = 1/2 - epsilon");
    }
    const auto tuned = [&](double r) {
      const double feasible = feasible_r(data.rows(), r);
      if (feasible < r) out.warnings.emplace_back("tuned r lowered so that groups hold at least two vectors");
      return plan_grouping(data.rows(), feasible);
    };
    out.alpha_scheme = tuned(out.plan->r_alpha);
    out.spectral_scheme = tuned(out.plan->r_spectral);
    out.mass_scheme = tuned(out.plan->r_mass);
  }
  note_degenerate(out.alpha_scheme, "alpha grouping");

  out.alpha = estimate_alpha(summaries_for(out.alpha_scheme));
  for (const auto& w : out.alpha.warnings) out.warnings.push_back(w);
  out.alpha_interval = alpha_ci(out.alpha, config.level);

  const auto& spectral_groups = summaries_for(out.spectral_scheme);
  out.spectral.emplace(estimate_spectral(spectral_groups));
  for (const auto& named : config.regions) {
    RegionResult region{named.label, spectral_count(*out.spectral, named.region),
                        spectral_mass(*out.spectral, named.region), std::nullopt};
    try {
      region.ci = spectral_ci(*out.spectral, named.region, config.level);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateProportion) throw;
      out.warnings.push_back("region '" + named.label + "': " + e.what());
    }
    out.regions.push_back(std::move(region));
  }
  if (out.dim == 2 && config.cdf_grid > 0) {
    out.cdf = spectral_cdf_2d(*out.spectral, uniform_angle_grid(config.cdf_grid));
  }
  if (out.dim == 1) out.rho = rho_1d(*out.spectral);

  const auto& mass_groups = summaries_for(out.mass_scheme);
  double alpha_used = 0.0;
  bool plugin = false;
  if (config.alpha) {
    alpha_used = *config.alpha;
  } else {
    alpha_used = estimate_alpha(mass_groups).alpha_hat;
    plugin = true;
    out.warnings.emplace_back("total mass uses the plug-in alpha estimate");
  }
  const double t = config.t ? *config.t
                   : out.auto_tuned ? make_tuning_plan(alpha_used, config.beta.value_or(2.0 * alpha_used), config.epsilon).t_default
                                    : default_t(alpha_used, out.mass_scheme.r);
  out.mass = estimate_total_mass(mass_groups, out.mass_scheme, alpha_used, t);
  out.mass.alpha_plugin = plugin;
  for (const auto& w : out.mass.warnings) out.warnings.push_back(w);
  out.mass_interval = total_mass_ci(out.mass, config.level);
  return out;
}

}  // namespace rvspec
