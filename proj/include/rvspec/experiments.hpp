#pragma once

// Monte Carlo harness: r-sweeps, spectral cdf comparison, interval
// coverage, the Fréchet limit of normalized maxima and bias decay.
//
// Replication k of an experiment always draws from the stream
// replication_stream(tag, k) of the master seed, and results are folded in
// replication order, so output does not depend on the number of threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rvspec/core_types.hpp"
#include "rvspec/estimators.hpp"
#include "rvspec/grouping.hpp"
#include "rvspec/numerics.hpp"
#include "rvspec/random.hpp"
#include "rvspec/simulation.hpp"
#include "rvspec/tuning.hpp"

namespace rvspec {

enum class ExperimentTag : std::uint64_t { Sweep = 1, Ecdf = 2, Coverage = 3, Frechet = 4, BiasDecay = 5 };

inline std::uint64_t replication_stream(ExperimentTag tag, std::uint64_t replication) {
  return (static_cast<std::uint64_t>(tag) << 40) | replication;
}

/// Runs fn(k) for k in [0, count) on a small thread pool; fn must only write
/// to slot k of its own output.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::scoped_lock lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

enum class SamplerKind { Polar, Stable1d, StableVector };

/// A ground-truth model together with the generator used to draw from it.
struct Scenario {
  ModelSpec model;
  SamplerKind sampler = SamplerKind::Polar;
  std::size_t discretization_atoms = kDefaultDiscretizationAtoms;
};

inline DataMatrix draw_sample(const Scenario& scenario, std::size_t sample_size, SeededRng& rng) {
  const ModelSpec& model = scenario.model;
  switch (scenario.sampler) {
    case SamplerKind::Polar:
      return sample_polar(model, sample_size, rng);
    case SamplerKind::Stable1d:
      if (model.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "univariate stable needs d = 1");
      return sample_stable_1d(model.alpha(), model.rho(), model.total_mass(), sample_size, rng);
    case SamplerKind::StableVector: {
      if (model.has_atoms()) return sample_stable_vector(model.alpha(), model.atoms(), sample_size, rng);
      const auto atoms = discretize_angular_density(model.density().f, model.total_mass(), scenario.discretization_atoms);
      return sample_stable_vector(model.alpha(), atoms, sample_size, rng);
    }
  }
  throw Error(ErrorCode::InvalidModel, "unknown sampler");
}

/// Normalized angular cdf of a planar model: σ̃{polar angle in [0, θ]}.
inline double model_angular_cdf(const ModelSpec& model, double angle) {
  if (model.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "angular cdf needs d = 2");
  if (model.has_density()) {
    return std::min(1.0, model.integrate_density(0.0, std::min(angle, 2.0 * std::numbers::pi)) / model.total_mass());
  }
  double below = 0.0;
  for (const auto& atom : model.atoms()) {
    if (planar_angle(atom.direction) <= angle) below += atom.weight;
  }
  return below / model.total_mass();
}

// ---------------------------------------------------------------------------
// r-sweep

enum class SweepTarget { Alpha, Rho, Mass };

struct SweepRow {
  double one_minus_r = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t reps = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Only directions are needed for ρ̂, so groups of one vector are allowed
/// for that target.
inline std::size_t sweep_min_group_size(SweepTarget target) {
  return target == SweepTarget::Rho ? 1 : kMinGroupSize;
}

/// Values of r with 1 - r ∈ {0.05, 0.10, ..., 0.95} that are feasible for N.
inline std::vector<double> default_sweep_grid(std::size_t sample_size, SweepTarget target) {
  std::vector<double> grid;
  for (int k = 1; k <= 19; ++k) {
    const double r = 1.0 - 0.05 * k;
    try {
      plan_grouping(sample_size, r, sweep_min_group_size(target));
      grid.push_back(r);
    } catch (const Error&) {
    }
  }
  return grid;
}

inline double sweep_estimate(const DataMatrix& data, const GroupScheme& scheme, SweepTarget target,
                             const ModelSpec& model) {
  const auto groups = summarize_groups(data, scheme);
  switch (target) {
    case SweepTarget::Alpha:
      return estimate_alpha(groups).alpha_hat;
    case SweepTarget::Rho:
      return rho_1d(estimate_spectral(groups));
    case SweepTarget::Mass:
      return estimate_total_mass(groups, scheme, model.alpha(), default_t(model.alpha(), scheme.r)).mass_hat;
  }
  return 0.0;
}

/// Every replication draws one sample and evaluates the target for all r
/// on that same sample. The mass target uses the model's α.
inline SweepResult run_r_sweep(const Scenario& scenario, std::size_t sample_size, std::vector<double> r_grid,
                               std::size_t reps, SweepTarget target, std::uint64_t seed) {
  if (reps == 0) throw Error(ErrorCode::EmptyExperiment, "sweep needs at least one replication");
  if (r_grid.empty()) throw Error(ErrorCode::EmptyExperiment, "sweep grid is empty");
  std::vector<GroupScheme> schemes;
  for (double r : r_grid) schemes.push_back(plan_grouping(sample_size, r, sweep_min_group_size(target)));

  std::vector<std::vector<double>> estimates(reps, std::vector<double>(r_grid.size()));
  parallel_for(reps, [&](std::size_t k) {
    SeededRng rng(seed, replication_stream(ExperimentTag::Sweep, k));
    const DataMatrix data = draw_sample(scenario, sample_size, rng);
    for (std::size_t g = 0; g < schemes.size(); ++g) {
      estimates[k][g] = sweep_estimate(data, schemes[g], target, scenario.model);
    }
  });

  SweepResult result;
  for (std::size_t g = 0; g < r_grid.size(); ++g) {
    double sum = 0.0;
    for (std::size_t k = 0; k < reps; ++k) sum += estimates[k][g];
    const double mean = sum / static_cast<double>(reps);
    double sq = 0.0;
    for (std::size_t k = 0; k < reps; ++k) sq += (estimates[k][g] - mean) * (estimates[k][g] - mean);
    const double stddev = reps > 1 ? std::sqrt(sq / static_cast<double>(reps - 1)) : 0.0;
    result.rows.push_back({1.0 - r_grid[g], mean, stddev, reps});
  }
  std::sort(result.rows.begin(), result.rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.one_minus_r < b.one_minus_r; });
  return result;
}

// ---------------------------------------------------------------------------
// Spectral cdf comparison

struct EcdfRow {
  double angle = 0.0;
  double estimated = 0.0;
  double exact = 0.0;
};

struct EcdfComparison {
  std::vector<EcdfRow> rows;
  double sup_distance = 0.0;
  GroupScheme scheme;
};

inline EcdfComparison run_ecdf_compare(const Scenario& scenario, std::size_t sample_size, double r,
                                       std::size_t grid_size, SeededRng& rng) {
  if (scenario.model.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "cdf comparison needs d = 2");
  if (grid_size == 0) throw Error(ErrorCode::PreconditionViolation, "grid must be nonempty");
  const DataMatrix data = draw_sample(scenario, sample_size, rng);
  EcdfComparison out;
  out.scheme = plan_grouping(sample_size, r);
  const SpectralEstimate est = estimate_spectral(summarize_groups(data, out.scheme));
  const auto grid = uniform_angle_grid(grid_size);
  for (const auto& point : spectral_cdf_2d(est, grid)) {
    const double exact = model_angular_cdf(scenario.model, point.angle);
    out.rows.push_back({point.angle, point.value, exact});
    out.sup_distance = std::max(out.sup_distance, std::abs(point.value - exact));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Interval coverage

enum class EstimatorKind { Alpha, Spectral, Mass };

inline std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Alpha: return "alpha";
    case EstimatorKind::Spectral: return "spectral";
    case EstimatorKind::Mass: return "mass";
  }
  return "unknown";
}

struct CoverageConfig {
  EstimatorKind kind = EstimatorKind::Alpha;
  double level = 0.95;
  std::size_t reps = 200;
  std::optional<double> r;  // nullopt: tuned from the model's α and β
  double epsilon = kDefaultEpsilon;
  Region region;            // spectral kind only
};

struct CoverageResult {
  EstimatorKind kind = EstimatorKind::Alpha;
  double level = 0.95;
  std::size_t reps = 0;
  std::size_t hits = 0;
  std::size_t failures = 0;  // replications whose interval was undefined
  GroupScheme scheme;
  double truth = 0.0;

  double coverage() const { return reps == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(reps); }
};

inline GroupScheme coverage_scheme(const ModelSpec& model, std::size_t sample_size, const CoverageConfig& config) {
  if (config.r) return plan_grouping(sample_size, *config.r);
  const TuningPlan plan = make_tuning_plan(model.alpha(), model.beta(), config.epsilon);
  double r = 0.0;
  switch (config.kind) {
    case EstimatorKind::Alpha: r = plan.r_alpha; break;
    case EstimatorKind::Spectral: r = plan.r_spectral; break;
    case EstimatorKind::Mass: r = plan.r_mass; break;
  }
  return plan_grouping(sample_size, feasible_r(sample_size, r));
}

/// Fraction of replications whose interval contains the true parameter. A
/// replication whose interval is undefined counts as a miss. Mass intervals
/// use the model's α.
inline CoverageResult run_ci_coverage(const Scenario& scenario, std::size_t sample_size, const CoverageConfig& config,
                                      std::uint64_t seed) {
  if (config.reps == 0) throw Error(ErrorCode::EmptyExperiment, "coverage needs at least one replication");
  if (config.kind == EstimatorKind::Spectral && !config.region) {
    throw Error(ErrorCode::PreconditionViolation, "spectral coverage needs a region");
  }
  const ModelSpec& model = scenario.model;
  CoverageResult result;
  result.kind = config.kind;
  result.level = config.level;
  result.reps = config.reps;
  result.scheme = coverage_scheme(model, sample_size, config);
  const double alpha = model.alpha();
  const double t = config.r ? default_t(alpha, result.scheme.r)
                            : make_tuning_plan(alpha, model.beta(), config.epsilon).t_default;
  switch (config.kind) {
    case EstimatorKind::Alpha: result.truth = alpha; break;
    case EstimatorKind::Spectral: result.truth = model.normalized_mass(config.region); break;
    case EstimatorKind::Mass: result.truth = model.total_mass(); break;
  }

  enum class Outcome : int { Miss, Hit, Undefined };
  std::vector<Outcome> outcomes(config.reps, Outcome::Miss);
  parallel_for(config.reps, [&](std::size_t k) {
    SeededRng rng(seed, replication_stream(ExperimentTag::Coverage, k));
    const DataMatrix data = draw_sample(scenario, sample_size, rng);
    const auto groups = summarize_groups(data, result.scheme);
    try {
      Interval ci;
      switch (config.kind) {
        case EstimatorKind::Alpha: ci = alpha_ci(estimate_alpha(groups), config.level); break;
        case EstimatorKind::Spectral: ci = spectral_ci(estimate_spectral(groups), config.region, config.level); break;
        case EstimatorKind::Mass: ci = total_mass_ci(estimate_total_mass(groups, result.scheme, alpha, t), config.level); break;
      }
      outcomes[k] = ci.contains(result.truth) ? Outcome::Hit : Outcome::Miss;
    } catch (const Error&) {
      outcomes[k] = Outcome::Undefined;
    }
  });
  for (Outcome o : outcomes) {
    if (o == Outcome::Hit) ++result.hits;
    if (o == Outcome::Undefined) ++result.failures;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Normalized maxima

/// q_i = M1_i / m^{1/α} over n_groups groups of m polar vectors.
inline std::vector<double> normalized_maxima(const ModelSpec& model, std::size_t m, std::size_t n_groups,
                                             SeededRng& rng) {
  if (m < 2) throw Error(ErrorCode::PreconditionViolation, "normalized maxima need m >= 2");
  if (n_groups == 0) throw Error(ErrorCode::PreconditionViolation, "need at least one group");
  const std::size_t sample_size = m * n_groups;
  const DataMatrix data = sample_polar(model, sample_size, rng);
  const auto groups = summarize_groups(data, exact_grouping(sample_size, n_groups, m));
  const double norming = std::pow(static_cast<double>(m), 1.0 / model.alpha());
  std::vector<double> q;
  q.reserve(groups.size());
  for (const auto& g : groups) q.push_back(g.m1 / norming);
  return q;
}

/// Fréchet cdf exp(-σ(S) x^{-α}) for x > 0.
inline double frechet_cdf(double x, double alpha, double total_mass) {
  return x > 0.0 ? std::exp(-total_mass * std::pow(x, -alpha)) : 0.0;
}

/// KS distance of the normalized group maxima to their Fréchet limit.
inline double run_frechet_check(const ModelSpec& model, std::size_t m, std::size_t n_groups, SeededRng& rng) {
  const auto q = normalized_maxima(model, m, n_groups, rng);
  return ks_distance(q, [&](double x) { return frechet_cdf(x, model.alpha(), model.total_mass()); });
}

// ---------------------------------------------------------------------------
// Bias decay of the mean of q^t

struct BiasDecayResult {
  std::size_t m = 0;
  double t = 0.0;
  double target = 0.0;             // Γ(1 - t/α) σ(S)^{t/α}
  double mean_abs_deviation = 0.0; // mean over replications of |mean q^t - target|
  double mean_deviation = 0.0;     // mean over replications of (mean q^t - target)
};

/// Group maxima are drawn from their exact law (sample_polar_group_maxima),
/// which is what makes m = 10^4 affordable at many replications.
inline BiasDecayResult run_bias_decay(const ModelSpec& model, std::size_t m, std::size_t n_groups, std::size_t reps,
                                      double t, std::uint64_t seed) {
  if (reps == 0) throw Error(ErrorCode::EmptyExperiment, "bias decay needs at least one replication");
  const double alpha = model.alpha();
  if (!(t > 0.0 && t < alpha / 2.0)) throw Error(ErrorCode::InvalidT, "t must lie in (0, alpha/2)");
  BiasDecayResult result;
  result.m = m;
  result.t = t;
  result.target = gamma_fn(1.0 - t / alpha) * std::pow(model.total_mass(), t / alpha);
  const double norming = std::pow(static_cast<double>(m), 1.0 / alpha);
  std::vector<double> deviation(reps);
  parallel_for(reps, [&](std::size_t k) {
    SeededRng rng(seed ^ (static_cast<std::uint64_t>(m) << 20), replication_stream(ExperimentTag::BiasDecay, k));
    const auto maxima = sample_polar_group_maxima(model, m, n_groups, rng);
    double sum = 0.0;
    for (double x : maxima) sum += std::pow(x / norming, t);
    deviation[k] = sum / static_cast<double>(n_groups) - result.target;
  });
  for (double d : deviation) {
    result.mean_abs_deviation += std::abs(d);
    result.mean_deviation += d;
  }
  result.mean_abs_deviation /= static_cast<double>(reps);
  result.mean_deviation /= static_cast<double>(reps);
  return result;
}

}  // namespace rvspec
