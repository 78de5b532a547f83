#pragma once

// Group-maxima estimators of the tail index α, the normalized spectral
// measure σ̃ and the total spectral mass σ(S), with normal-theory
// confidence intervals.
//
// All confidence intervals are built for a mean-type statistic that is
// asymptotically normal after studentization (S_n/n, the mean of q^t, or
// σ̂(B)) and then pushed through the increasing map from that mean to the
// parameter of interest.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rvspec/core_types.hpp"
#include "rvspec/numerics.hpp"

namespace rvspec {

// ---------------------------------------------------------------------------
// Regions of the unit sphere

inline Region full_sphere() {
  return [](std::span<const double>) { return true; };
}

inline Region empty_region() {
  return [](std::span<const double>) { return false; };
}

/// Polar angle of a planar direction, in [0, 2π).
inline double planar_angle(std::span<const double> u) {
  double angle = std::atan2(u[1], u[0]);
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  if (angle >= 2.0 * std::numbers::pi) angle = 0.0;
  return angle;
}

/// Directions with polar angle in [start, end). When start > end the arc
/// wraps through angle 0.
inline Region arc_region(double start, double end) {
  return [start, end](std::span<const double> u) {
    if (u.size() != 2) throw Error(ErrorCode::DimensionMismatch, "arc regions need d = 2");
    const double angle = planar_angle(u);
    if (start <= end) return start <= angle && angle < end;
    return angle >= start || angle < end;
  };
}

/// Directions θ with <θ, normal> > threshold.
inline Region halfspace_region(std::vector<double> normal, double threshold) {
  return [normal = std::move(normal), threshold](std::span<const double> u) {
    if (u.size() != normal.size()) {
      throw Error(ErrorCode::DimensionMismatch, "halfspace normal has wrong dimension");
    }
    double dot = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) dot += u[j] * normal[j];
    return dot > threshold;
  };
}

// ---------------------------------------------------------------------------
// Tail index

struct AlphaEstimate {
  double s_n = 0.0;
  double alpha_hat = 0.0;
  double kappa_var = 0.0;
  std::size_t n = 0;
  std::vector<std::string> warnings;

  /// S_n / n with its plug-in variance; estimates α/(1+α).
  NormalizedStat ratio_stat() const {
    return NormalizedStat{s_n / static_cast<double>(n), kappa_var, n};
  }
};

/// α̂ = S_n / (n - S_n) with S_n the sum of the ratios κ = M2/M1.
inline AlphaEstimate estimate_alpha(std::span<const GroupSummary> summaries) {
  if (summaries.empty()) throw Error(ErrorCode::EmptyInput, "no group summaries");
  AlphaEstimate est;
  est.n = summaries.size();
  for (const auto& g : summaries) est.s_n += g.kappa;
  const double n = static_cast<double>(est.n);
  if (est.s_n >= n) {
    throw Error(ErrorCode::AllKappaOne, "every group has tied maxima; alpha is undefined");
  }
  const double mean = est.s_n / n;
  double sq = 0.0;
  for (const auto& g : summaries) sq += (g.kappa - mean) * (g.kappa - mean);
  est.kappa_var = sq / n;
  est.alpha_hat = est.s_n / (n - est.s_n);
  if (est.s_n == 0.0) est.warnings.emplace_back("S_n = 0: every second-largest norm is zero");
  return est;
}

/// Interval for p = α/(1+α) mapped through p ↦ p/(1-p).
inline Interval alpha_ci(const AlphaEstimate& est, double level) {
  if (est.n < 2) throw Error(ErrorCode::PreconditionViolation, "alpha_ci needs n >= 2");
  if (!(est.kappa_var > 0.0)) throw Error(ErrorCode::ZeroVariance, "all kappa values are identical");
  const Interval p = est.ratio_stat().interval(level);
  const double p_lo = std::max(p.lo, 0.0);
  const auto to_alpha = [](double q) { return q / (1.0 - q); };
  return Interval{to_alpha(p_lo), p.hi >= 1.0 ? kInfinity : to_alpha(p.hi), level};
}

// ---------------------------------------------------------------------------
// Normalized spectral measure

inline SpectralEstimate estimate_spectral(std::span<const GroupSummary> summaries) {
  if (summaries.empty()) throw Error(ErrorCode::EmptyInput, "no group summaries");
  const std::size_t d = summaries.front().theta.size();
  std::vector<double> atoms;
  atoms.reserve(d * summaries.size());
  for (const auto& g : summaries) {
    if (g.theta.size() != d) throw Error(ErrorCode::DimensionMismatch, "mixed directions");
    atoms.insert(atoms.end(), g.theta.begin(), g.theta.end());
  }
  return SpectralEstimate(d, std::move(atoms));
}

/// Number of atoms inside `region`.
inline std::size_t spectral_count(const SpectralEstimate& est, const Region& region) {
  std::size_t inside = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (region(est.atom(i))) ++inside;
  }
  return inside;
}

inline double spectral_mass(const SpectralEstimate& est, const Region& region) {
  return static_cast<double>(spectral_count(est, region)) / static_cast<double>(est.size());
}

struct CdfPoint {
  double angle = 0.0;
  double value = 0.0;
};

/// cdf(θ) = σ̂{directions with polar angle in [0, θ]} on an ascending grid.
inline std::vector<CdfPoint> spectral_cdf_2d(const SpectralEstimate& est, std::span<const double> angles) {
  if (est.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "spectral cdf needs d = 2");
  if (!std::is_sorted(angles.begin(), angles.end())) {
    throw Error(ErrorCode::PreconditionViolation, "angle grid must be sorted ascending");
  }
  std::vector<double> atom_angles(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) atom_angles[i] = planar_angle(est.atom(i));
  std::sort(atom_angles.begin(), atom_angles.end());
  const double n = static_cast<double>(est.size());
  std::vector<CdfPoint> out;
  out.reserve(angles.size());
  for (double angle : angles) {
    const auto below = std::upper_bound(atom_angles.begin(), atom_angles.end(), angle) - atom_angles.begin();
    out.push_back({angle, static_cast<double>(below) / n});
  }
  return out;
}

/// Grid (k+1)·2π/size, k = 0..size-1, ending at 2π.
inline std::vector<double> uniform_angle_grid(std::size_t size) {
  std::vector<double> grid(size);
  for (std::size_t k = 0; k < size; ++k) {
    grid[k] = 2.0 * std::numbers::pi * static_cast<double>(k + 1) / static_cast<double>(size);
  }
  return grid;
}

/// p̂ ± z sqrt(p̂(1-p̂)/n), clamped to [0, 1].
inline Interval spectral_ci(const SpectralEstimate& est, const Region& region, double level) {
  if (est.size() < 2) throw Error(ErrorCode::PreconditionViolation, "spectral_ci needs n >= 2");
  const double p = spectral_mass(est, region);
  if (p <= 0.0 || p >= 1.0) {
    throw Error(ErrorCode::DegenerateProportion, "estimated mass is 0 or 1; the studentized statistic is undefined");
  }
  const Interval raw = NormalizedStat{p, p * (1.0 - p), est.size()}.interval(level);
  return Interval{std::max(raw.lo, 0.0), std::min(raw.hi, 1.0), level};
}

/// ρ̂ = σ̂{+1} - σ̂{-1} for univariate data.
inline double rho_1d(const SpectralEstimate& est) {
  if (est.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "rho needs d = 1");
  std::ptrdiff_t balance = 0;
  for (std::size_t i = 0; i < est.size(); ++i) balance += est.atom(i)[0] > 0.0 ? 1 : -1;
  return static_cast<double>(balance) / static_cast<double>(est.size());
}

// ---------------------------------------------------------------------------
// Total mass

struct TotalMassEstimate {
  double t = 0.0;
  double alpha_used = 0.0;
  bool alpha_plugin = false;
  double mean_qt = 0.0;
  double mean_q2t = 0.0;
  double var_qt = 0.0;
  double mass_hat = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::string> warnings;

  double gamma_factor() const { return gamma_fn(1.0 - t / alpha_used); }

  /// Maps a value of E q^t to the total mass it implies.
  double mass_from_mean(double mean) const {
    if (mean <= 0.0) return 0.0;
    return std::pow(mean / gamma_factor(), alpha_used / t);
  }
};

/// t = min(αr/4, 1) / 2, inside both the consistency range t < αr/2 and the
/// normality range t < αr/4 ∧ 1.
inline double default_t(double alpha, double r) {
  return 0.5 * std::min(alpha * r / 4.0, 1.0);
}

/// σ(S)^ = ((1/n) Σ q_i^t / Γ(1 - t/α))^{α/t} with q_i = M1_i / m^{1/α}.
inline TotalMassEstimate estimate_total_mass(std::span<const GroupSummary> summaries,
                                             const GroupScheme& scheme, double alpha, double t) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::InvalidAlpha, "alpha must be positive");
  if (!(t > 0.0) || !(t < alpha / 2.0)) throw Error(ErrorCode::InvalidT, "t must lie in (0, alpha/2)");
  if (summaries.empty()) throw Error(ErrorCode::EmptyInput, "no group summaries");
  if (scheme.m < 2) throw Error(ErrorCode::PreconditionViolation, "total mass needs m >= 2");

  TotalMassEstimate est;
  est.t = t;
  est.alpha_used = alpha;
  est.n = summaries.size();
  est.m = scheme.m;
  const double norming = std::pow(static_cast<double>(scheme.m), 1.0 / alpha);
  std::vector<double> qt;
  qt.reserve(summaries.size());
  for (const auto& g : summaries) qt.push_back(std::pow(g.m1 / norming, t));

  const double n = static_cast<double>(est.n);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : qt) {
    sum += v;
    sum_sq += v * v;
  }
  est.mean_qt = sum / n;
  est.mean_q2t = sum_sq / n;
  double centered = 0.0;
  for (double v : qt) centered += (v - est.mean_qt) * (v - est.mean_qt);
  est.var_qt = centered / n;
  est.mass_hat = est.mass_from_mean(est.mean_qt);
  if (t >= alpha * scheme.r / 2.0) {
    est.warnings.emplace_back("t >= alpha*r/2: outside the range where the mass estimator is known to be consistent");
  }
  return est;
}

/// Interval for E q^t mapped through x ↦ (x / Γ(1 - t/α))^{α/t}; the lower
/// endpoint is floored at 0.
inline Interval total_mass_ci(const TotalMassEstimate& est, double level) {
  if (est.n < 2) throw Error(ErrorCode::PreconditionViolation, "total_mass_ci needs n >= 2");
  if (!(est.var_qt > 0.0)) throw Error(ErrorCode::ZeroVariance, "all q^t values are identical");
  const Interval a = NormalizedStat{est.mean_qt, est.var_qt, est.n}.interval(level);
  return Interval{est.mass_from_mean(a.lo), est.mass_from_mean(a.hi), level};
}

}  // namespace rvspec
