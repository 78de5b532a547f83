#pragma once

// Rate-optimal choice of the grouping exponent r (n = N^r groups) and of
// the mass exponent t from the tail index α and the second-order index β.

#include <algorithm>
#include <cmath>
#include <string>

#include "rvspec/core_types.hpp"

namespace rvspec {

inline constexpr double kDefaultEpsilon = 0.05;

namespace detail {

inline void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) {
    throw Error(ErrorCode::PreconditionViolation, "epsilon must lie in [0, 1/2)");
  }
}

inline void check_second_order(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::InvalidAlpha, "alpha must be positive");
  if (!(beta > alpha)) throw Error(ErrorCode::InvalidSecondOrder, "beta must exceed alpha");
}

inline double rate_split(double zeta) { return 2.0 * zeta / (1.0 + 2.0 * zeta); }

inline double checked_r(double r, const char* what) {
  if (!(r > 0.0 && r < 1.0)) {
    throw Error(ErrorCode::InvalidSecondOrder, std::string(what) + ": epsilon leaves no admissible r");
  }
  return r;
}

}  // namespace detail

/// Tail-index rule: r = 2ζ/(1+2ζ) - ε with ζ = (β-α)/α; β = ∞ gives 1 - ε.
inline double optimal_r_alpha(double alpha, double beta, double epsilon = kDefaultEpsilon) {
  detail::check_second_order(alpha, beta);
  detail::check_epsilon(epsilon);
  if (std::isinf(beta)) return detail::checked_r(1.0 - epsilon, "optimal_r_alpha");
  const double zeta = (beta - alpha) / alpha;
  return detail::checked_r(std::min(detail::rate_split(zeta) - epsilon, 1.0 - epsilon), "optimal_r_alpha");
}

/// Spectral rule: as optimal_r_alpha but with ζ = min((β-α)/α, 1).
inline double optimal_r_spectral(double alpha, double beta, double epsilon = kDefaultEpsilon) {
  detail::check_second_order(alpha, beta);
  detail::check_epsilon(epsilon);
  const double zeta = std::isinf(beta) ? 1.0 : std::min((beta - alpha) / alpha, 1.0);
  return detail::checked_r(detail::rate_split(zeta) - epsilon, "optimal_r_spectral");
}

/// Total-mass rule, defined for β > α + 1:
///   β > 11α/8 + 1:  r = 1/2 - ε
///   otherwise:      r = (3α - 4(β-1) + sqrt(16(β-1)² - 8α(β-1) - 7α²)) / (2α) - ε
inline double optimal_r_mass(double alpha, double beta, double epsilon = kDefaultEpsilon) {
  detail::check_second_order(alpha, beta);
  detail::check_epsilon(epsilon);
  if (!(beta > alpha + 1.0)) throw Error(ErrorCode::InvalidSecondOrder, "mass tuning needs beta > alpha + 1");
  if (beta > 11.0 / 8.0 * alpha + 1.0) return detail::checked_r(0.5 - epsilon, "optimal_r_mass");
  const double b1 = beta - 1.0;
  const double radicand = 16.0 * b1 * b1 - 8.0 * alpha * b1 - 7.0 * alpha * alpha;
  // (4b1 - 7α)(4b1 + α) with b1 > α is strictly positive
  if (!(radicand > 0.0)) throw Error(ErrorCode::DomainError, "negative discriminant in mass tuning");
  const double r = (3.0 * alpha - 4.0 * b1 + std::sqrt(radicand)) / (2.0 * alpha);
  return detail::checked_r(r - epsilon, "optimal_r_mass");
}

enum class TCase { A, B };

struct AdmissibleT {
  double t_max = 0.0;              // normality bound
  double t_max_consistency = 0.0;  // αr/2
  TCase case_label = TCase::A;
};

/// Upper bounds on t for asymptotic normality (case a or b) and consistency.
inline AdmissibleT admissible_t(double alpha, double beta, double r) {
  detail::check_second_order(alpha, beta);
  if (!(beta > alpha + 1.0)) throw Error(ErrorCode::InvalidSecondOrder, "t bounds need beta > alpha + 1");
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::InvalidR, "r must lie in (0,1)");
  AdmissibleT out;
  out.t_max_consistency = alpha * r / 2.0;
  const double lower = 11.0 / 8.0 * alpha + 1.0;
  const double upper = 1.5 * alpha + 1.0;
  if (beta <= lower || beta >= upper) {
    out.case_label = TCase::A;
    out.t_max = std::min(alpha * r / 4.0, 1.0);
  } else {
    out.case_label = TCase::B;
    out.t_max = std::min((3.0 * alpha + 2.0 - 2.0 * beta) / 2.0, 1.0);
  }
  return out;
}

struct TuningPlan {
  double zeta = 0.0;
  double epsilon = kDefaultEpsilon;
  double r_alpha = 0.0;
  double r_mass = 0.0;
  double r_spectral = 0.0;
  double t_max_consistency = 0.0;
  double t_max_normality = 0.0;
  double t_default = 0.0;
  // false when β <= α + 1: r_mass then falls back to 1/2 - ε and the mass
  // interval has no normality guarantee
  bool mass_rule_applies = true;
};

inline TuningPlan make_tuning_plan(double alpha, double beta, double epsilon = kDefaultEpsilon) {
  TuningPlan plan;
  plan.epsilon = epsilon;
  plan.zeta = std::isinf(beta) ? kInfinity : (beta - alpha) / alpha;
  plan.r_alpha = optimal_r_alpha(alpha, beta, epsilon);
  plan.r_spectral = optimal_r_spectral(alpha, beta, epsilon);
  plan.mass_rule_applies = beta > alpha + 1.0;
  if (plan.mass_rule_applies) {
    plan.r_mass = optimal_r_mass(alpha, beta, epsilon);
    const AdmissibleT bounds = admissible_t(alpha, beta, plan.r_mass);
    plan.t_max_normality = bounds.t_max;
    plan.t_max_consistency = bounds.t_max_consistency;
  } else {
    plan.r_mass = 0.5 - epsilon;
    plan.t_max_normality = std::min(alpha * plan.r_mass / 4.0, 1.0);
    plan.t_max_consistency = alpha * plan.r_mass / 2.0;
  }
  plan.t_default = std::min(0.5 * std::min(alpha * plan.r_mass / 4.0, 1.0), 0.5 * plan.t_max_normality);
  return plan;
}

}  // namespace rvspec
