#pragma once

// Seeded generators of regularly varying samples with known tail index and
// spectral measure.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "rvspec/core_types.hpp"
#include "rvspec/numerics.hpp"
#include "rvspec/random.hpp"

namespace rvspec {

inline constexpr std::size_t kDensityGridCells = 4096;
inline constexpr std::size_t kDefaultDiscretizationAtoms = 100;

/// Draws directions from the normalized angular part of a model.
class DirectionSampler {
 public:
  explicit DirectionSampler(const ModelSpec& model) : dim_(model.dim()) {
    if (model.has_atoms()) {
      for (const auto& atom : model.atoms()) {
        directions_.insert(directions_.end(), atom.direction.begin(), atom.direction.end());
        push_cumulative(atom.weight);
      }
    } else {
      const auto& f = model.density().f;
      cell_width_ = 2.0 * std::numbers::pi / kDensityGridCells;
      constexpr int kSubPoints = 8;
      for (std::size_t k = 0; k < kDensityGridCells; ++k) {
        double mass = 0.0;
        for (int s = 0; s < kSubPoints; ++s) {
          const double value = f((static_cast<double>(k) + (s + 0.5) / kSubPoints) * cell_width_);
          if (value < 0.0) throw Error(ErrorCode::InvalidDensity, "density is negative");
          mass += value;
        }
        push_cumulative(mass * cell_width_ / kSubPoints);
      }
    }
    if (!(cumulative_.back() > 0.0)) throw Error(ErrorCode::InvalidModel, "angular part has zero mass");
  }

  std::size_t dim() const noexcept { return dim_; }

  /// Writes one unit vector into `out` (size dim()).
  void draw(SeededRng& rng, std::span<double> out) const {
    const double target = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if (it == cumulative_.end()) --it;
    const auto k = static_cast<std::size_t>(it - cumulative_.begin());
    if (!directions_.empty()) {
      std::copy_n(directions_.begin() + static_cast<std::ptrdiff_t>(k * dim_), dim_, out.begin());
      return;
    }
    // piecewise-linear inverse cdf inside the selected cell
    const double below = k == 0 ? 0.0 : cumulative_[k - 1];
    const double cell_mass = cumulative_[k] - below;
    const double fraction = cell_mass > 0.0 ? std::clamp((target - below) / cell_mass, 0.0, 1.0) : 0.5;
    const double angle = (static_cast<double>(k) + fraction) * cell_width_;
    out[0] = std::cos(angle);
    out[1] = std::sin(angle);
  }

 private:
  void push_cumulative(double mass) {
    cumulative_.push_back((cumulative_.empty() ? 0.0 : cumulative_.back()) + mass);
  }

  std::size_t dim_;
  std::vector<double> directions_;
  std::vector<double> cumulative_;
  double cell_width_ = 0.0;
};

/// X = R·Θ with P(R > x) = σ(S) x^{-α} for x >= σ(S)^{1/α} and Θ ~ σ̃
/// independent of R. The regular-variation limit then holds exactly.
inline DataMatrix sample_polar(const ModelSpec& model, std::size_t sample_size, SeededRng& rng) {
  const DirectionSampler directions(model);
  const std::size_t d = directions.dim();
  const double floor_radius = std::pow(model.total_mass(), 1.0 / model.alpha());
  const double inv_alpha = 1.0 / model.alpha();
  std::vector<double> values(sample_size * d);
  for (std::size_t i = 0; i < sample_size; ++i) {
    const double radius = floor_radius * std::pow(rng.uniform_open(), -inv_alpha);
    const std::span<double> row(values.data() + i * d, d);
    directions.draw(rng, row);
    for (double& x : row) x *= radius;
  }
  return DataMatrix(sample_size, d, std::move(values));
}

/// Largest of m polar radii, drawn from its exact law: the smallest of m
/// uniforms is 1 - V^{1/m}.
inline std::vector<double> sample_polar_group_maxima(const ModelSpec& model, std::size_t m,
                                                     std::size_t count, SeededRng& rng) {
  if (m == 0) throw Error(ErrorCode::PreconditionViolation, "group size must be positive");
  const double floor_radius = std::pow(model.total_mass(), 1.0 / model.alpha());
  const double inv_m = 1.0 / static_cast<double>(m);
  std::vector<double> out(count);
  for (double& value : out) {
    const double smallest_uniform = -std::expm1(std::log(rng.uniform_open()) * inv_m);
    value = floor_radius * std::pow(smallest_uniform, -1.0 / model.alpha());
  }
  return out;
}

/// Tail constant of a strictly stable law: for X ~ S_α(1, β, 0),
/// P(X > x) ~ C_α (1+β)/2 x^{-α}, with C_α = (1-α) / (Γ(2-α) cos(πα/2)).
inline double stable_tail_constant(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0) {
    throw Error(ErrorCode::UnsupportedAlpha, "stable tail constant needs alpha in (0,2), alpha != 1");
  }
  return (1.0 - alpha) / (gamma_fn(2.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0));
}

/// S_α(1, skew, 0) variates by the Chambers-Mallows-Stuck method (α != 1).
class StandardStable {
 public:
  StandardStable(double alpha, double skew) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0) {
      throw Error(ErrorCode::UnsupportedAlpha, "stable generation needs alpha in (0,2), alpha != 1");
    }
    const double tan_term = skew * std::tan(std::numbers::pi * alpha / 2.0);
    shift_ = std::atan(tan_term) / alpha;
    scale_ = std::pow(1.0 + tan_term * tan_term, 1.0 / (2.0 * alpha));
    inv_alpha_ = 1.0 / alpha;
    tail_power_ = (1.0 - alpha) / alpha;
  }

  double operator()(SeededRng& rng) const {
    const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
    const double w = rng.exponential();
    const double shifted = alpha_ * (v + shift_);
    return scale_ * std::sin(shifted) / std::pow(std::cos(v), inv_alpha_) *
           std::pow(std::cos(v - shifted) / w, tail_power_);
  }

 private:
  double alpha_;
  double shift_ = 0.0;
  double scale_ = 1.0;
  double inv_alpha_ = 1.0;
  double tail_power_ = 0.0;
};

/// Univariate strictly stable sample with P(X > x) ~ σ(S)(1+ρ)/2 x^{-α} and
/// P(X < -x) ~ σ(S)(1-ρ)/2 x^{-α}.
inline DataMatrix sample_stable_1d(double alpha, double rho, double total_mass, std::size_t sample_size,
                                   SeededRng& rng) {
  if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0) {
    throw Error(ErrorCode::UnsupportedAlpha, "stable generation needs alpha in (0,2), alpha != 1");
  }
  if (!(rho >= -1.0 && rho <= 1.0)) throw Error(ErrorCode::InvalidModel, "rho must lie in [-1,1]");
  if (!(total_mass > 0.0)) throw Error(ErrorCode::InvalidModel, "total mass must be positive");
  const double gamma_scale = std::pow(total_mass / stable_tail_constant(alpha), 1.0 / alpha);
  const StandardStable stable(alpha, rho);
  std::vector<double> values(sample_size);
  for (double& x : values) x = gamma_scale * stable(rng);
  return DataMatrix(sample_size, 1, std::move(values));
}

/// X = Σ_j s_j Z_j with independent totally skewed positive stable Z_j whose
/// upper tails carry weight w_j; X is strictly α-stable with spectral measure
/// Σ w_j δ_{s_j}.
inline DataMatrix sample_stable_vector(double alpha, std::span<const SpectralAtom> atoms,
                                       std::size_t sample_size, SeededRng& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::UnsupportedAlpha, "multivariate stable generation needs 0 < alpha < 1");
  }
  if (atoms.empty()) throw Error(ErrorCode::InvalidModel, "atom list is empty");
  const std::size_t d = atoms.front().direction.size();
  const double c_alpha = stable_tail_constant(alpha);
  const StandardStable stable(alpha, 1.0);
  std::vector<double> scales;
  scales.reserve(atoms.size());
  for (const auto& atom : atoms) {
    if (atom.direction.size() != d) throw Error(ErrorCode::InvalidModel, "atoms must share one dimension");
    if (!(atom.weight > 0.0)) throw Error(ErrorCode::InvalidModel, "atom weight must be positive");
    scales.push_back(std::pow(atom.weight / c_alpha, 1.0 / alpha));
  }
  std::vector<double> values(sample_size * d, 0.0);
  for (std::size_t i = 0; i < sample_size; ++i) {
    double* row = values.data() + i * d;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const double z = scales[j] * stable(rng);
      for (std::size_t k = 0; k < d; ++k) row[k] += z * atoms[j].direction[k];
    }
  }
  return DataMatrix(sample_size, d, std::move(values));
}

/// K atoms at the cell midpoints (k+1/2)2π/K, weighted by the 128-point
/// midpoint integral of f over each cell and rescaled to total_mass.
inline std::vector<SpectralAtom> discretize_angular_density(const std::function<double(double)>& f,
                                                            double total_mass, std::size_t cells) {
  if (cells < 4) throw Error(ErrorCode::PreconditionViolation, "need at least 4 cells");
  if (!(total_mass > 0.0)) throw Error(ErrorCode::InvalidModel, "total mass must be positive");
  constexpr int kPoints = 128;
  const double width = 2.0 * std::numbers::pi / static_cast<double>(cells);
  std::vector<SpectralAtom> atoms;
  atoms.reserve(cells);
  double sum = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    double integral = 0.0;
    for (int s = 0; s < kPoints; ++s) {
      const double value = f((static_cast<double>(k) + (s + 0.5) / kPoints) * width);
      if (value < 0.0 || !std::isfinite(value)) throw Error(ErrorCode::InvalidDensity, "density is negative or not finite");
      integral += value;
    }
    integral *= width / kPoints;
    const double mid = (static_cast<double>(k) + 0.5) * width;
    atoms.push_back({{std::cos(mid), std::sin(mid)}, integral});
    sum += integral;
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::InvalidDensity, "density has zero mass");
  for (auto& atom : atoms) atom.weight *= total_mass / sum;
  // drop zero-mass cells; the remaining weights still sum to total_mass
  std::erase_if(atoms, [](const SpectralAtom& atom) { return !(atom.weight > 0.0); });
  return atoms;
}

}  // namespace rvspec
