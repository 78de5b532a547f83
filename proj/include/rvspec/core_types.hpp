#pragma once

// Shared domain types for group-maxima estimation of regularly varying data.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rvspec/error.hpp"
#include "rvspec/numerics.hpp"

namespace rvspec {

inline constexpr double kUnitNormTolerance = 1e-12;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// N sample vectors in R^d, stored row-major.
class DataMatrix {
 public:
  DataMatrix() = default;

  DataMatrix(std::size_t rows, std::size_t dim, std::vector<double> values)
      : rows_(rows), dim_(dim), values_(std::move(values)) {
    if (values_.size() != rows_ * dim_) {
      throw Error(ErrorCode::DimensionMismatch, "value count does not equal rows * dim");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(values_).subspan(i * dim_, dim_);
  }

  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * dim_ + j]; }

  /// Returns a copy with every entry multiplied by `factor`.
  DataMatrix scaled(double factor) const {
    std::vector<double> out(values_);
    for (double& v : out) v *= factor;
    return DataMatrix(rows_, dim_, std::move(out));
  }

  friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

/// Returns `data` unchanged when it is nonempty, has d >= 1 and only finite
/// entries.
inline const DataMatrix& validate_data(const DataMatrix& data) {
  if (data.rows() == 0) {
    throw Error(ErrorCode::EmptySample, "sample has no rows");
  }
  if (data.dim() == 0) {
    throw Error(ErrorCode::EmptySample, "sample vectors have dimension 0");
  }
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.dim(); ++j) {
      if (!std::isfinite(data(i, j))) throw NonFiniteEntryError(i, j);
    }
  }
  return data;
}

inline double euclidean_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

/// Partition plan: n groups of m consecutive rows, the trailing
/// `discarded` rows unused.
struct GroupScheme {
  double r = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t discarded = 0;

  std::size_t sample_size() const noexcept { return n * m + discarded; }
  bool degenerate() const noexcept { return n < 2; }

  friend bool operator==(const GroupScheme&, const GroupScheme&) = default;
};

/// Largest and second-largest norm of one group and the direction of the
/// maximizing vector.
struct GroupSummary {
  double m1 = 0.0;
  double m2 = 0.0;
  double kappa = 0.0;
  std::vector<double> theta;
  std::size_t argmax_index = 0;
};

/// Signature of a region of the unit sphere.
using Region = std::function<bool(std::span<const double>)>;

/// The atomic probability measure (1/n) Σ δ_θ.
class SpectralEstimate {
 public:
  SpectralEstimate(std::size_t dim, std::vector<double> atoms)
      : dim_(dim), atoms_(std::move(atoms)) {
    if (dim_ == 0 || atoms_.empty() || atoms_.size() % dim_ != 0) {
      throw Error(ErrorCode::EmptyInput, "spectral estimate needs at least one atom");
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return atoms_.size() / dim_; }
  double weight() const noexcept { return 1.0 / static_cast<double>(size()); }

  std::span<const double> atom(std::size_t i) const noexcept {
    return std::span<const double>(atoms_).subspan(i * dim_, dim_);
  }

 private:
  std::size_t dim_;
  std::vector<double> atoms_;
};

struct Interval {
  double lo = -kInfinity;
  double hi = kInfinity;
  double level = 0.95;

  double width() const noexcept { return hi - lo; }
  double half_width() const noexcept { return 0.5 * (hi - lo); }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// A mean-type statistic together with its plug-in variance, so that
/// sqrt(n) (point - target) / sqrt(variance_hat) is asymptotically N(0,1).
struct NormalizedStat {
  double point = 0.0;
  double variance_hat = 0.0;
  std::size_t n = 0;

  double standard_error() const {
    return std::sqrt(variance_hat / static_cast<double>(n));
  }

  double studentized(double target) const { return (point - target) / standard_error(); }

  /// Symmetric normal interval point ± z·se.
  Interval interval(double level) const {
    const double half = two_sided_z(level) * standard_error();
    return Interval{point - half, point + half, level};
  }
};

struct SpectralAtom {
  std::vector<double> direction;
  double weight = 0.0;
};

/// Angular density on [0, 2π) for planar models.
struct AngularDensity {
  std::function<double(double)> f;
};

/// Ground-truth regularly varying model with L ≡ 1.
class ModelSpec {
 public:
  static constexpr std::size_t kDensityQuadratureCells = 1 << 16;

  ModelSpec(double alpha, double total_mass, std::vector<SpectralAtom> atoms,
            double beta = kInfinity)
      : alpha_(alpha), beta_(beta), total_mass_(total_mass), angular_(std::move(atoms)) {
    check_exponents();
    const auto& list = std::get<std::vector<SpectralAtom>>(angular_);
    if (list.empty()) throw Error(ErrorCode::InvalidModel, "atom list is empty");
    const std::size_t d = list.front().direction.size();
    double sum = 0.0;
    for (const auto& atom : list) {
      if (atom.direction.size() != d || d == 0) {
        throw Error(ErrorCode::InvalidModel, "atoms must share one positive dimension");
      }
      if (std::abs(euclidean_norm(atom.direction) - 1.0) > kUnitNormTolerance) {
        throw Error(ErrorCode::InvalidModel, "atom direction is not a unit vector");
      }
      if (!(atom.weight > 0.0)) throw Error(ErrorCode::InvalidModel, "atom weight must be positive");
      sum += atom.weight;
    }
    if (std::abs(sum - total_mass_) > 1e-9) {
      throw Error(ErrorCode::InvalidModel, "atom weights do not sum to the total mass");
    }
  }

  ModelSpec(double alpha, double total_mass, AngularDensity density, double beta = kInfinity)
      : alpha_(alpha), beta_(beta), total_mass_(total_mass), angular_(std::move(density)) {
    check_exponents();
    const auto& f = std::get<AngularDensity>(angular_).f;
    if (!f) throw Error(ErrorCode::InvalidModel, "density function is empty");
    const double integral = integrate_density(0.0, 2.0 * std::numbers::pi);
    if (std::abs(integral - total_mass_) > 1e-6) {
      throw Error(ErrorCode::InvalidModel, "density does not integrate to the total mass");
    }
  }

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double total_mass() const noexcept { return total_mass_; }

  /// Optional constants of the second-order tail P(|X| > x) = C1 x^-α + C2 x^-β + o(x^-β).
  ModelSpec& set_second_order_constants(double c1, double c2) {
    c1_ = c1;
    c2_ = c2;
    return *this;
  }
  std::optional<double> c1() const noexcept { return c1_; }
  std::optional<double> c2() const noexcept { return c2_; }

  bool has_atoms() const noexcept { return std::holds_alternative<std::vector<SpectralAtom>>(angular_); }
  bool has_density() const noexcept { return std::holds_alternative<AngularDensity>(angular_); }
  const std::vector<SpectralAtom>& atoms() const { return std::get<std::vector<SpectralAtom>>(angular_); }
  const AngularDensity& density() const { return std::get<AngularDensity>(angular_); }

  std::size_t dim() const {
    return has_atoms() ? atoms().front().direction.size() : std::size_t{2};
  }

  /// Midpoint-rule integral of the density over [from, to].
  double integrate_density(double from, double to) const {
    const auto& f = density().f;
    const double span = to - from;
    if (span <= 0.0) return 0.0;
    const auto cells = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(kDensityQuadratureCells * span / (2.0 * std::numbers::pi))));
    const double h = span / static_cast<double>(cells);
    double sum = 0.0;
    for (std::size_t k = 0; k < cells; ++k) {
      sum += f(from + (static_cast<double>(k) + 0.5) * h);
    }
    return sum * h;
  }

  /// True normalized spectral mass σ̃(region).
  double normalized_mass(const Region& region) const {
    if (has_atoms()) {
      double inside = 0.0;
      for (const auto& atom : atoms()) {
        if (region(atom.direction)) inside += atom.weight;
      }
      return inside / total_mass_;
    }
    const auto& f = density().f;
    const double h = 2.0 * std::numbers::pi / kDensityQuadratureCells;
    double inside = 0.0;
    std::array<double, 2> u{};
    for (std::size_t k = 0; k < kDensityQuadratureCells; ++k) {
      const double angle = (static_cast<double>(k) + 0.5) * h;
      u = {std::cos(angle), std::sin(angle)};
      if (region(u)) inside += f(angle);
    }
    return inside * h / total_mass_;
  }

  /// ρ = (σ{+e1} - σ{-e1}) / σ(S) for models whose atoms all lie on ±e1.
  double rho() const {
    if (!has_atoms()) throw Error(ErrorCode::DimensionMismatch, "rho needs an atomic model");
    double plus = 0.0;
    double minus = 0.0;
    for (const auto& atom : atoms()) {
      const auto& u = atom.direction;
      for (std::size_t j = 1; j < u.size(); ++j) {
        if (u[j] != 0.0) throw Error(ErrorCode::DimensionMismatch, "rho needs atoms on the first axis");
      }
      (u[0] > 0.0 ? plus : minus) += atom.weight;
    }
    return (plus - minus) / total_mass_;
  }

 private:
  void check_exponents() const {
    if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
      throw Error(ErrorCode::InvalidModel, "tail index must be positive");
    }
    if (!(beta_ > alpha_)) throw Error(ErrorCode::InvalidModel, "second-order exponent must exceed alpha");
    if (!(total_mass_ > 0.0) || !std::isfinite(total_mass_)) {
      throw Error(ErrorCode::InvalidModel, "total mass must be positive");
    }
  }

  double alpha_;
  double beta_;
  double total_mass_;
  std::variant<std::vector<SpectralAtom>, AngularDensity> angular_;
  std::optional<double> c1_;
  std::optional<double> c2_;
};

}  // namespace rvspec
