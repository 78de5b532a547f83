#pragma once

// Partition of a sample into n contiguous groups of m vectors and the
// per-group maxima statistics.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "rvspec/core_types.hpp"
#include "rvspec/random.hpp"

namespace rvspec {

inline constexpr std::size_t kMinGroupSize = 2;

namespace detail {

inline std::size_t group_count(std::size_t sample_size, double r) {
  const double power = std::pow(static_cast<double>(sample_size), r);
  // N^r may land a few ulps below an exact integer.
  const double nearest = std::round(power);
  const double groups = std::abs(power - nearest) <= 1e-9 * nearest ? nearest : std::floor(power);
  return std::max<std::size_t>(1, static_cast<std::size_t>(groups));
}

}  // namespace detail

/// n = ⌊N^r⌋, m = ⌊N/n⌋. Rejects plans whose groups are smaller than
/// `min_group_size` (2 by default, so that a second-largest norm exists).
inline GroupScheme plan_grouping(std::size_t sample_size, double r,
                                 std::size_t min_group_size = kMinGroupSize) {
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::InvalidR, "r must lie in (0,1)");
  if (sample_size < 4) {
    throw Error(ErrorCode::PreconditionViolation, "grouping needs at least 4 sample vectors");
  }
  const std::size_t n = detail::group_count(sample_size, r);
  const std::size_t m = sample_size / n;
  if (m < std::max<std::size_t>(1, min_group_size)) {
    throw Error(ErrorCode::GroupTooSmall, "group size " + std::to_string(m) + " for N=" +
                                              std::to_string(sample_size) + ", r=" + std::to_string(r));
  }
  return GroupScheme{r, n, m, sample_size - n * m};
}

/// Plan with explicitly chosen n and m; r is reported as log n / log N.
inline GroupScheme exact_grouping(std::size_t sample_size, std::size_t n, std::size_t m) {
  if (n == 0 || m == 0 || n * m > sample_size) {
    throw Error(ErrorCode::PreconditionViolation, "n*m must be positive and at most N");
  }
  const double r = sample_size > 1 ? std::log(static_cast<double>(n)) / std::log(static_cast<double>(sample_size)) : 0.0;
  return GroupScheme{r, n, m, sample_size - n * m};
}

/// Largest r' <= r for which plan_grouping(N, r') has m >= min_group_size.
inline double feasible_r(std::size_t sample_size, double r, std::size_t min_group_size = kMinGroupSize) {
  const std::size_t max_groups = sample_size / min_group_size;
  if (max_groups < 1) throw Error(ErrorCode::GroupTooSmall, "sample too small for any grouping");
  double candidate = std::min(r, std::log(static_cast<double>(max_groups)) / std::log(static_cast<double>(sample_size)));
  while (candidate > 0.0) {
    if (sample_size / detail::group_count(sample_size, candidate) >= min_group_size) return candidate;
    candidate -= 1e-9;
  }
  throw Error(ErrorCode::GroupTooSmall, "no feasible r");
}

/// Statistics of a single group: lowest index wins among tied maximal norms,
/// and M2 is the largest norm after removing that one vector.
inline GroupSummary summarize_group(const DataMatrix& data, std::size_t first_row, std::size_t m) {
  GroupSummary summary;
  double best = -1.0;
  double second = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double norm = euclidean_norm(data.row(first_row + k));
    if (norm > best) {
      if (best >= 0.0) second = best;
      best = norm;
      summary.argmax_index = k;
    } else if (norm > second) {
      second = norm;
    }
  }
  if (!(best > 0.0)) {
    throw Error(ErrorCode::DegenerateGroup,
                "group starting at row " + std::to_string(first_row) + " has zero maximum norm");
  }
  summary.m1 = best;
  summary.m2 = second;
  summary.kappa = second / best;
  const auto argmax = data.row(first_row + summary.argmax_index);
  summary.theta.resize(argmax.size());
  for (std::size_t j = 0; j < argmax.size(); ++j) summary.theta[j] = argmax[j] / best;
  return summary;
}

/// Group i covers rows i*m .. i*m+m-1; the trailing `discarded` rows are
/// dropped.
inline std::vector<GroupSummary> summarize_groups(const DataMatrix& data, const GroupScheme& scheme) {
  if (scheme.sample_size() != data.rows()) {
    throw Error(ErrorCode::PreconditionViolation, "grouping scheme was planned for a different N");
  }
  std::vector<GroupSummary> out;
  out.reserve(scheme.n);
  for (std::size_t i = 0; i < scheme.n; ++i) {
    out.push_back(summarize_group(data, i * scheme.m, scheme.m));
  }
  return out;
}

/// Seeded Fisher-Yates permutation of the rows.
inline DataMatrix shuffled_rows(const DataMatrix& data, SeededRng& rng) {
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  std::vector<double> values;
  values.reserve(data.values().size());
  for (std::size_t i : order) {
    const auto row = data.row(i);
    values.insert(values.end(), row.begin(), row.end());
  }
  return DataMatrix(data.rows(), data.dim(), std::move(values));
}

}  // namespace rvspec
