#pragma once

// Time-series primitives shared by the trend tests, the indicator pipeline
// and the surrogate test. Everything here is a pure function of its input and
// accepts any Eigen column-vector expression.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "mkews/errors.hpp"

namespace mkews {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// 1-based ranks aligned with the values they were computed from.
using RankVector = Eigen::Matrix<Index, Eigen::Dynamic, 1>;

/// Ordered real-valued observations x_1..x_n.
template <typename Scalar>
struct TimeSeries {
  Vector<Scalar> values;
  std::optional<Scalar> dt;
  std::optional<std::string> label;

  Index size() const { return values.size(); }
};

using Series = TimeSeries<double>;

namespace detail {

template <typename Derived>
void require_length(const Eigen::MatrixBase<Derived>& x, Index min_length, const char* op) {
  if (x.size() < min_length) {
    throw RangeError(std::string(op) + ": series length " + std::to_string(x.size()) +
                     " below minimum " + std::to_string(min_length));
  }
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& x, const char* op) {
  if (!x.derived().array().isFinite().all()) {
    throw RangeError(std::string(op) + ": series contains NaN or Inf");
  }
}

/// Indices that sort x ascending.
template <typename Derived>
std::vector<Index> argsort(const Eigen::MatrixBase<Derived>& x) {
  std::vector<Index> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return x(a) < x(b); });
  return order;
}

template <typename Scalar>
Scalar median_in_place(std::vector<Scalar>& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const Scalar upper = v[mid];
  if (n % 2 == 1) return upper;
  const Scalar lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / Scalar(2);
}

}  // namespace detail

/// True when any two values compare equal.
template <typename Derived>
bool has_ties(const Eigen::MatrixBase<Derived>& x) {
  Vector<typename Derived::Scalar> sorted = x;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  return std::adjacent_find(sorted.data(), sorted.data() + sorted.size()) !=
         sorted.data() + sorted.size();
}

/// ranks[i] = |{j : x[j] <= x[i]}|. Throws TieError on equal values.
template <typename Derived>
RankVector ranks(const Eigen::MatrixBase<Derived>& x) {
  detail::require_finite(x, "ranks");
  const auto order = detail::argsort(x);
  RankVector out(x.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && x(order[k]) == x(order[k - 1])) {
      throw TieError("ranks: tied values at indices " + std::to_string(order[k - 1] + 1) +
                     " and " + std::to_string(order[k] + 1));
    }
    out(order[k]) = static_cast<Index>(k) + 1;
  }
  return out;
}

/// Average ranks: tied values share the mean of the ranks they span.
template <typename Derived>
Vector<double> midranks(const Eigen::MatrixBase<Derived>& x) {
  detail::require_finite(x, "midranks");
  const auto order = detail::argsort(x);
  Vector<double> out(x.size());
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t end = k + 1;
    while (end < order.size() && x(order[end]) == x(order[k])) ++end;
    const double rank = 0.5 * static_cast<double>(k + 1 + end);
    for (std::size_t j = k; j < end; ++j) out(order[j]) = rank;
    k = end;
  }
  return out;
}

/// Biased (divide-by-n) sample autocorrelation at the given lag, single mean.
template <typename Derived>
typename Derived::Scalar autocorr(const Eigen::MatrixBase<Derived>& x, Index lag) {
  using Scalar = typename Derived::Scalar;
  const Index n = x.size();
  if (lag < 1 || lag >= n) {
    throw RangeError("autocorr: lag " + std::to_string(lag) + " outside [1, " +
                     std::to_string(n - 1) + "]");
  }
  const Vector<Scalar> centered = x.array() - x.mean();
  const Scalar denom = centered.squaredNorm();
  if (denom == Scalar(0)) throw DegenerateError("autocorr: constant series");
  return centered.head(n - lag).dot(centered.tail(n - lag)) / denom;
}

/// Autocorrelations at lags 1..max_lag; element k-1 holds lag k.
template <typename Derived>
Vector<typename Derived::Scalar> autocorr_function(const Eigen::MatrixBase<Derived>& x,
                                                   Index max_lag) {
  using Scalar = typename Derived::Scalar;
  const Index n = x.size();
  if (max_lag < 1 || max_lag >= n) {
    throw RangeError("autocorr_function: max lag outside [1, n-1]");
  }
  const Vector<Scalar> centered = x.array() - x.mean();
  const Scalar denom = centered.squaredNorm();
  if (denom == Scalar(0)) throw DegenerateError("autocorr: constant series");
  Vector<Scalar> acf(max_lag);
  for (Index lag = 1; lag <= max_lag; ++lag) {
    acf(lag - 1) = centered.head(n - lag).dot(centered.tail(n - lag)) / denom;
  }
  return acf;
}

/// Median of pairwise slopes (x_j - x_i) / (j - i) over i < j.
template <typename Derived>
typename Derived::Scalar theil_sen_slope(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  detail::require_length(x, 2, "theil_sen_slope");
  const Index n = x.size();
  std::vector<Scalar> slopes;
  slopes.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n - 1; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      slopes.push_back((x(j) - x(i)) / static_cast<Scalar>(j - i));
    }
  }
  return detail::median_in_place(slopes);
}

/// x_i - beta * i (i = 1..n) with beta the Theil-Sen slope.
template <typename Derived>
Vector<typename Derived::Scalar> detrend_linear(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar beta = theil_sen_slope(x);
  const Index n = x.size();
  return x - beta * Vector<Scalar>::LinSpaced(n, Scalar(1), static_cast<Scalar>(n));
}

/// Gaussian kernel smoother with sigma = bandwidth_fraction * n. The kernel is
/// truncated at the series ends and renormalized per point.
template <typename Derived>
Vector<typename Derived::Scalar> gaussian_trend(const Eigen::MatrixBase<Derived>& x,
                                                double bandwidth_fraction) {
  using Scalar = typename Derived::Scalar;
  detail::require_length(x, 3, "gaussian_detrend");
  if (!(bandwidth_fraction > 0.0 && bandwidth_fraction < 1.0)) {
    throw RangeError("gaussian_detrend: bandwidth fraction must lie in (0, 1)");
  }
  const Index n = x.size();
  const double width = bandwidth_fraction * static_cast<double>(n);
  Vector<Scalar> kernel(n);
  for (Index d = 0; d < n; ++d) {
    const double dd = static_cast<double>(d);
    kernel(d) = static_cast<Scalar>(std::exp(-dd * dd / (2.0 * width * width)));
  }
  Vector<Scalar> trend(n);
  for (Index i = 0; i < n; ++i) {
    Scalar weighted = 0;
    Scalar total = 0;
    for (Index k = 0; k < n; ++k) {
      const Scalar w = kernel(i > k ? i - k : k - i);
      weighted += w * x(k);
      total += w;
    }
    trend(i) = weighted / total;
  }
  return trend;
}

/// Residual x - gaussian_trend(x).
template <typename Derived>
Vector<typename Derived::Scalar> gaussian_detrend(const Eigen::MatrixBase<Derived>& x,
                                                  double bandwidth_fraction) {
  return x - gaussian_trend(x, bandwidth_fraction);
}

}  // namespace mkews
