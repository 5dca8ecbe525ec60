#pragma once

// Early-warning-signal indicators estimated over rolling windows.

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <string_view>

#include "mkews/errors.hpp"
#include "mkews/series.hpp"

namespace mkews {

/// Spacing between successive window starts, in points or as a fraction of N.
struct Stride {
  enum class Kind { points, fraction };

  Kind kind = Kind::points;
  double value = 1.0;

  static Stride points(Index p) { return {Kind::points, static_cast<double>(p)}; }
  static Stride fraction(double f) { return {Kind::fraction, f}; }

  /// points as-is; fractions resolve to max(1, round(f * N)).
  Index resolve(Index series_length) const;
  /// "5" -> 5 points; "2%" or "0.02" -> fraction of N.
  static Stride parse(std::string_view text);
  std::string to_string() const;
};

struct WindowConfig {
  double alpha = 0.5;  // relative window size q/N
  Stride stride = Stride::points(1);

  /// q = round(alpha * N), halves rounded up.
  Index window_size(Index series_length) const;
};

enum class Indicator { variance, lag1_ac };

std::string_view to_string(Indicator i);
Indicator parse_indicator(std::string_view name);

struct Detrend {
  enum class Kind { none, gaussian };

  Kind kind = Kind::gaussian;
  double bandwidth = 0.10;

  static Detrend none() { return {Kind::none, 0.0}; }
  static Detrend gaussian(double bandwidth = 0.10) { return {Kind::gaussian, bandwidth}; }

  std::string to_string() const;
};

/// Detrending, indicator and window choice applied to every series alike.
struct EwsPipeline {
  Detrend detrend = Detrend::gaussian(0.10);
  Indicator indicator = Indicator::lag1_ac;
  WindowConfig window;
};

template <typename Scalar>
struct IndicatorSeries {
  Vector<Scalar> values;
  RankVector starts;  // 1-based start index of each window
  Indicator indicator = Indicator::lag1_ac;
  WindowConfig config;
  Index window_size = 0;
  Index stride_points = 1;

  Index size() const { return values.size(); }
};

/// floor((N - q) / stride) + 1.
inline Index window_count(Index n, Index q, Index stride) {
  if (q > n) throw RangeError("window_count: window size exceeds series length");
  if (q < 1 || stride < 1) throw RangeError("window_count: window size and stride must be positive");
  return (n - q) / stride + 1;
}

namespace detail {

struct WindowGeometry {
  Index q = 0;
  Index stride = 1;
  Index count = 0;
};

inline WindowGeometry resolve_windows(Index n, const WindowConfig& config) {
  if (!(config.alpha > 0.0 && config.alpha <= 1.0)) {
    throw RangeError("window: alpha must lie in (0, 1]");
  }
  WindowGeometry g;
  g.q = config.window_size(n);
  if (g.q < 3) throw RangeError("window: q = round(alpha N) must be at least 3");
  g.stride = config.stride.resolve(n);
  g.count = window_count(n, g.q, g.stride);
  return g;
}

template <typename Scalar>
IndicatorSeries<Scalar> make_indicator(Indicator kind, const WindowConfig& config,
                                       const WindowGeometry& g) {
  IndicatorSeries<Scalar> out;
  out.values.resize(g.count);
  out.starts.resize(g.count);
  out.indicator = kind;
  out.config = config;
  out.window_size = g.q;
  out.stride_points = g.stride;
  for (Index w = 0; w < g.count; ++w) out.starts(w) = w * g.stride + 1;
  return out;
}

}  // namespace detail

/// s^2_i = 1/(q-1) sum (x_k - mean_i)^2 over each window.
template <typename Derived>
IndicatorSeries<typename Derived::Scalar> rolling_variance(const Eigen::MatrixBase<Derived>& x,
                                                           const WindowConfig& config) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(x, "rolling_variance");
  const auto g = detail::resolve_windows(x.size(), config);
  auto out = detail::make_indicator<Scalar>(Indicator::variance, config, g);
  for (Index w = 0; w < g.count; ++w) {
    const auto window = x.segment(w * g.stride, g.q);
    const Scalar mean = window.mean();
    out.values(w) = (window.array() - mean).square().sum() / static_cast<Scalar>(g.q - 1);
  }
  return out;
}

/// rho_1(i) = (1/q) sum_{k=i}^{i+q-2} (x_{k+1} - mean_i)(x_k - mean_i) / s^2_i,
/// with s^2_i the 1/(q-1) window variance.
template <typename Derived>
IndicatorSeries<typename Derived::Scalar> rolling_lag1_ac(const Eigen::MatrixBase<Derived>& x,
                                                          const WindowConfig& config) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(x, "rolling_lag1_ac");
  const auto g = detail::resolve_windows(x.size(), config);
  auto out = detail::make_indicator<Scalar>(Indicator::lag1_ac, config, g);
  Vector<Scalar> centered(g.q);
  for (Index w = 0; w < g.count; ++w) {
    const auto window = x.segment(w * g.stride, g.q);
    centered = window.array() - window.mean();
    const Scalar variance = centered.squaredNorm() / static_cast<Scalar>(g.q - 1);
    if (variance == Scalar(0)) {
      throw DegenerateError("rolling_lag1_ac: constant window starting at index " +
                            std::to_string(out.starts(w)));
    }
    const Scalar lagged = centered.head(g.q - 1).dot(centered.tail(g.q - 1));
    out.values(w) = lagged / static_cast<Scalar>(g.q) / variance;
  }
  return out;
}

/// Optional full-series detrending followed by the rolling indicator.
template <typename Derived>
IndicatorSeries<typename Derived::Scalar> compute_ews(const Eigen::MatrixBase<Derived>& x,
                                                      const EwsPipeline& pipeline) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> prepared;
  if (pipeline.detrend.kind == Detrend::Kind::gaussian) {
    prepared = gaussian_detrend(x, pipeline.detrend.bandwidth);
  } else {
    prepared = x;
  }
  if (pipeline.indicator == Indicator::variance) return rolling_variance(prepared, pipeline.window);
  return rolling_lag1_ac(prepared, pipeline.window);
}

template <typename Derived>
IndicatorSeries<typename Derived::Scalar> compute_ews(const Eigen::MatrixBase<Derived>& x,
                                                      const Detrend& detrend, Indicator indicator,
                                                      const WindowConfig& config) {
  return compute_ews(x, EwsPipeline{detrend, indicator, config});
}

}  // namespace mkews
