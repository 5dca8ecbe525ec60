#pragma once

// Mann-Kendall statistic and the original, Yue-Wang and Hamed-Rao trend tests.

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mkews/errors.hpp"
#include "mkews/normal.hpp"
#include "mkews/series.hpp"

namespace mkews {

enum class Method { original, yue_wang, hamed_rao };
enum class Trend { increasing, decreasing, no_trend };

std::string_view to_string(Method m);
std::string_view to_string(Trend t);
Method parse_method(std::string_view name);

/// Which autocorrelation lags enter the effective-sample-size correction.
struct LagPolicy {
  enum class Mode { fixed, significant };

  Mode mode = Mode::fixed;
  Index max_lag = 1;    // fixed: lags 1..max_lag
  double level = 0.05;  // significant: keep lags with |rho| > z_{1-level/2} / sqrt(n)

  static LagPolicy fixed(Index max_lag) { return {Mode::fixed, max_lag, 0.05}; }
  static LagPolicy significant(double level) { return {Mode::significant, 0, level}; }

  std::string to_string() const;
  /// "3" -> fixed(3); "significant" or "significant:0.01" -> significant mode.
  static LagPolicy parse(std::string_view text);
};

/// fixed(1) for Yue-Wang, fixed(3) for Hamed-Rao, fixed(1) (unused) for the original test.
inline LagPolicy default_lag_policy(Method m) {
  return m == Method::hamed_rao ? LagPolicy::fixed(3) : LagPolicy::fixed(1);
}

/// n/n* values at or below this are clamped and flagged.
inline constexpr double kEssFloor = 1e-4;

struct MKOutcome {
  Index n = 0;
  std::int64_t s = 0;
  double tau = 0.0;
  double var_s = 0.0;
  double ess_ratio = 1.0;
  double z = 0.0;
  double p = 1.0;
  Trend trend = Trend::no_trend;
  Method method = Method::original;
  bool ess_clamped = false;
};

/// Exact distribution of S for n exchangeable distinct observations.
struct NullDistribution {
  Index n = 0;
  std::vector<std::int64_t> support;  // ascending, step 2
  std::vector<double> probabilities;

  double mean() const;
  double variance() const;
};

namespace detail {

template <typename Derived>
void require_no_ties(const Eigen::MatrixBase<Derived>& x, const char* op) {
  require_finite(x, op);
  if (has_ties(x)) throw TieError(std::string(op) + ": series contains tied values");
}

inline int sgn(double v) { return (v > 0) - (v < 0); }

inline double pairs(Index n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

/// Lags selected by a policy given an autocorrelation function acf(lag-1).
template <typename Scalar>
std::vector<Index> select_lags(const Vector<Scalar>& acf, Index n, const LagPolicy& policy) {
  std::vector<Index> lags;
  if (policy.mode == LagPolicy::Mode::fixed) {
    for (Index lag = 1; lag <= policy.max_lag; ++lag) lags.push_back(lag);
    return lags;
  }
  const double bound = normal_quantile(1.0 - policy.level / 2.0) / std::sqrt(static_cast<double>(n));
  for (Index lag = 1; lag <= acf.size(); ++lag) {
    if (std::abs(static_cast<double>(acf(lag - 1))) > bound) lags.push_back(lag);
  }
  return lags;
}

inline Index acf_depth(Index n, const LagPolicy& policy) {
  if (policy.mode == LagPolicy::Mode::fixed) {
    if (policy.max_lag < 1 || policy.max_lag >= n) {
      throw RangeError("lag policy: max lag " + std::to_string(policy.max_lag) +
                       " must lie in [1, n-1] for n = " + std::to_string(n));
    }
    return policy.max_lag;
  }
  if (!(policy.level > 0.0 && policy.level < 1.0)) {
    throw RangeError("lag policy: significance level must lie in (0, 1)");
  }
  return n - 1;
}

/// 1 + (2/n) * sum over lags of (n - i) rho(i).
template <typename Scalar>
double yue_wang_correction(Index n, const Vector<Scalar>& acf, const std::vector<Index>& lags) {
  double sum = 0.0;
  for (Index lag : lags) sum += static_cast<double>(n - lag) * static_cast<double>(acf(lag - 1));
  return 1.0 + 2.0 / static_cast<double>(n) * sum;
}

/// 1 + 2/(n(n-1)(n-2)) * sum over lags of (n-i)(n-i-1)(n-i-2) rho_S(i).
template <typename Scalar>
double hamed_rao_correction(Index n, const Vector<Scalar>& acf, const std::vector<Index>& lags) {
  const double nd = static_cast<double>(n);
  double sum = 0.0;
  for (Index lag : lags) {
    const double m = static_cast<double>(n - lag);
    sum += m * (m - 1.0) * (m - 2.0) * static_cast<double>(acf(lag - 1));
  }
  return 1.0 + 2.0 / (nd * (nd - 1.0) * (nd - 2.0)) * sum;
}

template <typename Derived>
double yue_wang_raw(const Eigen::MatrixBase<Derived>& x, const LagPolicy& policy) {
  require_length(x, 3, "ess_ratio_yue_wang");
  const Index n = x.size();
  const auto detrended = detrend_linear(x);
  const auto acf = autocorr_function(detrended, acf_depth(n, policy));
  return yue_wang_correction(n, acf, select_lags(acf, n, policy));
}

// Theil-Sen detrending makes the two points of the median pair exactly level,
// so the rank autocorrelation uses midranks instead of rejecting ties.
template <typename Derived>
double hamed_rao_raw(const Eigen::MatrixBase<Derived>& x, const LagPolicy& policy) {
  require_length(x, 4, "ess_ratio_hamed_rao");
  const Index n = x.size();
  const auto detrended = detrend_linear(x);
  const Vector<double> rank = midranks(detrended);
  const auto acf = autocorr_function(rank, acf_depth(n, policy));
  return hamed_rao_correction(n, acf, select_lags(acf, n, policy));
}

}  // namespace detail

/// S = sum over i<j of sgn(x_j - x_i).
template <typename Derived>
std::int64_t s_statistic(const Eigen::MatrixBase<Derived>& x) {
  detail::require_length(x, 2, "s_statistic");
  detail::require_no_ties(x, "s_statistic");
  const Index n = x.size();
  std::int64_t s = 0;
  for (Index i = 0; i < n - 1; ++i) {
    for (Index j = i + 1; j < n; ++j) s += detail::sgn(static_cast<double>(x(j) - x(i)));
  }
  return s;
}

/// Mann-Kendall's tau, S / C(n,2).
template <typename Derived>
double mk_tau(const Eigen::MatrixBase<Derived>& x) {
  return static_cast<double>(s_statistic(x)) / detail::pairs(x.size());
}

/// Kendall's rank correlation between two tie-free series of equal length.
template <typename DerivedX, typename DerivedY>
double kendall_tau(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  if (x.size() != y.size()) {
    throw LengthMismatch("kendall_tau: lengths " + std::to_string(x.size()) + " and " +
                         std::to_string(y.size()));
  }
  detail::require_length(x, 2, "kendall_tau");
  detail::require_no_ties(x, "kendall_tau");
  detail::require_no_ties(y, "kendall_tau");
  const Index n = x.size();
  std::int64_t sum = 0;
  for (Index i = 0; i < n - 1; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      sum += detail::sgn(static_cast<double>(x(j) - x(i))) *
             detail::sgn(static_cast<double>(y(j) - y(i)));
    }
  }
  return static_cast<double>(sum) / detail::pairs(n);
}

/// Variance of S for i.i.d. data: n(n-1)(2n+5)/18.
inline double var_s_iid(Index n) {
  if (n < 2) throw RangeError("var_s_iid: n must be at least 2");
  const double nd = static_cast<double>(n);
  return nd * (nd - 1.0) * (2.0 * nd + 5.0) / 18.0;
}

/// Standardized statistic with the +-1 continuity correction.
inline double z_statistic(std::int64_t s, double var_s) {
  if (!(var_s > 0.0)) throw RangeError("z_statistic: variance must be positive");
  if (s > 0) return static_cast<double>(s - 1) / std::sqrt(var_s);
  if (s < 0) return static_cast<double>(s + 1) / std::sqrt(var_s);
  return 0.0;
}

/// Two-tailed p-value 2(1 - Phi(|z|)).
inline double p_two_tailed(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

/// Yue-Wang variance inflation n/n*: lag autocorrelations of the Theil-Sen
/// detrended series, floored at kEssFloor.
template <typename Derived>
double ess_ratio_yue_wang(const Eigen::MatrixBase<Derived>& x,
                          const LagPolicy& policy = LagPolicy::fixed(1)) {
  return std::max(detail::yue_wang_raw(x, policy), kEssFloor);
}

/// Hamed-Rao variance inflation n/n_S*: autocorrelations of the ranks of the
/// Theil-Sen detrended series, floored at kEssFloor.
template <typename Derived>
double ess_ratio_hamed_rao(const Eigen::MatrixBase<Derived>& x,
                           const LagPolicy& policy = LagPolicy::fixed(3)) {
  return std::max(detail::hamed_rao_raw(x, policy), kEssFloor);
}

/// Full two-sided trend test.
template <typename Derived>
MKOutcome mk_test(const Eigen::MatrixBase<Derived>& x, Method method, const LagPolicy& policy,
                  double level = 0.05) {
  if (!(level > 0.0 && level < 1.0)) throw RangeError("mk_test: level must lie in (0, 1)");
  detail::require_length(x, 4, "mk_test");

  MKOutcome out;
  out.n = x.size();
  out.method = method;
  out.s = s_statistic(x);
  out.tau = static_cast<double>(out.s) / detail::pairs(out.n);

  double raw = 1.0;
  if (method == Method::yue_wang) raw = detail::yue_wang_raw(x, policy);
  if (method == Method::hamed_rao) raw = detail::hamed_rao_raw(x, policy);
  out.ess_clamped = raw < kEssFloor;
  out.ess_ratio = std::max(raw, kEssFloor);

  out.var_s = var_s_iid(out.n) * out.ess_ratio;
  out.z = z_statistic(out.s, out.var_s);
  out.p = p_two_tailed(out.z);
  if (out.p < level) out.trend = out.s > 0 ? Trend::increasing : Trend::decreasing;
  return out;
}

template <typename Derived>
MKOutcome mk_test(const Eigen::MatrixBase<Derived>& x, Method method = Method::original) {
  return mk_test(x, method, default_lag_policy(method));
}

/// tau / sqrt(V(tau)) under the i.i.d. null, equivalently S / sqrt(var_s_iid(n)).
template <typename Derived>
double normalized_tau(const Eigen::MatrixBase<Derived>& x) {
  const std::int64_t s = s_statistic(x);
  return static_cast<double>(s) / std::sqrt(var_s_iid(x.size()));
}

/// Exact null pmf of S via the inversion-count recursion. Requires 2 <= n <= 60.
NullDistribution exact_null_distribution(Index n);

/// Number of permutations of n elements with k inversions, k = 0..C(n,2).
/// Exact in 64-bit arithmetic for n <= 20.
std::vector<std::uint64_t> inversion_counts(Index n);

}  // namespace mkews
