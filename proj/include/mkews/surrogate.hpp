#pragma once

// Monte Carlo significance test for the Mann-Kendall tau of an indicator
// series against stationary AR(1) surrogates of the original series.

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "mkews/ews.hpp"
#include "mkews/series.hpp"

namespace mkews {

struct ARFit {
  double phi = 0.0;
  double noise_var = 1.0;
  double mean = 0.0;

  /// noise_var / (1 - phi^2)
  double stationary_var() const { return noise_var / (1.0 - phi * phi); }
};

struct SurrogateResult {
  double observed_tau = 0.0;
  std::vector<double> surrogate_taus;
  double p = 1.0;
  Index n_surrogates = 0;
};

/// Smallest surrogate count that can resolve p < 0.05.
inline constexpr Index kMinSurrogates = 19;

/// Yule-Walker AR(1) fit: phi is the lag-1 autocorrelation, noise_var the
/// (1/n) sample variance times 1 - phi^2.
ARFit fit_ar1(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Surrogate number `index` of length n, started from the stationary law.
Eigen::VectorXd generate_surrogate(const ARFit& fit, Index n, std::uint64_t seed, Index index);

std::vector<Eigen::VectorXd> generate_surrogates(const ARFit& fit, Index n, Index count,
                                                 std::uint64_t seed);

/// p = (1 + #{|tau_surrogate| >= |tau_observed|}) / (count + 1), where every
/// tau is the Mann-Kendall tau of the pipeline's indicator series.
SurrogateResult surrogate_test(const Eigen::Ref<const Eigen::VectorXd>& x,
                               const EwsPipeline& pipeline, Index count, std::uint64_t seed);

}  // namespace mkews
