#include "mkews/surrogate.hpp"

#include <cmath>
#include <random>
#include <string>

#include "mkews/mann_kendall.hpp"
#include "mkews/seed.hpp"

namespace mkews {

ARFit fit_ar1(const Eigen::Ref<const Eigen::VectorXd>& x) {
  detail::require_length(x, 10, "fit_ar1");
  detail::require_finite(x, "fit_ar1");
  ARFit fit;
  fit.mean = x.mean();
  fit.phi = autocorr(x, 1);
  if (!(std::abs(fit.phi) < 1.0)) throw DegenerateError("fit_ar1: lag-1 coefficient not stationary");
  const double sample_var = (x.array() - fit.mean).square().mean();
  fit.noise_var = sample_var * (1.0 - fit.phi * fit.phi);
  if (!(fit.noise_var > 0.0)) throw DegenerateError("fit_ar1: zero innovation variance");
  return fit;
}

Eigen::VectorXd generate_surrogate(const ARFit& fit, Index n, std::uint64_t seed, Index index) {
  if (!(std::abs(fit.phi) < 1.0) || !(fit.noise_var > 0.0)) {
    throw RangeError("generate_surrogate: AR(1) fit must satisfy |phi| < 1 and noise_var > 0");
  }
  if (n < 1) throw RangeError("generate_surrogate: length must be positive");
  std::mt19937_64 engine(mix_seed(seed, static_cast<std::uint64_t>(index)));
  std::normal_distribution<double> normal;
  const double innovation_sd = std::sqrt(fit.noise_var);
  Eigen::VectorXd out(n);
  double deviation = std::sqrt(fit.stationary_var()) * normal(engine);
  out(0) = fit.mean + deviation;
  for (Index k = 1; k < n; ++k) {
    deviation = fit.phi * deviation + innovation_sd * normal(engine);
    out(k) = fit.mean + deviation;
  }
  return out;
}

std::vector<Eigen::VectorXd> generate_surrogates(const ARFit& fit, Index n, Index count,
                                                 std::uint64_t seed) {
  if (count < kMinSurrogates) {
    throw RangeError("generate_surrogates: at least " + std::to_string(kMinSurrogates) +
                     " surrogates required");
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k) out.push_back(generate_surrogate(fit, n, seed, k));
  return out;
}

SurrogateResult surrogate_test(const Eigen::Ref<const Eigen::VectorXd>& x,
                               const EwsPipeline& pipeline, Index count, std::uint64_t seed) {
  if (count < kMinSurrogates) {
    throw RangeError("surrogate_test: at least " + std::to_string(kMinSurrogates) +
                     " surrogates required");
  }
  SurrogateResult result;
  result.n_surrogates = count;
  result.observed_tau = mk_tau(compute_ews(x, pipeline).values);
  const ARFit fit = fit_ar1(x);

  const double observed = std::abs(result.observed_tau);
  Index as_extreme = 0;
  result.surrogate_taus.reserve(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k) {
    const Eigen::VectorXd surrogate = generate_surrogate(fit, x.size(), seed, k);
    const double tau = mk_tau(compute_ews(surrogate, pipeline).values);
    result.surrogate_taus.push_back(tau);
    if (std::abs(tau) >= observed) ++as_extreme;
  }
  result.p = static_cast<double>(as_extreme + 1) / static_cast<double>(count + 1);
  return result;
}

}  // namespace mkews
