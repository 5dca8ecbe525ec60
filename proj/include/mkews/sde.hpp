#pragma once

// Steady-state null models: codimension-one normal forms driven by additive or
// multiplicative Gaussian noise, plus an exact Ornstein-Uhlenbeck sampler.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mkews/series.hpp"

namespace mkews {

enum class BifurcationKind { fold, transcritical, pitchfork };

/// fold: -r - x^2; transcritical: r x - x^2; pitchfork: r x + mu x^3.
struct NormalForm {
  BifurcationKind kind = BifurcationKind::fold;
  double mu = 0.0;  // pitchfork only; > 0 subcritical, < 0 supercritical

  static NormalForm fold() { return {BifurcationKind::fold, 0.0}; }
  static NormalForm transcritical() { return {BifurcationKind::transcritical, 0.0}; }
  static NormalForm pitchfork(double mu) { return {BifurcationKind::pitchfork, mu}; }

  void validate() const;
};

enum class NoiseMode { additive, multiplicative };

struct NoiseSpec {
  NoiseMode mode = NoiseMode::additive;
  double sigma = 0.1;
};

std::string_view to_string(BifurcationKind k);
std::string_view to_string(NoiseMode m);
BifurcationKind parse_bifurcation(std::string_view name);
NoiseMode parse_noise_mode(std::string_view name);

struct SimConfig {
  NormalForm form;
  NoiseSpec noise;
  double r = -1.0;
  std::optional<double> x0;  // defaults to the stable equilibrium
  double h = 0.01;
  double burn_in = 100.0;
  double sample_dt = 1.0;
  Index n_samples = 100;
  std::optional<double> escape_radius;  // defaults to default_escape_radius(form, r)
  std::uint64_t seed = 0;

  /// Throws ConfigError (or NoStableBranch) on a violated invariant.
  void validate() const;
};

struct Trajectory {
  Series series;
  Index escapes_discarded = 0;
  std::uint64_t seed_used = 0;
};

double drift(const NormalForm& form, double x, double r);

/// Stable equilibrium on the r < 0 branch. Throws NoStableBranch otherwise.
double stable_equilibrium(const NormalForm& form, double r);

/// theta = -f'(x*) of the Ornstein-Uhlenbeck linearization.
double linearization_rate(const NormalForm& form, double r);

/// Distance from x* to the nearest unstable equilibrium, or +inf when the
/// stable state attracts the whole line (supercritical pitchfork).
double default_escape_radius(const NormalForm& form, double r);

/// Euler-Maruyama integration of dx = f(x, r) dt + g(x) dW. A path that leaves
/// the escape radius is discarded and restarted from seed mix_seed(seed, k).
Trajectory simulate(const SimConfig& config);

/// Exact stationary OU sampling at spacing delta.
Series ou_exact(double theta, double sigma, double delta, Index n, std::uint64_t seed);

/// Restarts tolerated before simulate gives up with EscapeLimit.
inline constexpr Index kMaxRestarts = 1000;

}  // namespace mkews
