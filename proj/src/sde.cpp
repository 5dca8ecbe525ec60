#include "mkews/sde.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "mkews/seed.hpp"

namespace mkews {

std::string_view to_string(BifurcationKind k) {
  switch (k) {
    case BifurcationKind::fold: return "fold";
    case BifurcationKind::transcritical: return "transcritical";
    case BifurcationKind::pitchfork: return "pitchfork";
  }
  return "unknown";
}

std::string_view to_string(NoiseMode m) {
  return m == NoiseMode::additive ? "additive" : "multiplicative";
}

BifurcationKind parse_bifurcation(std::string_view name) {
  if (name == "fold") return BifurcationKind::fold;
  if (name == "transcritical") return BifurcationKind::transcritical;
  if (name == "pitchfork") return BifurcationKind::pitchfork;
  throw ConfigError("unknown normal form '" + std::string(name) + "'");
}

NoiseMode parse_noise_mode(std::string_view name) {
  if (name == "additive") return NoiseMode::additive;
  if (name == "multiplicative") return NoiseMode::multiplicative;
  throw ConfigError("unknown noise mode '" + std::string(name) + "'");
}

void NormalForm::validate() const {
  if (kind == BifurcationKind::pitchfork && mu == 0.0) {
    throw ConfigError("pitchfork normal form needs a nonzero cubic coefficient mu");
  }
}

double drift(const NormalForm& form, double x, double r) {
  switch (form.kind) {
    case BifurcationKind::fold: return -r - x * x;
    case BifurcationKind::transcritical: return r * x - x * x;
    case BifurcationKind::pitchfork: return r * x + form.mu * x * x * x;
  }
  return 0.0;
}

double stable_equilibrium(const NormalForm& form, double r) {
  form.validate();
  if (!(r < 0.0)) {
    throw NoStableBranch("no stable branch handled for " + std::string(to_string(form.kind)) +
                         " at r = " + std::to_string(r) + " (requires r < 0)");
  }
  return form.kind == BifurcationKind::fold ? std::sqrt(-r) : 0.0;
}

double linearization_rate(const NormalForm& form, double r) {
  const double x = stable_equilibrium(form, r);
  switch (form.kind) {
    case BifurcationKind::fold: return 2.0 * x;
    case BifurcationKind::transcritical:
    case BifurcationKind::pitchfork: return -r;
  }
  return 0.0;
}

double default_escape_radius(const NormalForm& form, double r) {
  const double x = stable_equilibrium(form, r);
  switch (form.kind) {
    case BifurcationKind::fold: return 2.0 * x;
    case BifurcationKind::transcritical: return -r;
    case BifurcationKind::pitchfork:
      if (form.mu > 0.0) return std::sqrt(-r / form.mu);
      return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

namespace {

Index step_count(double span, double h, const char* what) {
  const double ratio = span / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError(std::string(what) + " must be an integer multiple of the step h");
  }
  return static_cast<Index>(rounded);
}

}  // namespace

void SimConfig::validate() const {
  form.validate();
  if (!(noise.sigma > 0.0) || !std::isfinite(noise.sigma)) throw ConfigError("sigma must be positive");
  if (!(h > 0.0)) throw ConfigError("integration step h must be positive");
  if (!(sample_dt > 0.0)) throw ConfigError("sample_dt must be positive");
  if (h > sample_dt) throw ConfigError("integration step h must not exceed sample_dt");
  if (!(burn_in >= 0.0)) throw ConfigError("burn_in must be nonnegative");
  if (n_samples < 1) throw ConfigError("n_samples must be positive");
  if (escape_radius && !(*escape_radius > 0.0)) throw ConfigError("escape_radius must be positive");
  step_count(sample_dt, h, "sample_dt");
  step_count(burn_in, h, "burn_in");
  stable_equilibrium(form, r);
}

Trajectory simulate(const SimConfig& config) {
  config.validate();
  const double x_star = stable_equilibrium(config.form, config.r);
  const double radius = config.escape_radius.value_or(default_escape_radius(config.form, config.r));
  const double start = config.x0.value_or(x_star);
  const Index burn_steps = step_count(config.burn_in, config.h, "burn_in");
  const Index sample_steps = step_count(config.sample_dt, config.h, "sample_dt");
  const double sqrt_h = std::sqrt(config.h);
  const double sigma = config.noise.sigma;
  const bool multiplicative = config.noise.mode == NoiseMode::multiplicative;

  Trajectory out;
  out.series.values.resize(config.n_samples);
  out.series.dt = config.sample_dt;

  for (Index attempt = 0; attempt <= kMaxRestarts; ++attempt) {
    const std::uint64_t seed =
        attempt == 0 ? config.seed : mix_seed(config.seed, static_cast<std::uint64_t>(attempt));
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal;

    double x = start;
    bool escaped = false;
    auto advance = [&](Index steps) {
      for (Index k = 0; k < steps; ++k) {
        const double g = multiplicative ? sigma * x : sigma;
        x += drift(config.form, x, config.r) * config.h + g * sqrt_h * normal(engine);
        if (!(std::abs(x - x_star) <= radius)) {
          escaped = true;
          return;
        }
      }
    };

    advance(burn_steps);
    for (Index i = 0; i < config.n_samples && !escaped; ++i) {
      advance(sample_steps);
      out.series.values(i) = x;
    }
    if (!escaped) {
      out.seed_used = seed;
      return out;
    }
    ++out.escapes_discarded;
  }
  throw EscapeLimit("simulate: more than " + std::to_string(kMaxRestarts) +
                    " consecutive trajectories escaped the basin");
}

Series ou_exact(double theta, double sigma, double delta, Index n, std::uint64_t seed) {
  if (!(theta > 0.0 && sigma > 0.0 && delta > 0.0)) {
    throw RangeError("ou_exact: theta, sigma and delta must be positive");
  }
  if (n < 1) throw RangeError("ou_exact: n must be positive");
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  const double decay = std::exp(-theta * delta);
  const double stationary_sd = sigma / std::sqrt(2.0 * theta);
  const double innovation_sd = stationary_sd * std::sqrt(-std::expm1(-2.0 * theta * delta));

  Series out;
  out.values.resize(n);
  out.dt = delta;
  double x = stationary_sd * normal(engine);
  out.values(0) = x;
  for (Index k = 1; k < n; ++k) {
    x = decay * x + innovation_sd * normal(engine);
    out.values(k) = x;
  }
  return out;
}

}  // namespace mkews
