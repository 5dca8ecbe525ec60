#pragma once

// Declarative Monte Carlo experiments on the steady-state null models:
// empirical null distributions, type I error rates, stride and sensitivity
// sweeps. Every replicate owns the RNG stream mix_seed(seed, replicate), so
// tables are identical for any worker count.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mkews/ews.hpp"
#include "mkews/mann_kendall.hpp"
#include "mkews/sde.hpp"

namespace mkews {

enum class TestMethod { original, yue_wang, hamed_rao, surrogate };

std::string_view to_string(TestMethod m);
TestMethod parse_test_method(std::string_view name);

struct ExperimentSpec {
  NormalForm form = NormalForm::fold();
  NoiseSpec noise;
  double r = -1.0;
  Index length = 100;  // N, samples per original series
  Indicator indicator = Indicator::lag1_ac;
  Detrend detrend = Detrend::gaussian(0.10);
  std::vector<double> alpha_grid{0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<Stride> stride_grid{Stride::points(1)};
  std::vector<TestMethod> methods{TestMethod::original, TestMethod::yue_wang, TestMethod::hamed_rao};
  LagPolicy yue_wang_lags = LagPolicy::fixed(1);
  LagPolicy hamed_rao_lags = LagPolicy::fixed(3);
  double level = 0.05;
  Index replicates = 2000;
  Index surrogate_count = 200;
  std::uint64_t seed = 42;

  // integration contract
  double h = 0.01;
  double burn_in = 100.0;
  double sample_dt = 1.0;
  std::optional<double> escape_radius;

  // histogram binning for null distributions
  Index bins = 121;
  double hist_min = -12.0;
  double hist_max = 12.0;

  int workers = 1;  // never affects results

  void validate() const;
  SimConfig sim_config(std::uint64_t replicate_seed) const;
  EwsPipeline pipeline(double alpha, const Stride& stride) const;
};

struct ResultRow {
  std::optional<double> alpha;  // empty for rows that bypass the windows
  std::string stride;
  std::string method;
  std::string statistic;
  double value = 0.0;
  Index replicates = 0;
  std::uint64_t seed = 0;
};

struct ResultTable {
  int schema_version = 1;
  std::vector<ResultRow> rows;

  std::optional<double> value(std::optional<double> alpha, std::string_view stride,
                              std::string_view method, std::string_view statistic) const;
  void write_csv(std::ostream& out) const;
};

struct Histogram {
  std::optional<double> alpha;
  std::string stride;
  std::string statistic;
  double lo = -6.0;
  double hi = 6.0;
  std::vector<Index> counts;
  Index total = 0;
  Index clamped = 0;  // samples outside [lo, hi], counted in the edge bins

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double density(std::size_t bin) const;
  Index bin_of(double v) const;
};

struct NullDistributionTables {
  int schema_version = 1;
  std::vector<Histogram> histograms;
  Index replicates = 0;
  std::uint64_t seed = 0;

  const Histogram* find(double alpha, std::string_view statistic) const;
  void write_csv(std::ostream& out) const;
};

/// Histograms of normalized tau and of each MK method's Z, per (alpha, stride).
NullDistributionTables run_null_distribution(const ExperimentSpec& spec);

/// Rejection rate and binomial SE per (alpha, stride, method), plus an i.i.d.
/// control row (original test on white noise of length N, no windows).
ResultTable run_type1(const ExperimentSpec& spec);

/// run_type1 crossed with every stride in the grid; needs a non-empty grid.
ResultTable run_stride_sweep(const ExperimentSpec& spec);

enum class SweepDimension { noise_mode, sigma, length, distance };

std::string_view to_string(SweepDimension d);
SweepDimension parse_sweep_dimension(std::string_view name);

struct SensitivityRun {
  SweepDimension dimension = SweepDimension::sigma;
  std::string value;
  ExperimentSpec spec;
  ResultTable table;
};

/// One type I run per swept value. Values: noise_mode {additive,
/// multiplicative}; sigma > 0; length N; distance |r| (r = -|r|).
std::vector<SensitivityRun> run_sensitivity(const ExperimentSpec& base, SweepDimension dimension,
                                            const std::vector<std::string>& values);

ExperimentSpec apply_sweep_value(const ExperimentSpec& base, SweepDimension dimension,
                                 const std::string& value);

}  // namespace mkews
